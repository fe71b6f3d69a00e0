#pragma once

#include <stdexcept>
#include <string>

namespace gaussnet {

struct InvalidFrequency : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IncompatibleStates : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPartition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested coupling drives the potential matrix indefinite (imaginary
// normal-mode frequency).
struct NonPhysicalCoupling : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |K[node, mode]| too small to realize any finite coupling to the mode.
struct NodeDecoupledFromMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IncompleteTensor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gaussnet
