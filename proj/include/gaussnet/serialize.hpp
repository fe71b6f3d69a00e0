#pragma once

#include <string>

#include "gaussnet/gaussian_state.hpp"
#include "gaussnet/protocols.hpp"

namespace gaussnet {

// JSON record for a state: cm as a row-major array, means, freqs.
std::string to_json(const GaussianState& state);
GaussianState state_from_json(const std::string& text);

// Flat CSV row for a transfer result (see transfer_result_csv_header).
std::string transfer_result_csv_header();
std::string to_csv_row(const TransferResult& result);
std::string to_json(const TransferResult& result);

}  // namespace gaussnet
