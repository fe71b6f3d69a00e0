#include "gaussnet/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gaussnet {

int default_workers() {
    if (const char* env = std::getenv("GAUSSNET_WORKERS")) {
        try {
            int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace gaussnet
