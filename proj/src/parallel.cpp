#include "kerrj/parallel.hpp"

#include <cstdlib>
#include <string>

namespace kerrj {

int default_workers() {
    if (const char* s = std::getenv("KERRJ_THREADS")) {
        try {
            const int n = std::stoi(s);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace kerrj
