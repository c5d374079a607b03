#include "popdyn/ensemble.hpp"
#include <cstdlib>

namespace popdyn {

int default_thread_count() {
    if (const char* env = std::getenv("POPDYN_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::uint64_t derive_seed(std::uint64_t seed, const char* tag) {
    return mix64(seed ^ hash_tag(tag));
}

} // namespace popdyn
