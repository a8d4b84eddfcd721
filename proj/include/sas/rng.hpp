#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sas/common.hpp"

namespace sas {

// splitmix64: fully specified, so results are identical across platforms and
// standard-library implementations (std distributions are not).
class Rng {
   public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), unbiased
    uint64_t bounded(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t mask = ~uint64_t{0} >> __builtin_clzll(n - 1 | 1);
        uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= n);
        return v;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

   private:
    uint64_t state_;
};

// Derives independent per-purpose seeds from one master seed, so fit order and
// worker scheduling cannot change any stream.
inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index = 0) {
    uint64_t h = fnv1a64(tag);
    h = fnv1a64(&master, sizeof(master), h);
    h = fnv1a64(&index, sizeof(index), h);
    Rng r(h);
    return r.next_u64();
}

}  // namespace sas
