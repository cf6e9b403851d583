#pragma once

#include <cmath>
#include <cstdint>

namespace qvar {

// Counter-based generator: output i of stream `key` is a pure function of
// (key, i), so seeded sub-streams can be split off for parallel work and every
// run of a config reproduces the same draws bit for bit.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + 0x9e3779b97f4a7c15ULL * (++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Derived independent stream; tag must differ between siblings.
    CounterRng child(std::uint64_t tag) const {
        std::uint64_t z = key_ ^ (0x2545f4914f6cdd1dULL * (tag + 0x9e3779b97f4a7c15ULL));
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        return CounterRng(z ^ (z >> 33));
    }

    // uniform in [0,1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard normal via Box-Muller (deterministic, no cached spare)
    double normal() {
        double u1 = uniform01(), u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // uniform integer in [0, n)
    std::uint64_t index(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace qvar
