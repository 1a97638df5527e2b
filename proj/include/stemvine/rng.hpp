#pragma once

#include <cmath>
#include <cstdint>

namespace stemvine {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

// Counter-based stream: every draw is a pure function of (key, counter), so
// derived streams can be consumed in any order and still reproduce exactly.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    CounterRng derive(std::uint64_t stream) const { return CounterRng(mix64(key_, stream)); }

    std::uint64_t next_u64() { return mix64(key_, counter_++); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; two draws per value, no cached state.
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform sign in {-1.0, +1.0}.
    double sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace stemvine
