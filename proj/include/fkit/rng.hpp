#ifndef FKIT_RNG_HPP
#define FKIT_RNG_HPP

#include <cstdint>
#include <random>

namespace fkit {

// All randomized operations take an explicit Rng; a fixed seed reproduces the
// run bit-for-bit (mt19937_64 output is specified by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = eng_(); } while (v >= lim);
        return v % n;
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) { // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 eng_;
};

} // namespace fkit

#endif
