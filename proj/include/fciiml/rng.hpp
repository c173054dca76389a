#pragma once

#include <cstdint>
#include <random>

namespace fciiml {

/// Seeded generator with a portable uniform draw (std distributions are
/// implementation-defined, which would break cross-platform reproducibility).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace fciiml
