#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace bondwit {

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the distributions are implemented here rather than taken from
/// <random> because the standard leaves those implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Standard normal deviate (Marsaglia polar method).
    double normal();
    /// Complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal();

    /// Independent stream keyed by (seed, stream); does not advance *this.
    SeededRng derive(std::uint64_t stream) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bondwit
