#ifndef VIGIL_RNG_HPP
#define VIGIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace vigil {

/// Seeded RNG with fixed derivation formulas. std::mt19937_64 produces an
/// identical bit stream everywhere; the distributions below avoid the
/// implementation-defined std::*_distribution classes so generated traces
/// are byte-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(eng_() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Poisson by inverse-CDF walk; fine for the small rates used here.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double l = std::exp(-lambda);
        std::int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

    /// Independent child stream (for per-area / per-source decomposition).
    Rng fork(std::uint64_t salt) {
        return Rng(eng_() ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace vigil

#endif  // VIGIL_RNG_HPP
