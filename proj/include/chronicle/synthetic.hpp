#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "chronicle/panel.hpp"
#include "chronicle/series.hpp"

namespace chronicle::synthetic {

/// Deterministic standard-normal draws: a fixed Box-Muller transform over
/// mt19937_64, so sequences are bit-identical across platforms (the standard
/// library's normal_distribution is implementation-defined).
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform01();
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// x(t) = offset + slope * t over n samples. Handy ground truth for fits.
Chronicle ramp(std::size_t n, double slope, double offset = 0.0, double step = 1.0);

Chronicle constant(std::size_t n, double level, double step = 1.0);

// x(t) = initial * exp(rate * t): constant normalized log return by construction.
Chronicle exponential(std::size_t n, double initial, double rate, double step = 1.0);

// Slow sine around a base level with additive Gaussian noise; the seed fixes
// both the phase and the noise path.
Chronicle noisy_sine(std::size_t n, double base, double amplitude, double period,
                     double noise_sigma, std::uint64_t seed, double step = 1.0);

// Geometric random walk: x(t+1) = x(t) * exp(drift + sigma * z_t), z ~ N(0,1).
Chronicle random_walk(std::size_t n, double initial, double drift, double sigma,
                      std::uint64_t seed, double step = 1.0);

/// A slowly trending, mean-reverting positive series reminiscent of a commodity
/// price: random-walk shocks pulled toward a drifting anchor. Strictly positive.
Chronicle gold_like(std::size_t n, double initial, std::uint64_t seed, double step = 1.0);

/// Panel of geometric random walks where the first `strong` columns carry a
/// clearly higher drift at equal noise, so a Sharpe-seeking allocator has an
/// unambiguous direction to move in.
AlignedPanel dominance_panel(std::size_t n, std::size_t strong, std::size_t weak,
                             double strong_drift, double weak_drift, double sigma,
                             std::uint64_t seed);

}  // namespace chronicle::synthetic
