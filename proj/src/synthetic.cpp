#include "chronicle/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chronicle/errors.hpp"

namespace chronicle::synthetic {

double NormalSource::uniform01() {
    // 53-bit mantissa draw in (0, 1]; never 0, so log() below is safe.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double NormalSource::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u = uniform01();
    const double v = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

namespace {

std::vector<Sample> allocate(std::size_t n) {
    if (n == 0) throw SizeError("synthetic series needs at least one sample");
    return std::vector<Sample>(n);
}

}  // namespace

Chronicle ramp(std::size_t n, double slope, double offset, double step) {
    auto values = allocate(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = offset + slope * static_cast<double>(i) * step;
    return Chronicle("ramp", 0.0, step, std::move(values));
}

Chronicle constant(std::size_t n, double level, double step) {
    auto values = allocate(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = level;
    return Chronicle("constant", 0.0, step, std::move(values));
}

Chronicle exponential(std::size_t n, double initial, double rate, double step) {
    if (!(initial > 0.0)) throw ConfigError("exponential fixture needs a positive start value");
    auto values = allocate(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = initial * std::exp(rate * static_cast<double>(i) * step);
    return Chronicle("exponential", 0.0, step, std::move(values));
}

Chronicle noisy_sine(std::size_t n, double base, double amplitude, double period,
                     double noise_sigma, std::uint64_t seed, double step) {
    if (!(period > 0.0)) throw ConfigError("sine period must be positive");
    auto values = allocate(n);
    NormalSource noise(seed);
    const double phase = 2.0 * std::numbers::pi * (static_cast<double>(seed % 997) / 997.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * step;
        values[i] = base + amplitude * std::sin(2.0 * std::numbers::pi * t / period + phase) +
                    noise_sigma * noise.next();
    }
    return Chronicle("noisy_sine", 0.0, step, std::move(values));
}

Chronicle random_walk(std::size_t n, double initial, double drift, double sigma,
                      std::uint64_t seed, double step) {
    if (!(initial > 0.0)) throw ConfigError("random walk needs a positive start value");
    auto values = allocate(n);
    NormalSource noise(seed);
    double level = initial;
    values[0] = level;
    for (std::size_t i = 1; i < n; ++i) {
        level *= std::exp(drift + sigma * noise.next());
        values[i] = level;
    }
    return Chronicle("random_walk", 0.0, step, std::move(values));
}

Chronicle gold_like(std::size_t n, double initial, std::uint64_t seed, double step) {
    if (!(initial > 0.0)) throw ConfigError("price fixture needs a positive start value");
    auto values = allocate(n);
    NormalSource noise(seed);
    double anchor = initial;
    double level = initial;
    values[0] = level;
    for (std::size_t i = 1; i < n; ++i) {
        anchor *= std::exp(2e-4);  // gentle secular drift of the anchor
        const double pull = 0.02 * (std::log(anchor) - std::log(level));
        level *= std::exp(pull + 0.008 * noise.next());
        values[i] = level;
    }
    return Chronicle("gold_like", 0.0, step, std::move(values));
}

AlignedPanel dominance_panel(std::size_t n, std::size_t strong, std::size_t weak,
                             double strong_drift, double weak_drift, double sigma,
                             std::uint64_t seed) {
    if (strong + weak == 0) throw SizeError("panel needs at least one column");
    AlignedPanel panel;
    panel.start = 0.0;
    panel.step = 1.0;
    panel.length = n;
    for (std::size_t c = 0; c < strong + weak; ++c) {
        const bool is_strong = c < strong;
        Chronicle walk = random_walk(n, 100.0, is_strong ? strong_drift : weak_drift, sigma,
                                     seed + c, 1.0);
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = *walk[i];
        panel.columns.push_back(std::move(column));
        panel.labels.push_back((is_strong ? "strong" : "weak") +
                               std::to_string(is_strong ? c : c - strong));
    }
    return panel;
}

}  // namespace chronicle::synthetic
