#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chronicle/series.hpp"

namespace chronicle::estimators {

/// Discrete filter realizing a causal sliding local-polynomial fit. The window
/// holds the trailing N samples; the fit is a polynomial of degree d evaluated
/// eval_delay samples before the newest one, so the estimate carries an explicit,
/// configurable delay instead of the (N-1)/2 lag a plain moving average hides.
///
/// weights[j] applied to a window (oldest sample first) yields coefficient a_j of
/// the fitted polynomial expanded about the evaluation point: a_0 is the value
/// estimate, a_1 the slope in value/day, a_2 the quadratic coefficient in
/// value/day^2. The weights reproduce every polynomial of degree <= d exactly and
/// depend only on (window, degree, eval_delay, step).
struct EstimatorConfig {
    int window = 100;
    int degree = 1;
    int eval_delay = 50;
    double step = 1.0;
    std::vector<std::vector<double>> weights;  // (degree + 1) rows of size window
};

/// Builds the filter weights by exact moment matching: a least-squares projection
/// of the window onto the monomial basis centered at the delayed evaluation point,
/// solved once per configuration. Throws ConfigError for infeasible sizes
/// (window < degree + 2, eval_delay outside [0, window), degree not in {0,1,2})
/// or if the polynomial-exactness check fails.
EstimatorConfig make_config(int window, int degree, int eval_delay, double step = 1.0);

// Default evaluation delay: mid-window.
inline int default_delay(int window) { return window / 2; }

struct LocalFit {
    std::vector<double> coefficients;   // a_0 .. a_degree
    std::size_t window_end_index = 0;   // grid index of the newest sample
};

// Weighted sums of one full window (oldest sample first, exactly config.window values).
LocalFit fit_window(std::span<const double> samples, const EstimatorConfig& config,
                    std::size_t window_end_index = 0);

/// Causal sliding trend estimate E(X). Output at index i is the fitted value
/// attributed to index i - eval_delay; the first window - 1 outputs are missing,
/// as is any output whose window contains a missing sample.
Chronicle estimate_trend(const Chronicle& x, const EstimatorConfig& config);

/// Sliding slope estimate (units value/day), same attribution and warm-up rules.
/// Requires degree >= 1.
Chronicle estimate_derivative(const Chronicle& x, const EstimatorConfig& config);

// Classical baseline: causal unweighted mean of the trailing window.
Chronicle moving_average(const Chronicle& x, int window);

// Classical derivative baseline: moving average followed by a one-step finite
// difference, the usual technical-analysis two-step recipe.
Chronicle classical_derivative(const Chronicle& x, int ma_window);

/// Additive split of a chronicle into trend and rapid fluctuations. At every
/// index where both parts are present, trend[i] + fluctuation[i] reproduces the
/// delay-aligned input x[i - eval_delay] exactly.
struct Decomposition {
    Chronicle trend;
    Chronicle fluctuation;
    EstimatorConfig config;
};

Decomposition decompose(const Chronicle& x, const EstimatorConfig& config);

}  // namespace chronicle::estimators
