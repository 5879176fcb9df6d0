#pragma once

#include <cstddef>

#include "chronicle/estimators.hpp"
#include "chronicle/series.hpp"

namespace chronicle::stats {

// Annualization convention for reported per-year figures.
inline constexpr double kTradingDaysPerYear = 252.0;

// Sharpe guard: below this volatility the ratio is reported as missing.
inline constexpr double kDefaultVolEpsilon = 1e-9;

/// One estimator drives every expectation E(.) inside a computation, so the
/// windowed identities (cov = E(XY) - E(X)E(Y), var >= 0, ...) hold consistently.
struct MomentConfig {
    estimators::EstimatorConfig estimator;
};

// Telemetry for the variance clamp: the windowed identity is approximate and can
// dip slightly below zero; such values are clamped to 0 and counted here.
struct ClampStats {
    std::size_t clamped = 0;
};

// cov(X,Y)(t) = E(XY)(t) - E(X)(t) E(Y)(t), warm-up missing.
Chronicle covariance(const Chronicle& x, const Chronicle& y, const MomentConfig& cfg);

// var(X) = cov(X,X) clamped at zero; vol(X) = sqrt(var(X)).
Chronicle variance(const Chronicle& x, const MomentConfig& cfg, ClampStats* stats = nullptr);
Chronicle volatility(const Chronicle& x, const MomentConfig& cfg, ClampStats* stats = nullptr);

/// Logarithmic returns over a horizon of delta_t samples: raw holds
/// ln X(t) - ln X(t - delta_t), normalized divides by the horizon in days.
struct ReturnSeries {
    int delta_t = 1;
    Chronicle raw;
    Chronicle normalized;
};

ReturnSeries log_return(const Chronicle& x, int delta_t);

/// Mean normalized return: (E(ln X)(t) - E(ln X)(t - delta_t)) / horizon.
/// delta_t == 0 requests the instantaneous variant, the slope estimate of ln X.
Chronicle mean_return(const Chronicle& x, int delta_t, const MomentConfig& cfg);

// Historical volatility of the normalized return, sqrt(E(r^2) - rbar^2), with
// the variance clamping rule.
Chronicle asset_volatility(const Chronicle& x, int delta_t, const MomentConfig& cfg,
                           ClampStats* stats = nullptr);

// Sharpe ratio rbar / vol; missing wherever vol < eps_vol.
Chronicle sharpe_ratio(const Chronicle& x, int delta_t, const MomentConfig& cfg,
                       double eps_vol = kDefaultVolEpsilon);

/// Linear extrapolation of the smoothed volatility: output at index i is
/// trend(vol)(i) + horizon * step * derivative(vol)(i), the value predicted a
/// horizon ahead of the estimate attributed to i - eval_delay.
Chronicle predict_volatility(const Chronicle& vol, int horizon, const MomentConfig& cfg);

}  // namespace chronicle::stats
