#include "chronicle/statistics.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "chronicle/errors.hpp"

namespace chronicle::stats {

namespace {

using estimators::estimate_derivative;
using estimators::estimate_trend;

Chronicle raw_covariance(const Chronicle& x, const Chronicle& y, const MomentConfig& cfg) {
    if (!x.same_grid(y)) {
        throw GridError("covariance: '" + x.label() + "' and '" + y.label() +
                        "' are not on the same grid");
    }
    const Chronicle exy = estimate_trend(
        zip_samples(x, y, [](double a, double b) { return a * b; }), cfg.estimator);
    const Chronicle ex = estimate_trend(x, cfg.estimator);
    const Chronicle ey = estimate_trend(y, cfg.estimator);

    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (exy[i].has_value() && ex[i].has_value() && ey[i].has_value()) {
            out[i] = *exy[i] - *ex[i] * *ey[i];
        }
    }
    return x.with_values(std::move(out));
}

Chronicle clamp_nonnegative(const Chronicle& x, ClampStats* stats) {
    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].has_value()) continue;
        if (*x[i] < 0.0) {
            out[i] = 0.0;
            if (stats != nullptr) ++stats->clamped;
        } else {
            out[i] = x[i];
        }
    }
    return x.with_values(std::move(out));
}

}  // namespace

Chronicle covariance(const Chronicle& x, const Chronicle& y, const MomentConfig& cfg) {
    return raw_covariance(x, y, cfg);
}

Chronicle variance(const Chronicle& x, const MomentConfig& cfg, ClampStats* stats) {
    return clamp_nonnegative(raw_covariance(x, x, cfg), stats);
}

Chronicle volatility(const Chronicle& x, const MomentConfig& cfg, ClampStats* stats) {
    return map_samples(variance(x, cfg, stats), [](double v) { return std::sqrt(v); });
}

ReturnSeries log_return(const Chronicle& x, int delta_t) {
    if (delta_t <= 0) {
        throw ConfigError("log_return horizon must be > 0, got " + std::to_string(delta_t));
    }
    const std::size_t dt = static_cast<std::size_t>(delta_t);
    if (x.size() <= dt) {
        throw SizeError("series '" + x.label() + "' has " + std::to_string(x.size()) +
                        " samples, log_return horizon is " + std::to_string(delta_t));
    }
    const Chronicle lx = log_transform(x);
    const double horizon_days = static_cast<double>(delta_t) * x.step();

    ReturnSeries rs;
    rs.delta_t = delta_t;
    std::vector<Sample> raw(x.size());
    std::vector<Sample> norm(x.size());
    for (std::size_t i = dt; i < x.size(); ++i) {
        if (lx[i].has_value() && lx[i - dt].has_value()) {
            raw[i] = *lx[i] - *lx[i - dt];
            norm[i] = *raw[i] / horizon_days;
        }
    }
    rs.raw = x.with_values(std::move(raw));
    rs.normalized = x.with_values(std::move(norm));
    return rs;
}

Chronicle mean_return(const Chronicle& x, int delta_t, const MomentConfig& cfg) {
    if (delta_t < 0) {
        throw ConfigError("mean_return horizon must be >= 0, got " + std::to_string(delta_t));
    }
    const Chronicle lx = log_transform(x);
    if (delta_t == 0) {
        // Instantaneous variant: the slope estimate of ln X.
        return estimate_derivative(lx, cfg.estimator);
    }
    const Chronicle trend = estimate_trend(lx, cfg.estimator);
    const std::size_t dt = static_cast<std::size_t>(delta_t);
    const double horizon_days = static_cast<double>(delta_t) * x.step();
    std::vector<Sample> out(x.size());
    for (std::size_t i = dt; i < x.size(); ++i) {
        if (trend[i].has_value() && trend[i - dt].has_value()) {
            out[i] = (*trend[i] - *trend[i - dt]) / horizon_days;
        }
    }
    return x.with_values(std::move(out));
}

Chronicle asset_volatility(const Chronicle& x, int delta_t, const MomentConfig& cfg,
                           ClampStats* stats) {
    const ReturnSeries rs = log_return(x, delta_t);
    const Chronicle rbar = mean_return(x, delta_t, cfg);
    const Chronicle er2 = estimate_trend(
        map_samples(rs.normalized, [](double r) { return r * r; }), cfg.estimator);

    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (er2[i].has_value() && rbar[i].has_value()) {
            const double v = *er2[i] - *rbar[i] * *rbar[i];
            if (v < 0.0) {
                out[i] = 0.0;
                if (stats != nullptr) ++stats->clamped;
            } else {
                out[i] = std::sqrt(v);
            }
        }
    }
    return x.with_values(std::move(out));
}

Chronicle sharpe_ratio(const Chronicle& x, int delta_t, const MomentConfig& cfg, double eps_vol) {
    const Chronicle rbar = mean_return(x, delta_t, cfg);
    const Chronicle vol = asset_volatility(x, delta_t, cfg);
    std::vector<Sample> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rbar[i].has_value() && vol[i].has_value() && *vol[i] >= eps_vol) {
            out[i] = *rbar[i] / *vol[i];
        }
    }
    return x.with_values(std::move(out));
}

Chronicle predict_volatility(const Chronicle& vol, int horizon, const MomentConfig& cfg) {
    if (horizon < 1) {
        throw ConfigError("prediction horizon must be >= 1, got " + std::to_string(horizon));
    }
    const Chronicle trend = estimate_trend(vol, cfg.estimator);
    const Chronicle slope = estimate_derivative(vol, cfg.estimator);
    const double ahead = static_cast<double>(horizon) * vol.step();
    std::vector<Sample> out(vol.size());
    for (std::size_t i = 0; i < vol.size(); ++i) {
        if (trend[i].has_value() && slope[i].has_value()) {
            out[i] = *trend[i] + ahead * *slope[i];
        }
    }
    return vol.with_values(std::move(out));
}

}  // namespace chronicle::stats
