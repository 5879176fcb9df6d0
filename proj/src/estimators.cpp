#include "chronicle/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "chronicle/errors.hpp"

namespace chronicle::estimators {

namespace {

// Gaussian elimination with partial pivoting on an m x m system with several
// right-hand sides. m is at most 3 here.
void solve_in_place(std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& rhs) {
    const std::size_t m = a.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (a[pivot][col] == 0.0) {
            throw ConfigError("estimator moment system is singular");
        }
        std::swap(a[col], a[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] -= f * rhs[col][c];
        }
    }
    for (std::size_t r = 0; r < m; ++r) {
        for (auto& v : rhs[r]) v /= a[r][r];
    }
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Exactness check: applied to samples of t^m on a window placed at an arbitrary
// origin, the weights must return the coefficients of t^m expanded about the
// evaluation point, i.e. C(m, j) * t*^(m-j).
void verify_polynomial_exactness(const EstimatorConfig& cfg) {
    const double origin = 3.7;  // arbitrary non-grid-aligned window position
    const double t_eval = origin + (cfg.window - 1 - cfg.eval_delay) * cfg.step;
    for (int m = 0; m <= cfg.degree; ++m) {
        std::vector<double> samples(cfg.window);
        for (int k = 0; k < cfg.window; ++k) {
            samples[k] = std::pow(origin + k * cfg.step, m);
        }
        for (int j = 0; j <= cfg.degree; ++j) {
            double got = 0.0;
            for (int k = 0; k < cfg.window; ++k) got += cfg.weights[j][k] * samples[k];
            const double expect =
                j > m ? 0.0 : static_cast<double>(binomial(m, j)) * std::pow(t_eval, m - j);
            const double scale = std::max(1.0, std::abs(expect));
            if (std::abs(got - expect) > 1e-9 * scale) {
                throw ConfigError("estimator weights fail polynomial exactness for window=" +
                                  std::to_string(cfg.window) + " degree=" +
                                  std::to_string(cfg.degree) + " delay=" +
                                  std::to_string(cfg.eval_delay));
            }
        }
    }
}

// Shared sliding loop: applies one weight row over every complete window.
Chronicle slide(const Chronicle& x, const EstimatorConfig& cfg, int coeff) {
    if (std::abs(x.step() - cfg.step) > 1e-9) {
        throw ConfigError("estimator configured for step " + std::to_string(cfg.step) +
                          " applied to series '" + x.label() + "' with step " +
                          std::to_string(x.step()));
    }
    const std::size_t n = x.size();
    const std::size_t w = static_cast<std::size_t>(cfg.window);
    if (n < w) {
        throw SizeError("series '" + x.label() + "' has " + std::to_string(n) +
                        " samples, estimator window needs " + std::to_string(w));
    }
    const auto& weights = cfg.weights[static_cast<std::size_t>(coeff)];
    std::vector<Sample> out(n);
    for (std::size_t i = w - 1; i < n; ++i) {
        const std::size_t begin = i + 1 - w;
        double acc = 0.0;
        bool complete = true;
        for (std::size_t k = 0; k < w; ++k) {
            const Sample& v = x[begin + k];
            if (!v.has_value()) {
                complete = false;
                break;
            }
            acc += weights[k] * *v;
        }
        if (complete) out[i] = acc;
    }
    return x.with_values(std::move(out));
}

}  // namespace

EstimatorConfig make_config(int window, int degree, int eval_delay, double step) {
    if (degree < 0 || degree > 2) {
        throw ConfigError("estimator degree must be 0, 1 or 2, got " + std::to_string(degree));
    }
    if (window < degree + 2) {
        throw ConfigError("estimator window must be >= degree + 2, got window=" +
                          std::to_string(window) + " degree=" + std::to_string(degree));
    }
    if (eval_delay < 0 || eval_delay >= window) {
        throw ConfigError("eval_delay must lie in [0, window), got " +
                          std::to_string(eval_delay));
    }
    if (!(step > 0.0)) {
        throw ConfigError("estimator step must be > 0");
    }

    EstimatorConfig cfg;
    cfg.window = window;
    cfg.degree = degree;
    cfg.eval_delay = eval_delay;
    cfg.step = step;

    // Sample k sits at u_k days from the evaluation point t* = end - delay*step.
    // The basis is rescaled to [-1, 1] before solving; powers of u up to 2*degree
    // would otherwise make the moment matrix needlessly ill-conditioned.
    const int m = degree + 1;
    std::vector<double> u(static_cast<std::size_t>(window));
    double h = 0.0;
    for (int k = 0; k < window; ++k) {
        u[static_cast<std::size_t>(k)] = (k - (window - 1 - eval_delay)) * step;
        h = std::max(h, std::abs(u[static_cast<std::size_t>(k)]));
    }
    if (h == 0.0) h = 1.0;  // window == 1 cannot happen (window >= 2), kept for safety

    std::vector<std::vector<double>> moments(m, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> rhs(m, std::vector<double>(static_cast<std::size_t>(window)));
    for (int k = 0; k < window; ++k) {
        const double v = u[static_cast<std::size_t>(k)] / h;
        double p = 1.0;
        std::vector<double> pow_v(static_cast<std::size_t>(2 * degree + 1));
        for (int j = 0; j <= 2 * degree; ++j) {
            pow_v[static_cast<std::size_t>(j)] = p;
            p *= v;
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                moments[a][b] += pow_v[static_cast<std::size_t>(a + b)];
            }
            rhs[a][static_cast<std::size_t>(k)] = pow_v[static_cast<std::size_t>(a)];
        }
    }
    solve_in_place(moments, rhs);

    cfg.weights.resize(static_cast<std::size_t>(m));
    double unscale = 1.0;
    for (int j = 0; j < m; ++j) {
        cfg.weights[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(window));
        for (int k = 0; k < window; ++k) {
            cfg.weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                rhs[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] / unscale;
        }
        unscale *= h;
    }

    verify_polynomial_exactness(cfg);
    return cfg;
}

LocalFit fit_window(std::span<const double> samples, const EstimatorConfig& config,
                    std::size_t window_end_index) {
    if (samples.size() != static_cast<std::size_t>(config.window)) {
        throw SizeError("fit_window: got " + std::to_string(samples.size()) +
                        " samples, config window is " + std::to_string(config.window));
    }
    LocalFit fit;
    fit.window_end_index = window_end_index;
    fit.coefficients.resize(config.weights.size());
    for (std::size_t j = 0; j < config.weights.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            acc += config.weights[j][k] * samples[k];
        }
        fit.coefficients[j] = acc;
    }
    return fit;
}

Chronicle estimate_trend(const Chronicle& x, const EstimatorConfig& config) {
    return slide(x, config, 0);
}

Chronicle estimate_derivative(const Chronicle& x, const EstimatorConfig& config) {
    if (config.degree < 1) {
        throw ConfigError("estimate_derivative needs degree >= 1, config has degree 0");
    }
    return slide(x, config, 1);
}

Chronicle moving_average(const Chronicle& x, int window) {
    if (window < 1) {
        throw ConfigError("moving_average window must be >= 1, got " + std::to_string(window));
    }
    const std::size_t n = x.size();
    const std::size_t w = static_cast<std::size_t>(window);
    if (n < w) {
        throw SizeError("series '" + x.label() + "' has " + std::to_string(n) +
                        " samples, moving average window needs " + std::to_string(w));
    }
    std::vector<Sample> out(n);
    for (std::size_t i = w - 1; i < n; ++i) {
        double acc = 0.0;
        bool complete = true;
        for (std::size_t k = i + 1 - w; k <= i; ++k) {
            if (!x[k].has_value()) {
                complete = false;
                break;
            }
            acc += *x[k];
        }
        if (complete) out[i] = acc / static_cast<double>(w);
    }
    return x.with_values(std::move(out));
}

Chronicle classical_derivative(const Chronicle& x, int ma_window) {
    const Chronicle ma = moving_average(x, ma_window);
    std::vector<Sample> out(ma.size());
    for (std::size_t i = 1; i < ma.size(); ++i) {
        if (ma[i].has_value() && ma[i - 1].has_value()) {
            out[i] = (*ma[i] - *ma[i - 1]) / x.step();
        }
    }
    return x.with_values(std::move(out));
}

Decomposition decompose(const Chronicle& x, const EstimatorConfig& config) {
    Decomposition d{estimate_trend(x, config), Chronicle{}, config};
    const std::size_t delay = static_cast<std::size_t>(config.eval_delay);
    std::vector<Sample> fluct(x.size());
    for (std::size_t i = delay; i < x.size(); ++i) {
        const Sample& trend = d.trend[i];
        const Sample& input = x[i - delay];
        if (trend.has_value() && input.has_value()) {
            fluct[i] = *input - *trend;  // exact: trend + fluctuation == shifted input
        }
    }
    d.fluctuation = x.with_values(std::move(fluct));
    return d;
}

}  // namespace chronicle::estimators
