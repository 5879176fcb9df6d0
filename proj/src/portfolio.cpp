#include "chronicle/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "chronicle/errors.hpp"
#include "chronicle/io.hpp"

namespace chronicle::portfolio {

namespace {

void check_state(const PortfolioState& state) {
    const std::size_t n = state.legs.size();
    if (n == 0) throw SizeError("portfolio state has no legs");
    if (state.holdings.size() != n || state.prices.size() != n)
        throw SizeError("portfolio state arrays disagree: " + std::to_string(n) + " legs, " +
                        std::to_string(state.holdings.size()) + " holdings, " +
                        std::to_string(state.prices.size()) + " prices");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.prices[i] > 0.0))
            throw DomainError("leg " + std::to_string(i) + " has nonpositive price", i);
        if (state.holdings[i] < 0.0)
            throw DomainError("leg " + std::to_string(i) + " has negative holding", i);
    }
}

}  // namespace

double portfolio_value(const PortfolioState& state) {
    check_state(state);
    double value = 0.0;
    for (std::size_t i = 0; i < state.legs.size(); ++i)
        value += state.holdings[i] * state.prices[i];
    return value;
}

void RebalancePolicy::validate() const {
    if (delta_t < 1) throw ConfigError("rebalance interval must be at least 1 sample");
    if (eta < 0.0) throw ConfigError("eta must be nonnegative");
    if (!(epsilon > 0.0)) throw ConfigError("perturbation epsilon must be positive");
    if (grad_tol < 0.0) throw ConfigError("gradient tolerance must be nonnegative");
    if (moment_cfg.estimator.weights.empty())
        throw ConfigError("moment estimator configuration was not built (empty weights)");
    // The trailing window must be long enough for the Sharpe ratio to be defined
    // at its newest sample: delta_t samples of return warm-up plus a full
    // estimator window on top.
    const int needed = delta_t + moment_cfg.estimator.window;
    if (sharpe_window < needed)
        throw ConfigError("sharpe_window " + std::to_string(sharpe_window) +
                          " is shorter than the warm-up of " + std::to_string(needed) +
                          " samples (rebalance interval + estimator window)");
}

std::optional<double> sharpe_objective(std::span<const double> weights, const AlignedPanel& panel,
                                       std::size_t t, const RebalancePolicy& policy) {
    if (weights.size() != panel.columns.size())
        throw SizeError("got " + std::to_string(weights.size()) + " weights for " +
                        std::to_string(panel.columns.size()) + " panel columns");
    if (t >= panel.length) throw SizeError("objective time index beyond the panel");
    const std::size_t window = static_cast<std::size_t>(policy.sharpe_window);
    if (t < window)
        throw SizeError("objective needs time index >= sharpe_window (" +
                        std::to_string(window) + "), got " + std::to_string(t));
    bool any_positive = false;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (weights[c] < 0.0) throw DomainError("weight " + std::to_string(c) + " is negative", c);
        if (weights[c] > 0.0) any_positive = true;
    }
    if (!any_positive) throw DomainError("all weights are zero");

    const std::size_t begin = t + 1 - window;
    std::vector<Sample> values(window);
    for (std::size_t j = 0; j < window; ++j) {
        double v = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c)
            v += weights[c] * panel.columns[c][begin + j];
        if (!(v > 0.0)) return std::nullopt;  // log return undefined at this point
        values[j] = v;
    }
    Chronicle combined("portfolio", panel.time_at(begin), panel.step, std::move(values));
    Chronicle ratio =
        stats::sharpe_ratio(combined, policy.delta_t, policy.moment_cfg, policy.eps_vol);
    const Sample& last = ratio[ratio.size() - 1];
    if (!last.has_value()) return std::nullopt;
    return *last;
}

std::optional<SharpePartials> sharpe_partials(const PortfolioState& state,
                                              const AlignedPanel& panel,
                                              const RebalancePolicy& policy) {
    check_state(state);
    const double value = portfolio_value(state);
    if (!(value > 0.0)) throw DomainError("portfolio value must be positive");

    const std::size_t n = state.legs.size();
    SharpePartials result;
    result.gradient.assign(n, 0.0);
    result.one_sided.assign(n, false);

    std::vector<double> probe(state.holdings.begin(), state.holdings.end());
    std::optional<double> base;  // evaluated lazily, only one-sided legs need it
    for (std::size_t i = 0; i < n; ++i) {
        const double shift = policy.epsilon * value / state.prices[i];
        const double x0 = probe[i];

        probe[i] = x0 + shift;
        auto up = sharpe_objective(probe, panel, state.time_index, policy);
        if (!up) return std::nullopt;

        // The difference quotient is taken per unit of *value fraction* moved
        // into the leg (the per-unit partial times value/price). That keeps the
        // gradient, grad_tol and the trade sizes eta*V*(g-lambda)/P invariant
        // under rescaling of capital or of any price.
        if (x0 - shift >= 0.0) {
            probe[i] = x0 - shift;
            auto down = sharpe_objective(probe, panel, state.time_index, policy);
            if (!down) return std::nullopt;
            result.gradient[i] = (*up - *down) / (2.0 * policy.epsilon);
        } else {
            // Shorting the leg to probe downhill is not allowed; fall back to a
            // forward difference from the current point.
            if (!base) {
                probe[i] = x0;
                base = sharpe_objective(probe, panel, state.time_index, policy);
                if (!base) return std::nullopt;
            }
            result.gradient[i] = (*up - *base) / policy.epsilon;
            result.one_sided[i] = true;
        }
        probe[i] = x0;
    }
    return result;
}

RebalanceOutcome rebalance_step(const PortfolioState& state, std::span<const double> gradient,
                                const RebalancePolicy& policy) {
    policy.validate();
    check_state(state);
    const std::size_t n = state.legs.size();
    if (gradient.size() != n)
        throw SizeError("got " + std::to_string(gradient.size()) + " partials for " +
                        std::to_string(n) + " legs");
    const double value = portfolio_value(state);
    if (!(value > 0.0)) throw DomainError("portfolio value must be positive");

    RebalanceOutcome out;
    out.state = state;
    out.dx.assign(n, 0.0);
    out.actions.assign(n, LegAction::Frozen);

    // Legs whose partial is within tolerance sit out; they rejoin as receivers
    // when every responsive leg points downhill, so sold value has a home.
    std::vector<char> trading(n, 0);
    std::size_t responsive = 0;
    bool all_downhill = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(gradient[i]) >= policy.grad_tol) {
            trading[i] = 1;
            ++responsive;
            if (gradient[i] > 0.0) all_downhill = false;
        }
    }
    if (responsive == 0) {
        out.no_op = true;
        out.diagnostic = "all partials within tolerance";
        return out;
    }
    if (all_downhill) std::fill(trading.begin(), trading.end(), char{1});

    // Trades are proportional to the centered partial, dx_i = eta V (g_i - lambda) / P_i,
    // with lambda chosen so the trades self-finance. A leg whose proposed trade
    // would take its holding negative is sold out entirely instead, and lambda is
    // recomputed so the value it releases flows into the remaining legs.
    std::vector<char> clipped(n, 0);
    double released = 0.0;
    double lambda = 0.0;
    for (;;) {
        std::size_t live = 0;
        double gradient_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (trading[i] && !clipped[i]) {
                ++live;
                gradient_sum += gradient[i];
            }
        }
        if (live == 0) {
            out.dx.assign(n, 0.0);
            out.actions.assign(n, LegAction::Frozen);
            out.no_op = true;
            out.diagnostic = "every trading leg would be sold out; step abandoned";
            return out;
        }
        lambda = gradient_sum / static_cast<double>(live);
        if (policy.eta > 0.0)
            lambda -= released / (policy.eta * value * static_cast<double>(live));

        bool new_clip = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!trading[i] || clipped[i]) continue;
            out.dx[i] = policy.eta * value * (gradient[i] - lambda) / state.prices[i];
            if (state.holdings[i] + out.dx[i] < 0.0) {
                clipped[i] = 1;
                out.dx[i] = -state.holdings[i];
                released += state.prices[i] * state.holdings[i];
                new_clip = true;
            }
        }
        if (!new_clip) break;
    }
    out.lambda = lambda;

    bool any_trade = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (clipped[i]) {
            out.actions[i] = LegAction::ClippedToZero;
            out.state.holdings[i] = 0.0;
        } else if (trading[i]) {
            out.actions[i] = LegAction::Traded;
            out.state.holdings[i] = state.holdings[i] + out.dx[i];
        }
        if (out.dx[i] != 0.0) any_trade = true;
    }
    if (!any_trade) {
        out.no_op = true;
        out.diagnostic = "no trades proposed";
    }
    return out;
}

double max_drawdown(const Chronicle& equity) {
    double peak = -std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::size_t present = 0;
    for (std::size_t i = 0; i < equity.size(); ++i) {
        const Sample& s = equity[i];
        if (!s.has_value()) continue;
        if (!(*s > 0.0)) throw DomainError("equity curve must stay positive", i);
        ++present;
        peak = std::max(peak, *s);
        worst = std::max(worst, 1.0 - *s / peak);
    }
    if (present == 0) throw SizeError("equity curve has no present samples");
    return worst;
}

namespace {

std::pair<std::size_t, std::size_t> present_span(const Chronicle& equity) {
    std::size_t first = equity.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < equity.size(); ++i) {
        if (!equity[i].has_value()) continue;
        if (first == equity.size()) first = i;
        last = i;
    }
    if (first >= last) throw SizeError("equity curve needs at least two present samples");
    return {first, last};
}

}  // namespace

double annualized_return(const Chronicle& equity) {
    auto [first, last] = present_span(equity);
    const double v0 = *equity[first];
    const double v1 = *equity[last];
    if (!(v0 > 0.0)) throw DomainError("equity curve must stay positive", first);
    if (!(v1 > 0.0)) throw DomainError("equity curve must stay positive", last);
    const double years =
        static_cast<double>(last - first) * equity.step() / stats::kTradingDaysPerYear;
    return std::pow(v1 / v0, 1.0 / years) - 1.0;
}

double annualized_sharpe(const Chronicle& equity) {
    std::vector<double> returns;
    returns.reserve(equity.size());
    for (std::size_t i = 1; i < equity.size(); ++i) {
        const Sample& prev = equity[i - 1];
        const Sample& cur = equity[i];
        if (!prev.has_value() || !cur.has_value()) continue;
        if (!(*prev > 0.0)) throw DomainError("equity curve must stay positive", i - 1);
        returns.push_back(*cur / *prev - 1.0);
    }
    if (returns.size() < 2)
        throw SizeError("equity curve needs at least two consecutive returns");

    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
    if (sd == 0.0) throw DomainError("equity curve has zero volatility");
    return mean / sd * std::sqrt(stats::kTradingDaysPerYear / equity.step());
}

BacktestReport run_backtest(const AlignedPanel& panel, const RebalancePolicy& policy,
                            double initial_capital) {
    policy.validate();
    if (!(initial_capital > 0.0)) throw ConfigError("initial capital must be positive");
    const std::size_t n = panel.columns.size();
    if (n == 0) throw SizeError("panel has no columns");
    if (panel.length < 2) throw SizeError("panel needs at least two rows to backtest");
    if (policy.eta > 0.0 && panel.length <= static_cast<std::size_t>(policy.sharpe_window))
        throw SizeError("panel of " + std::to_string(panel.length) +
                        " rows is too short for a sharpe_window of " +
                        std::to_string(policy.sharpe_window) + " plus one rebalance");
    if (std::abs(panel.step - policy.moment_cfg.estimator.step) > 1e-9)
        throw ConfigError("estimator step does not match the panel grid");

    BacktestReport report;
    report.leg_labels = panel.labels;
    report.initial_capital = initial_capital;

    // Equal weight by value at the first sample.
    std::vector<double> holdings(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double p0 = panel.columns[c][0];
        if (!(p0 > 0.0)) throw DomainError("column " + panel.labels[c] + " opens nonpositive", c);
        holdings[c] = initial_capital / static_cast<double>(n) / p0;
    }
    const std::vector<double> baseline_holdings = holdings;

    std::vector<Leg> legs(n);
    for (std::size_t c = 0; c < n; ++c) legs[c] = Leg{static_cast<int>(c), 0};

    const std::size_t first_rebalance = static_cast<std::size_t>(policy.sharpe_window);
    const std::size_t interval = static_cast<std::size_t>(policy.delta_t);

    std::vector<Sample> equity(panel.length);
    std::vector<Sample> baseline(panel.length);
    report.weights_history.assign(panel.length, {});

    std::vector<double> prices(n);
    for (std::size_t t = 0; t < panel.length; ++t) {
        for (std::size_t c = 0; c < n; ++c) prices[c] = panel.columns[c][t];

        const bool due = policy.eta > 0.0 && t >= first_rebalance &&
                         (t - first_rebalance) % interval == 0;
        if (due) {
            PortfolioState state{legs, holdings, prices, t};
            auto partials = sharpe_partials(state, panel, policy);
            if (!partials) {
                ++report.skipped_rebalances;
            } else {
                RebalanceOutcome outcome = rebalance_step(state, partials->gradient, policy);
                if (outcome.no_op) {
                    ++report.skipped_rebalances;
                } else {
                    holdings = outcome.state.holdings;
                    report.rebalance_indices.push_back(t);
                }
            }
        }

        double v = 0.0;
        double b = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            v += holdings[c] * prices[c];
            b += baseline_holdings[c] * prices[c];
        }
        equity[t] = v;
        baseline[t] = b;
        report.weights_history[t] = holdings;
    }

    report.equity = Chronicle("equity", panel.start, panel.step, std::move(equity));
    report.baseline_equity =
        Chronicle("baseline_equity", panel.start, panel.step, std::move(baseline));
    report.annualized_return = annualized_return(report.equity);
    report.annualized_sharpe = annualized_sharpe(report.equity);
    report.max_drawdown = max_drawdown(report.equity);
    report.baseline_annualized_return = annualized_return(report.baseline_equity);
    report.baseline_annualized_sharpe = annualized_sharpe(report.baseline_equity);
    report.baseline_max_drawdown = max_drawdown(report.baseline_equity);
    return report;
}

nlohmann::ordered_json report_to_json(const BacktestReport& report) {
    nlohmann::ordered_json j;
    j["initial_capital"] = report.initial_capital;
    j["final_value"] = report.equity.empty() ? nullptr : nlohmann::ordered_json(
                                                             *report.equity[report.equity.size() - 1]);
    j["legs"] = report.leg_labels;
    j["metrics"] = {{"annualized_return", report.annualized_return},
                    {"annualized_sharpe", report.annualized_sharpe},
                    {"max_drawdown", report.max_drawdown}};
    j["baseline"] = {{"annualized_return", report.baseline_annualized_return},
                     {"annualized_sharpe", report.baseline_annualized_sharpe},
                     {"max_drawdown", report.baseline_max_drawdown}};
    j["rebalances"] = {{"count", report.rebalance_indices.size()},
                       {"skipped", report.skipped_rebalances},
                       {"indices", report.rebalance_indices}};
    return j;
}

void write_report_csv(const BacktestReport& report, std::ostream& out,
                      const std::vector<std::string>* time_labels) {
    const std::size_t n = report.equity.size();
    if (time_labels && time_labels->size() != n)
        throw SizeError("got " + std::to_string(time_labels->size()) + " time labels for " +
                        std::to_string(n) + " rows");
    out << "date,equity,baseline_equity";
    for (const auto& label : report.leg_labels) out << ",units_" << label;
    out << '\n';
    for (std::size_t t = 0; t < n; ++t) {
        if (time_labels)
            out << (*time_labels)[t];
        else
            out << io::format_sample(report.equity.time_at(t));
        out << ',' << io::format_sample(report.equity[t]) << ','
            << io::format_sample(report.baseline_equity[t]);
        for (double units : report.weights_history[t]) out << ',' << io::format_sample(units);
        out << '\n';
    }
}

}  // namespace chronicle::portfolio
