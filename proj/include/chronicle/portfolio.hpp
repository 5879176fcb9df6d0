#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronicle/panel.hpp"
#include "chronicle/series.hpp"
#include "chronicle/statistics.hpp"

namespace chronicle::portfolio {

// A portfolio leg: one (asset, strategy) pair. A strategy's equity curve enters
// the panel as its own price column, so legs and columns correspond one to one.
struct Leg {
    int asset = 0;
    int strategy = 0;
};

struct PortfolioState {
    std::vector<Leg> legs;
    std::vector<double> holdings;  // units per leg, all >= 0
    std::vector<double> prices;    // current price per leg
    std::size_t time_index = 0;
};

// P(t) = sum of holdings * prices. Throws SizeError on length mismatch.
double portfolio_value(const PortfolioState& state);

/// Parameters of the gradient rebalancing rules.
struct RebalancePolicy {
    int delta_t = 20;          // rebalance interval and Sharpe horizon, in samples
    double eta = 0.05;         // fraction of portfolio value redeployed per unit gradient
    double epsilon = 0.01;     // relative perturbation for the Sharpe partials
    double grad_tol = 1e-3;    // |partial| below this freezes the leg
    int sharpe_window = 250;   // trailing samples the objective is evaluated over
    stats::MomentConfig moment_cfg;
    double eps_vol = stats::kDefaultVolEpsilon;

    // Throws ConfigError when any parameter is out of range.
    void validate() const;
};

/// Sharpe surface value at one configuration point: the trailing-window Sharpe
/// ratio of the synthetic chronicle sum(weights[k] * panel column k). Returns
/// nullopt where the ratio is undefined (zero-volatility guard).
std::optional<double> sharpe_objective(std::span<const double> weights, const AlignedPanel& panel,
                                       std::size_t t, const RebalancePolicy& policy);

struct SharpePartials {
    // Sensitivity of the objective per unit of portfolio-value fraction moved
    // into each leg: the per-unit partial d(objective)/d(holding) times V/P_i.
    // This normalization is invariant under rescaling capital or prices.
    std::vector<double> gradient;
    std::vector<bool> one_sided;  // true where the holding was too small for a
                                  // central difference and a forward one was used
};

// Symmetric finite differences on the objective, one leg at a time; the
// perturbation moves epsilon of portfolio value in or out of the leg.
std::optional<SharpePartials> sharpe_partials(const PortfolioState& state,
                                              const AlignedPanel& panel,
                                              const RebalancePolicy& policy);

enum class LegAction {
    Frozen,         // |partial| below grad_tol, holding untouched
    Traded,         // received dx = eta * V * (g - lambda) / price
    ClippedToZero,  // proposed trade would have gone negative; holding sold out
};

struct RebalanceOutcome {
    PortfolioState state;
    std::vector<double> dx;
    std::vector<LegAction> actions;
    double lambda = 0.0;  // final gradient offset enforcing sum(P dx) = 0
    bool no_op = false;
    std::string diagnostic;  // set when no_op explains itself
};

/// One application of the rebalancing rules under the no-leverage constraint:
/// frozen legs keep dx = 0 unless every active partial is negative (then they
/// absorb the sold value); active legs trade proportionally to their centered
/// partial; holdings that would go negative are sold out entirely and the
/// remaining trades re-centered until feasible. Portfolio value is conserved.
RebalanceOutcome rebalance_step(const PortfolioState& state, std::span<const double> gradient,
                                const RebalancePolicy& policy);

// Worst peak-to-trough relative loss of a positive equity curve.
double max_drawdown(const Chronicle& equity);

// Annualized metrics of an equity curve (252 trading days per year; simple
// daily returns, sample standard deviation).
double annualized_return(const Chronicle& equity);
double annualized_sharpe(const Chronicle& equity);

struct BacktestReport {
    Chronicle equity;           // dynamic policy
    Chronicle baseline_equity;  // static equal-weight buy-and-hold on the same data
    std::vector<std::string> leg_labels;
    std::vector<std::vector<double>> weights_history;  // [time][leg] holdings
    std::vector<std::size_t> rebalance_indices;        // indices where a trade happened
    std::size_t skipped_rebalances = 0;                // objective undefined or no-op steps
    double initial_capital = 0.0;
    double annualized_return = 0.0;
    double annualized_sharpe = 0.0;
    double max_drawdown = 0.0;
    double baseline_annualized_return = 0.0;
    double baseline_annualized_sharpe = 0.0;
    double baseline_max_drawdown = 0.0;
};

/// Runs the dynamic policy over an aligned panel: equal-weight by value at the
/// start, partials and a rebalance step every delta_t samples once the trailing
/// Sharpe window is available, holdings constant in between. The eta = 0 static
/// baseline runs on identical data.
BacktestReport run_backtest(const AlignedPanel& panel, const RebalancePolicy& policy,
                            double initial_capital);

nlohmann::ordered_json report_to_json(const BacktestReport& report);

// Equity curves and holdings history as a plot-ready CSV table.
void write_report_csv(const BacktestReport& report, std::ostream& out,
                      const std::vector<std::string>* time_labels = nullptr);

}  // namespace chronicle::portfolio
