// Command-line front end: one subcommand per analysis, plot-ready CSV/JSON out.
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronicle/errors.hpp"
#include "chronicle/estimators.hpp"
#include "chronicle/io.hpp"
#include "chronicle/panel.hpp"
#include "chronicle/portfolio.hpp"
#include "chronicle/series.hpp"
#include "chronicle/statistics.hpp"
#include "chronicle/synthetic.hpp"

namespace {

using namespace chronicle;

struct EstimatorFlags {
    int window = 100;
    int degree = 1;
    int delay = -1;  // negative: use the mid-window default
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags& flags) {
    cmd->add_option("--window", flags.window, "Sliding window length in samples")
        ->capture_default_str();
    cmd->add_option("--degree", flags.degree, "Local polynomial degree (0, 1 or 2)")
        ->capture_default_str();
    cmd->add_option("--delay", flags.delay,
                    "Evaluation delay in samples (default: half the window)");
}

estimators::EstimatorConfig build_config(const EstimatorFlags& flags, double step) {
    const int delay = flags.delay >= 0 ? flags.delay : estimators::default_delay(flags.window);
    return estimators::make_config(flags.window, flags.degree, delay, step);
}

struct InputFlags {
    std::string path;
    std::string column;  // empty: first value column
    int max_gap = 10;
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
    cmd->add_option("input", flags.path, "CSV file with a date column")->required();
    cmd->add_option("--column", flags.column, "Value column name (default: first non-date)");
    cmd->add_option("--max-gap", flags.max_gap, "Widest forward-fillable business-day gap")
        ->capture_default_str();
}

struct OutputFlags {
    std::string path;
    std::string format = "csv";
};

void add_output_flags(CLI::App* cmd, OutputFlags& flags) {
    cmd->add_option("--output", flags.path, "Output file path")->required();
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void write_table(const io::Table& table, const OutputFlags& out) {
    if (out.format == "json")
        io::write_table_json(out.path, table);
    else
        io::write_table_csv(out.path, table);
}

io::LoadResult load_series(const InputFlags& in) {
    io::LoadOptions options;
    options.value_column = in.column;
    options.max_gap = in.max_gap;
    return io::load_csv(in.path, options);
}

void run_trend(const InputFlags& in, const EstimatorFlags& est, const OutputFlags& out) {
    io::LoadResult loaded = load_series(in);
    const auto config = build_config(est, loaded.series.step());
    Chronicle trend = estimators::estimate_trend(loaded.series, config);
    Chronicle average = estimators::moving_average(loaded.series, est.window);

    io::Table table;
    table.time = io::time_labels(loaded.series, &loaded.dates);
    table.headers = {"price", "moving_average", "trend"};
    table.columns = {loaded.series.values(), average.values(), trend.values()};
    write_table(table, out);
}

void run_derivative(const InputFlags& in, const EstimatorFlags& est, int baseline_window,
                    const OutputFlags& out) {
    io::LoadResult loaded = load_series(in);
    EstimatorFlags est_d = est;
    if (est_d.degree < 1) est_d.degree = 1;  // a slope needs at least a line
    const auto config = build_config(est_d, loaded.series.step());
    Chronicle slope = estimators::estimate_derivative(loaded.series, config);
    Chronicle baseline = estimators::classical_derivative(loaded.series, baseline_window);

    io::Table table;
    table.time = io::time_labels(loaded.series, &loaded.dates);
    table.headers = {"price", "classical_derivative", "derivative"};
    table.columns = {loaded.series.values(), baseline.values(), slope.values()};
    write_table(table, out);
}

void run_fluctuations(const InputFlags& in, const EstimatorFlags& est, const OutputFlags& out) {
    io::LoadResult loaded = load_series(in);
    const auto config = build_config(est, loaded.series.step());
    estimators::Decomposition parts = estimators::decompose(loaded.series, config);
    Chronicle average = estimators::moving_average(loaded.series, est.window);
    Chronicle baseline_residual =
        zip_samples(loaded.series, average, [](double x, double m) { return x - m; });

    io::Table table;
    table.time = io::time_labels(loaded.series, &loaded.dates);
    table.headers = {"price", "baseline_residual", "fluctuation"};
    table.columns = {loaded.series.values(), baseline_residual.values(),
                     parts.fluctuation.values()};
    write_table(table, out);
}

void run_volatility(const InputFlags& in, const EstimatorFlags& est, int delta_t, int horizon,
                    const OutputFlags& out) {
    io::LoadResult loaded = load_series(in);
    const auto config = build_config(est, loaded.series.step());
    stats::MomentConfig moments{config};

    stats::ReturnSeries returns = stats::log_return(loaded.series, delta_t);
    Chronicle mean = stats::mean_return(loaded.series, delta_t, moments);
    Chronicle vol = stats::asset_volatility(loaded.series, delta_t, moments);
    Chronicle prediction = stats::predict_volatility(vol, horizon, moments);

    io::Table table;
    table.time = io::time_labels(loaded.series, &loaded.dates);
    table.headers = {"price",       "return_raw", "return",
                     "mean_return", "volatility", "volatility_prediction"};
    table.columns = {loaded.series.values(), returns.raw.values(), returns.normalized.values(),
                     mean.values(),          vol.values(),         prediction.values()};
    write_table(table, out);
}

// Date labels for the aligned panel; alignment may trim leading grid rows.
std::vector<std::string> panel_labels(const AlignedPanel& panel, double loaded_start,
                                      const std::vector<io::Date>& dates) {
    const auto offset =
        static_cast<std::size_t>(std::llround((panel.start - loaded_start) / panel.step));
    std::vector<std::string> labels(panel.length);
    for (std::size_t i = 0; i < panel.length; ++i) {
        const std::size_t row = offset + i;
        labels[i] = row < dates.size() ? io::format_date(dates[row])
                                       : io::format_sample(panel.time_at(i));
    }
    return labels;
}

void run_backtest(const InputFlags& in, const EstimatorFlags& est,
                  const portfolio::RebalancePolicy& policy_flags, double capital,
                  const OutputFlags& out) {
    io::PanelLoadResult loaded = io::load_panel_csv(in.path, in.max_gap);
    AlignedPanel panel = align(loaded.series);

    portfolio::RebalancePolicy policy = policy_flags;
    policy.moment_cfg.estimator = build_config(est, panel.step);
    portfolio::BacktestReport report = portfolio::run_backtest(panel, policy, capital);

    const double loaded_start = loaded.series.empty() ? panel.start : loaded.series[0].start();
    std::vector<std::string> labels = panel_labels(panel, loaded_start, loaded.dates);

    if (out.format == "json") {
        nlohmann::ordered_json j = portfolio::report_to_json(report);
        nlohmann::ordered_json series;
        series["date"] = labels;
        auto values_of = [](const Chronicle& c) {
            std::vector<double> v(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) v[i] = *c[i];
            return v;
        };
        series["equity"] = values_of(report.equity);
        series["baseline_equity"] = values_of(report.baseline_equity);
        for (std::size_t c = 0; c < report.leg_labels.size(); ++c) {
            std::vector<double> units(report.weights_history.size());
            for (std::size_t t = 0; t < units.size(); ++t)
                units[t] = report.weights_history[t][c];
            series["units_" + report.leg_labels[c]] = units;
        }
        j["series"] = series;
        std::ofstream file(out.path, std::ios::binary);
        if (!file) throw FormatError("cannot open output file " + out.path);
        file << j.dump(2) << '\n';
        return;
    }

    std::ofstream file(out.path, std::ios::binary);
    if (!file) throw FormatError("cannot open output file " + out.path);
    portfolio::write_report_csv(report, file, &labels);
    file.close();

    std::filesystem::path metrics_path(out.path);
    metrics_path.replace_extension();
    metrics_path += "_metrics.json";
    std::ofstream metrics(metrics_path, std::ios::binary);
    if (!metrics) throw FormatError("cannot open output file " + metrics_path.string());
    metrics << portfolio::report_to_json(report).dump(2) << '\n';
}

struct SynthFlags {
    std::string kind;
    std::size_t n = 1000;
    std::uint64_t seed = 42;
    std::string start_date = "2015-01-05";
    double slope = 0.1;
    double offset = 100.0;
    double level = 100.0;
    double initial = 100.0;
    double rate = 5e-4;
    double base = 100.0;
    double amplitude = 5.0;
    double period = 250.0;
    double noise = 1.0;
    double drift = 5e-4;
    double sigma = 0.01;
    std::size_t strong = 1;
    std::size_t weak = 1;
    double strong_drift = 6e-4;
    double weak_drift = 0.0;
};

void write_synthetic_csv(const std::string& path, const std::vector<std::string>& headers,
                         const std::vector<const Chronicle*>& columns, io::Date start) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw FormatError("cannot open output file " + path);
    file << "date";
    for (const auto& h : headers) file << ',' << h;
    file << '\n';
    const std::size_t rows = columns.front()->size();
    io::Date day = start;
    while (!io::is_business_day(day)) day += std::chrono::days{1};
    for (std::size_t i = 0; i < rows; ++i) {
        file << io::format_date(day);
        for (const Chronicle* c : columns) file << ',' << io::format_sample((*c)[i]);
        file << '\n';
        do day += std::chrono::days{1};
        while (!io::is_business_day(day));
    }
}

void run_synth(const SynthFlags& flags, const std::string& output) {
    const io::Date start = io::parse_date(flags.start_date);
    if (flags.kind == "dominance") {
        AlignedPanel panel = synthetic::dominance_panel(flags.n, flags.strong, flags.weak,
                                                        flags.strong_drift, flags.weak_drift,
                                                        flags.sigma, flags.seed);
        std::vector<Chronicle> columns;
        columns.reserve(panel.columns.size());
        for (std::size_t c = 0; c < panel.columns.size(); ++c)
            columns.push_back(panel.column_series(c));
        std::vector<const Chronicle*> pointers;
        for (const auto& c : columns) pointers.push_back(&c);
        write_synthetic_csv(output, panel.labels, pointers, start);
        return;
    }

    Chronicle series;
    if (flags.kind == "ramp")
        series = synthetic::ramp(flags.n, flags.slope, flags.offset);
    else if (flags.kind == "constant")
        series = synthetic::constant(flags.n, flags.level);
    else if (flags.kind == "exponential")
        series = synthetic::exponential(flags.n, flags.initial, flags.rate);
    else if (flags.kind == "sine")
        series = synthetic::noisy_sine(flags.n, flags.base, flags.amplitude, flags.period,
                                       flags.noise, flags.seed);
    else if (flags.kind == "gold")
        series = synthetic::gold_like(flags.n, flags.initial, flags.seed);
    else if (flags.kind == "walk")
        series = synthetic::random_walk(flags.n, flags.initial, flags.drift, flags.sigma,
                                        flags.seed);
    else
        throw ConfigError("unknown synthetic kind: " + flags.kind);
    write_synthetic_csv(output, {series.label()}, {&series}, start);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-free sliding-window analytics for financial time series"};
    app.require_subcommand(1);

    InputFlags in;
    EstimatorFlags est;
    OutputFlags out;
    int delta_t = 1;
    int horizon = 20;
    int baseline_window = 50;
    double capital = 1'000'000.0;
    portfolio::RebalancePolicy policy;
    SynthFlags synth;

    auto* trend = app.add_subcommand("trend", "Sliding trend estimate vs a moving average");
    add_input_flags(trend, in);
    add_estimator_flags(trend, est);
    add_output_flags(trend, out);
    trend->callback([&] { run_trend(in, est, out); });

    auto* derivative =
        app.add_subcommand("derivative", "Sliding slope estimate vs a smoothed finite difference");
    add_input_flags(derivative, in);
    add_estimator_flags(derivative, est);
    derivative
        ->add_option("--baseline-window", baseline_window,
                     "Moving-average length of the classical baseline")
        ->capture_default_str();
    add_output_flags(derivative, out);
    derivative->callback([&] { run_derivative(in, est, baseline_window, out); });

    auto* fluct =
        app.add_subcommand("fluctuations", "Rapid-fluctuation residual of the trend split");
    add_input_flags(fluct, in);
    add_estimator_flags(fluct, est);
    add_output_flags(fluct, out);
    fluct->callback([&] { run_fluctuations(in, est, out); });

    auto* vol = app.add_subcommand("volatility", "Returns, volatility and its linear prediction");
    add_input_flags(vol, in);
    add_estimator_flags(vol, est);
    vol->add_option("--delta-t", delta_t, "Return horizon in samples")->capture_default_str();
    vol->add_option("--horizon", horizon, "Prediction horizon in samples")
        ->capture_default_str();
    add_output_flags(vol, out);
    vol->callback([&] { run_volatility(in, est, delta_t, horizon, out); });

    auto* backtest =
        app.add_subcommand("backtest", "Gradient-rebalanced portfolio vs a static baseline");
    add_input_flags(backtest, in);
    add_estimator_flags(backtest, est);
    backtest->add_option("--eta", policy.eta, "Turnover fraction per rebalance")
        ->capture_default_str();
    backtest->add_option("--epsilon", policy.epsilon, "Relative perturbation for the partials")
        ->capture_default_str();
    backtest
        ->add_option("--rebalance-every", policy.delta_t,
                     "Samples between rebalances (also the Sharpe horizon)")
        ->capture_default_str();
    backtest->add_option("--grad-tol", policy.grad_tol, "Partial magnitude treated as zero")
        ->capture_default_str();
    backtest
        ->add_option("--sharpe-window", policy.sharpe_window,
                     "Trailing samples behind the Sharpe objective")
        ->capture_default_str();
    backtest->add_option("--capital", capital, "Initial capital")->capture_default_str();
    add_output_flags(backtest, out);
    backtest->callback([&] { run_backtest(in, est, policy, capital, out); });

    auto* synth_cmd = app.add_subcommand("synth", "Write a deterministic synthetic fixture CSV");
    synth_cmd
        ->add_option("--kind", synth.kind,
                     "ramp | constant | exponential | sine | gold | walk | dominance")
        ->required();
    synth_cmd->add_option("--n", synth.n, "Number of rows")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--start-date", synth.start_date, "First calendar date")
        ->capture_default_str();
    synth_cmd->add_option("--slope", synth.slope, "Ramp slope per day")->capture_default_str();
    synth_cmd->add_option("--offset", synth.offset, "Ramp offset")->capture_default_str();
    synth_cmd->add_option("--level", synth.level, "Constant level")->capture_default_str();
    synth_cmd->add_option("--initial", synth.initial, "Initial price")->capture_default_str();
    synth_cmd->add_option("--rate", synth.rate, "Exponential growth rate per day")
        ->capture_default_str();
    synth_cmd->add_option("--base", synth.base, "Sine base level")->capture_default_str();
    synth_cmd->add_option("--amplitude", synth.amplitude, "Sine amplitude")
        ->capture_default_str();
    synth_cmd->add_option("--period", synth.period, "Sine period in days")
        ->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "Additive noise sigma")->capture_default_str();
    synth_cmd->add_option("--drift", synth.drift, "Log drift per day")->capture_default_str();
    synth_cmd->add_option("--sigma", synth.sigma, "Log volatility per day")
        ->capture_default_str();
    synth_cmd->add_option("--strong", synth.strong, "Dominant columns in the panel")
        ->capture_default_str();
    synth_cmd->add_option("--weak", synth.weak, "Weak columns in the panel")
        ->capture_default_str();
    synth_cmd->add_option("--strong-drift", synth.strong_drift, "Dominant log drift per day")
        ->capture_default_str();
    synth_cmd->add_option("--weak-drift", synth.weak_drift, "Weak log drift per day")
        ->capture_default_str();
    std::string synth_output;
    synth_cmd->add_option("--output", synth_output, "Output file path")->required();
    synth_cmd->callback([&] { run_synth(synth, synth_output); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
