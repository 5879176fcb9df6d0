#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "chronicle/io.hpp"
#include "chronicle/series.hpp"

namespace fs = std::filesystem;
namespace io = chronicle::io;
using chronicle::Chronicle;
using chronicle::Sample;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "chronicle_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    const fs::path out = scratch_dir() / "stdout.txt";
    const fs::path err = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string("\"") + CHRONICLE_CLI_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("the CLI refuses to run without a subcommand and honors --help") {
    CHECK(run_cli("").code != 0);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("frobnicate").code != 0);
}

TEST_CASE("synth writes deterministic business-day fixtures") {
    const fs::path a = scratch_dir() / "walk_a.csv";
    const fs::path b = scratch_dir() / "walk_b.csv";
    const fs::path c = scratch_dir() / "walk_c.csv";
    REQUIRE(run_cli("synth --kind walk --n 120 --seed 5 --output " + quoted(a)).code == 0);
    REQUIRE(run_cli("synth --kind walk --n 120 --seed 5 --output " + quoted(b)).code == 0);
    REQUIRE(run_cli("synth --kind walk --n 120 --seed 6 --output " + quoted(c)).code == 0);

    CHECK(slurp(a) == slurp(b));  // same seed, same bytes
    CHECK(slurp(a) != slurp(c));

    io::LoadResult r = io::load_csv(a);
    CHECK(r.series.size() == 120);
    CHECK(r.filled == 0);  // consecutive business days leave nothing to fill
    CHECK(io::format_date(r.dates.front()) == "2015-01-05");
    for (const io::Date& d : r.dates) CHECK(io::is_business_day(d));
    for (std::size_t i = 0; i < r.series.size(); ++i) CHECK(*r.series[i] > 0.0);
}

TEST_CASE("trend subcommand reproduces a ramp behind the configured delay") {
    const fs::path input = scratch_dir() / "ramp.csv";
    const fs::path output = scratch_dir() / "ramp_trend.csv";
    REQUIRE(run_cli("synth --kind ramp --n 200 --slope 0.25 --offset 10 --output " +
                    quoted(input))
                .code == 0);
    REQUIRE(run_cli("trend " + quoted(input) +
                    " --window 50 --degree 1 --delay 25 --output " + quoted(output))
                .code == 0);

    io::PanelLoadResult table = io::load_panel_csv(output);
    REQUIRE(table.series.size() == 3);
    CHECK(table.series[0].label() == "price");
    CHECK(table.series[1].label() == "moving_average");
    CHECK(table.series[2].label() == "trend");

    const Chronicle& trend = table.series[2];
    const Chronicle& ma = table.series[1];
    for (std::size_t i = 0; i < trend.size(); ++i) {
        if (i < 49) {
            CHECK(!trend[i].has_value());
            CHECK(!ma[i].has_value());
        } else {
            const double fi = static_cast<double>(i);
            CHECK(*trend[i] == doctest::Approx(10.0 + 0.25 * (fi - 25.0)).epsilon(1e-9));
            CHECK(*ma[i] == doctest::Approx(10.0 + 0.25 * (fi - 24.5)).epsilon(1e-9));
        }
    }
}

TEST_CASE("analytics output is deterministic across runs") {
    const fs::path input = scratch_dir() / "gold.csv";
    const fs::path out1 = scratch_dir() / "gold_trend1.csv";
    const fs::path out2 = scratch_dir() / "gold_trend2.csv";
    REQUIRE(run_cli("synth --kind gold --n 300 --seed 9 --output " + quoted(input)).code == 0);
    REQUIRE(run_cli("trend " + quoted(input) + " --window 60 --output " + quoted(out1)).code == 0);
    REQUIRE(run_cli("trend " + quoted(input) + " --window 60 --output " + quoted(out2)).code == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(!slurp(out1).empty());
}

TEST_CASE("fluctuations on a ramp vanish while the undelayed residual does not") {
    const fs::path input = scratch_dir() / "ramp2.csv";
    const fs::path output = scratch_dir() / "ramp_fluct.csv";
    REQUIRE(run_cli("synth --kind ramp --n 150 --slope 0.5 --offset 20 --output " +
                    quoted(input))
                .code == 0);
    REQUIRE(run_cli("fluctuations " + quoted(input) +
                    " --window 40 --degree 1 --delay 20 --output " + quoted(output))
                .code == 0);

    io::PanelLoadResult table = io::load_panel_csv(output);
    const Chronicle& residual = table.series[1];  // price minus plain moving average
    const Chronicle& fluct = table.series[2];
    for (std::size_t i = 39; i < fluct.size(); ++i) {
        CHECK(std::abs(*fluct[i]) <= 1e-9);
        CHECK(*residual[i] == doctest::Approx(0.5 * 19.5).epsilon(1e-9));  // slope*(N-1)/2
    }
}

TEST_CASE("derivative subcommand reads the ramp slope on both estimators") {
    const fs::path input = scratch_dir() / "ramp3.csv";
    const fs::path output = scratch_dir() / "ramp_deriv.csv";
    REQUIRE(run_cli("synth --kind ramp --n 150 --slope -0.125 --offset 90 --output " +
                    quoted(input))
                .code == 0);
    REQUIRE(run_cli("derivative " + quoted(input) +
                    " --window 30 --degree 1 --baseline-window 24 --output " + quoted(output))
                .code == 0);

    io::PanelLoadResult table = io::load_panel_csv(output);
    const Chronicle& classical = table.series[1];
    const Chronicle& slope = table.series[2];
    for (std::size_t i = 0; i < slope.size(); ++i) {
        if (i >= 29) CHECK(*slope[i] == doctest::Approx(-0.125).epsilon(1e-9));
        if (i >= 24) CHECK(*classical[i] == doctest::Approx(-0.125).epsilon(1e-9));
        if (i < 24) CHECK(!classical[i].has_value());
    }
}

TEST_CASE("volatility subcommand on a constant-rate series") {
    const fs::path input = scratch_dir() / "expo.csv";
    const fs::path output = scratch_dir() / "expo_vol.csv";
    REQUIRE(run_cli("synth --kind exponential --n 300 --rate 5e-4 --output " + quoted(input))
                .code == 0);
    REQUIRE(run_cli("volatility " + quoted(input) +
                    " --window 40 --degree 1 --delay 20 --delta-t 5 --horizon 10 --output " +
                    quoted(output))
                .code == 0);

    io::PanelLoadResult table = io::load_panel_csv(output);
    REQUIRE(table.series.size() == 6);
    const Chronicle& ret = table.series[2];
    const Chronicle& mean = table.series[3];
    const Chronicle& vol = table.series[4];
    const Chronicle& prediction = table.series[5];

    for (std::size_t i = 5; i < ret.size(); ++i)
        CHECK(*ret[i] == doctest::Approx(5e-4).epsilon(1e-9));
    for (std::size_t i = 44; i < vol.size(); ++i) {
        CHECK(*mean[i] == doctest::Approx(5e-4).epsilon(1e-9));
        CHECK(std::abs(*vol[i]) <= 1e-9);  // constant returns carry no volatility
    }
    CHECK(!prediction[82].has_value());
    for (std::size_t i = 83; i < prediction.size(); ++i) CHECK(std::abs(*prediction[i]) <= 1e-9);
}

TEST_CASE("volatility JSON output carries nulls through the warm-up") {
    const fs::path input = scratch_dir() / "expo2.csv";
    const fs::path output = scratch_dir() / "expo_vol.json";
    REQUIRE(run_cli("synth --kind exponential --n 120 --output " + quoted(input)).code == 0);
    REQUIRE(run_cli("volatility " + quoted(input) +
                    " --window 40 --degree 1 --format json --output " + quoted(output))
                .code == 0);

    nlohmann::json j = nlohmann::json::parse(slurp(output));
    REQUIRE(j.contains("volatility"));
    CHECK(j["date"].size() == 120);
    CHECK(j["volatility"][0].is_null());
    CHECK(j["volatility"][119].is_number());
}

TEST_CASE("backtest subcommand writes the equity table and a metrics sidecar") {
    const fs::path input = scratch_dir() / "panel.csv";
    const fs::path output = scratch_dir() / "bt.csv";
    const fs::path metrics = scratch_dir() / "bt_metrics.json";
    REQUIRE(run_cli("synth --kind dominance --n 400 --strong-drift 3e-3 --weak-drift -1e-3 "
                    "--sigma 0.002 --seed 47 --output " +
                    quoted(input))
                .code == 0);
    REQUIRE(run_cli("backtest " + quoted(input) +
                    " --window 40 --degree 0 --delay 20 --sharpe-window 60 --rebalance-every 10 "
                    "--capital 500000 --output " +
                    quoted(output))
                .code == 0);

    // The CSV has one row per panel day plus a header naming every leg.
    std::istringstream lines(slurp(output));
    std::string header;
    REQUIRE(std::getline(lines, header));
    CHECK(header == "date,equity,baseline_equity,units_strong0,units_weak0");
    std::size_t rows = 0;
    std::string row;
    std::string first_row;
    while (std::getline(lines, row)) {
        if (rows == 0) first_row = row;
        ++rows;
    }
    CHECK(rows == 400);
    CHECK(first_row.substr(0, 11) == "2015-01-05,");

    nlohmann::json m = nlohmann::json::parse(slurp(metrics));
    CHECK(m["initial_capital"].get<double>() == 500000.0);
    CHECK(m["rebalances"]["count"].get<int>() >= 1);
    CHECK(m["metrics"].contains("annualized_sharpe"));
    CHECK(m["baseline"].contains("annualized_sharpe"));
}

TEST_CASE("backtest JSON output embeds the series block") {
    const fs::path input = scratch_dir() / "panel2.csv";
    const fs::path output = scratch_dir() / "bt.json";
    REQUIRE(run_cli("synth --kind dominance --n 300 --sigma 0.004 --seed 11 --output " +
                    quoted(input))
                .code == 0);
    REQUIRE(run_cli("backtest " + quoted(input) +
                    " --window 40 --degree 0 --delay 20 --sharpe-window 60 --rebalance-every 10 "
                    "--format json --output " +
                    quoted(output))
                .code == 0);

    nlohmann::json j = nlohmann::json::parse(slurp(output));
    REQUIRE(j.contains("series"));
    CHECK(j["series"]["equity"].size() == 300);
    CHECK(j["series"]["baseline_equity"].size() == 300);
    CHECK(j["series"].contains("units_strong0"));
    CHECK(j["series"].contains("units_weak0"));
    CHECK(j["series"]["date"][0].get<std::string>() == "2015-01-05");
}

TEST_CASE("failures surface as exit code 2 with a message") {
    const CliResult missing =
        run_cli("trend " + quoted(scratch_dir() / "no_such.csv") + " --output " +
                quoted(scratch_dir() / "x.csv"));
    CHECK(missing.code == 2);
    CHECK(missing.err.find("error:") != std::string::npos);

    // A hole wider than max_gap is a data-quality failure, not a crash.
    const fs::path gappy = scratch_dir() / "gappy.csv";
    {
        std::ofstream f(gappy, std::ios::binary);
        f << "date,price\n2024-01-08,100\n2024-03-08,110\n";
    }
    const CliResult gap =
        run_cli("trend " + quoted(gappy) + " --window 1 --degree 0 --output " +
                quoted(scratch_dir() / "y.csv"));
    CHECK(gap.code == 2);
    CHECK(gap.err.find("gap of") != std::string::npos);

    const fs::path input = scratch_dir() / "tiny.csv";
    REQUIRE(run_cli("synth --kind ramp --n 50 --output " + quoted(input)).code == 0);
    const CliResult bad_degree =
        run_cli("trend " + quoted(input) + " --degree 7 --output " +
                quoted(scratch_dir() / "z.csv"));
    CHECK(bad_degree.code == 2);
    CHECK(bad_degree.err.find("degree") != std::string::npos);

    const CliResult bad_kind = run_cli("synth --kind fractal --output " +
                                       quoted(scratch_dir() / "w.csv"));
    CHECK(bad_kind.code == 2);

    const CliResult bad_format =
        run_cli("trend " + quoted(input) + " --output " + quoted(scratch_dir() / "v.csv") +
                " --format xml");
    CHECK(bad_format.code != 0);
    CHECK(bad_format.code != 2);  // argument validation fails before the library runs
}
