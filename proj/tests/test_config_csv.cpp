#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <algorithm>
#include <sstream>
#include <vector>

#include "fbl/config.hpp"
#include "fbl/csv.hpp"
#include "fbl/sweep.hpp"

using namespace fbl;

namespace {

// writes content to a temp file and returns the path
std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/fbl_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kReferenceConfig =
    "[channel]\n"
    "n = 500\n"
    "[qos]\n"
    "delta = 500\n"
    "lambda_out = 1e-2\n"
    "lambda = 1\n"
    "[power]\n"
    "zeta = 0.2\n"
    "p_c = 0.2\n"
    "buffer = full\n"
    "[solve]\n"
    "rho_max_db = 10\n"
    "epsilon_t = 1e-3\n";

}  // namespace

TEST_CASE("parse_config: reference constants accepted") {
    const auto path = write_temp("ref.cfg", kReferenceConfig);
    const auto bundle = config::parse_config(path);
    CHECK(bundle.channel.blocklength == 500);
    CHECK(bundle.qos.delay_bound == 500.0);
    CHECK(bundle.qos.delay_outage_prob == 1e-2);
    CHECK(bundle.qos.arrival_rate == 1.0);
    CHECK(bundle.power.zeta == 0.2);
    CHECK(bundle.power.circuit_power == 0.2);
    CHECK(bundle.epsilon_t == 1e-3);
    CHECK(!bundle.qos.theta.has_value());
    std::remove(path.c_str());
}

TEST_CASE("parse_config: named validation and parse errors") {
    // out-of-range value names the violated invariant
    {
        const auto path = write_temp(
            "bad_eps.cfg", std::string(kReferenceConfig) + "epsilon_t = 1.5\n");
        CHECK_THROWS_WITH_AS(config::parse_config(path),
                             doctest::Contains("epsilon_t must lie in (0,1)"),
                             std::invalid_argument);
        std::remove(path.c_str());
    }
    // missing model key is named
    {
        std::string no_zeta = kReferenceConfig;
        no_zeta.erase(no_zeta.find("zeta = 0.2\n"), 11);
        const auto path = write_temp("no_zeta.cfg", no_zeta);
        CHECK_THROWS_WITH_AS(config::parse_config(path),
                             doctest::Contains("missing required key 'zeta'"),
                             std::invalid_argument);
        std::remove(path.c_str());
    }
    // parse errors carry the line number
    {
        const auto path =
            write_temp("bad_line.cfg", "n = 500\nthis is not a key value pair\n");
        CHECK_THROWS_WITH_AS(config::parse_config(path), doctest::Contains("line 2"),
                             std::invalid_argument);
        std::remove(path.c_str());
    }
    // unknown keys are rejected
    {
        const auto path = write_temp(
            "unknown.cfg", std::string(kReferenceConfig) + "bandwidth = 3\n");
        CHECK_THROWS_WITH_AS(config::parse_config(path),
                             doctest::Contains("unknown key 'bandwidth'"),
                             std::invalid_argument);
        std::remove(path.c_str());
    }
    CHECK_THROWS_AS(config::parse_config("/nonexistent/path.cfg"),
                    std::invalid_argument);
}

TEST_CASE("config hash tracks content") {
    auto a = config::default_bundle();
    auto b = config::default_bundle();
    CHECK(a.hash() == b.hash());
    config::apply_key_value(b, "zeta", "0.25");
    CHECK(a.hash() != b.hash());
}

TEST_CASE("csv: 12-significant-digit cells round-trip exactly") {
    csv::CsvTable table;
    table.header = {"x", "y"};
    const double values[] = {1.0 / 3.0, 2.906512e-3, -17.25, 1e-300, 123456789.123};
    for (double v : values)
        table.rows.push_back({csv::format_sig12(v), csv::format_sig12(v * 7.0)});
    table.footer.emplace_back("seed", "42");

    const std::string text = table.to_string();
    std::istringstream in(text);
    const auto parsed = csv::CsvTable::parse(in);
    CHECK(parsed.header == table.header);
    CHECK(parsed.rows == table.rows);
    REQUIRE(!parsed.footer.empty());
    CHECK(parsed.footer.front().first == "seed");
    CHECK(parsed.footer.front().second == "42");

    // reformatting parsed numbers reproduces the same text
    for (const auto& row : parsed.rows)
        for (const auto& cell : row)
            CHECK(csv::format_sig12(std::stod(cell)) == cell);

    // second emission is byte-identical
    CHECK(parsed.to_string() == text);
}

TEST_CASE("csv: ragged rows are rejected, non-finite cells are empty") {
    csv::CsvTable bad;
    bad.header = {"a", "b"};
    bad.rows.push_back({"1"});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(csv::format_sig12(std::nan("")) == "");
}

TEST_CASE("run_sweep: degenerate two-point grid stays well formed") {
    auto spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsSnr,
                                             config::default_bundle());
    spec.grid.count = 2;
    spec.series.resize(1);
    const auto table = sweep::run_sweep(spec);
    CHECK(table.rows.size() == 2);
    CHECK(table.header.size() == 2);
    table.validate();
}

TEST_CASE("run_sweep: per-point failures become empty cells plus a footer note") {
    auto bundle = config::default_bundle();
    bundle.qos.arrival_rate = 3.5;  // above the mean service rate at 10 dB
    auto spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsEpsilon, bundle);
    spec.grid.count = 5;
    // keep one empty-buffer series: every point has an unstable queue
    std::vector<sweep::SeriesSpec> kept;
    for (const auto& s : spec.series)
        if (s.buffer == effcap::BufferMode::EmptyBufferAware &&
            s.model == channel::RateModel::FiniteBlocklength &&
            s.lambda_out == 1e-2)
            kept.push_back(s);
    kept.front().arrival_rate = 3.5;
    spec.series = kept;

    const auto table = sweep::run_sweep(spec);
    table.validate();
    CHECK(table.rows.size() == 5);
    for (const auto& row : table.rows) CHECK(row[1] == "");
    bool noted = false;
    for (const auto& [k, v] : table.footer)
        if (k == "point_errors") noted = (v == "5");
    CHECK(noted);
}

TEST_CASE("run_sweep: identical configs give byte-identical tables") {
    auto spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsSnr,
                                             config::default_bundle());
    spec.grid.count = 7;
    const auto a = sweep::run_sweep(spec).to_string();
    const auto b = sweep::run_sweep(spec).to_string();
    CHECK(a == b);

    // parallel evaluation assembles in deterministic order
    spec.jobs = 4;
    const auto c = sweep::run_sweep(spec).to_string();
    CHECK(c == a);
}

TEST_CASE("cross_check: seeded Monte Carlo columns are reproducible") {
    auto spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsSnr,
                                             config::default_bundle());
    spec.grid = {0.0, 10.0, 3, sweep::GridSpacing::Decibel};
    spec.series.resize(2);  // one closed-form series plus its oracle twin

    const auto a = sweep::cross_check(spec, 20000, 777).to_string();
    const auto b = sweep::cross_check(spec, 20000, 777).to_string();
    CHECK(a == b);
    const auto c = sweep::cross_check(spec, 20000, 778).to_string();
    CHECK(c != a);

    std::istringstream in(a);
    const auto table = csv::CsvTable::parse(in);
    CHECK(table.rows.size() == 3);
    // columns: grid + 5 per closed-form series
    CHECK(table.header.size() == 6);

    CHECK_THROWS_AS(sweep::cross_check(spec, 100, 1), std::invalid_argument);
    auto solver_spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsDelta,
                                                    config::default_bundle());
    CHECK_THROWS_AS(sweep::cross_check(solver_spec, 20000, 1), std::invalid_argument);
}

TEST_CASE("grid spacing") {
    sweep::GridSpec log_grid{1e-5, 1e-1, 5, sweep::GridSpacing::Log10};
    const auto pts = log_grid.points();
    CHECK(pts.size() == 5);
    CHECK(pts.front() == doctest::Approx(1e-5));
    CHECK(pts.back() == doctest::Approx(1e-1));
    CHECK(pts[1] / pts[0] == doctest::Approx(10.0));

    sweep::GridSpec bad{1.0, 0.5, 5, sweep::GridSpacing::Linear};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    sweep::GridSpec one{0.0, 1.0, 1, sweep::GridSpacing::Linear};
    CHECK_THROWS_AS(one.validate(), std::invalid_argument);
}

TEST_CASE("run_sweep: SNR sweep series are unimodal and ordered in theta") {
    auto spec = sweep::SweepSpec::for_figure(sweep::FigureId::EeeVsSnr,
                                             config::default_bundle());
    spec.grid.count = 31;
    const auto table = sweep::run_sweep(spec);

    auto col = [&](const std::string& name) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        REQUIRE(it != table.header.end());
        std::vector<double> v;
        for (const auto& row : table.rows)
            v.push_back(std::stod(row[static_cast<std::size_t>(
                it - table.header.begin())]));
        return v;
    };

    for (const char* method : {"_cf", "_oracle"}) {
        std::vector<std::vector<double>> by_theta;
        for (const char* theta : {"0.001", "0.01", "0.1"})
            by_theta.push_back(
                col(std::string("theta") + theta + method + "_eee_bpcu_per_w"));

        for (const auto& series : by_theta) {
            // rises to a single peak, then falls
            int direction_changes = 0;
            for (std::size_t i = 2; i < series.size(); ++i) {
                const double d1 = series[i - 1] - series[i - 2];
                const double d2 = series[i] - series[i - 1];
                if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) ++direction_changes;
            }
            CHECK(direction_changes <= 1);
        }
        // stricter delay exponents sit strictly below
        for (std::size_t i = 0; i < by_theta[0].size(); ++i) {
            CHECK(by_theta[0][i] > by_theta[1][i]);
            CHECK(by_theta[1][i] > by_theta[2][i]);
        }
    }
}
