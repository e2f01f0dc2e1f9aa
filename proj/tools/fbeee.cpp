// Command-line front end: single-point evaluation, the three optimizers, the
// constrained solver and the figure sweeps.  SNR is dB-facing here; all
// internal math is linear.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fbl/config.hpp"
#include "fbl/csv.hpp"
#include "fbl/optimize.hpp"
#include "fbl/sweep.hpp"

namespace {

using namespace fbl;

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

double from_db(double db) { return std::pow(10.0, db / 10.0); }
double to_db(double rho) { return 10.0 * std::log10(rho); }

void emit(const csv::CsvTable& table, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        table.write(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + out_path + "'");
    table.write(out);
}

void add_footer(csv::CsvTable& table, const config::ParamBundle& bundle) {
    table.footer.emplace_back("tool_version", config::kToolVersion);
    std::ostringstream hash;
    hash << std::hex << bundle.hash();
    table.footer.emplace_back("config_hash", hash.str());
}

// Resolves theta for the pointwise commands: explicit value wins, otherwise
// the delay constraint at equality with the mode's buffer probability.
struct ResolvedQos {
    double theta = 0.0;
    bool slack = false;
    double p_nb = 1.0;
};

ResolvedQos resolve_theta(const config::ParamBundle& b, double rho, double epsilon) {
    ResolvedQos r;
    if (b.power.buffer_mode == effcap::BufferMode::EmptyBufferAware)
        r.p_nb = effcap::nonempty_buffer_probability(b.channel, rho, epsilon,
                                                     b.qos.arrival_rate);
    if (b.qos.theta.has_value()) {
        r.theta = *b.qos.theta;
        return r;
    }
    const auto t = optimize::optimal_theta(b.qos, r.p_nb);
    r.theta = t.theta;
    r.slack = t.slack;
    return r;
}

int cmd_eval(const config::ParamBundle& b, const std::string& out) {
    const double rho = from_db(b.rho_db);
    const auto q = resolve_theta(b, rho, b.epsilon);
    const channel::OperatingPoint point{rho, b.epsilon, q.theta};

    csv::CsvTable table;
    table.header = {"snr_db",   "epsilon",   "theta",      "p_nb",
                    "ec_closed_bpcu", "ec_oracle_bpcu", "eee_closed_bpcu_per_w",
                    "eee_oracle_bpcu_per_w", "delay_outage"};
    const double ec_cf =
        effcap::effective_capacity(b.channel, point, effcap::EcMethod::ClosedForm);
    const double ec_or =
        effcap::effective_capacity(b.channel, point, effcap::EcMethod::Oracle);
    const double eee_cf = effcap::eee(b.channel, b.qos, b.power, point,
                                      effcap::EcMethod::ClosedForm);
    const double eee_or =
        effcap::eee(b.channel, b.qos, b.power, point, effcap::EcMethod::Oracle);
    const double outage = effcap::delay_outage(q.theta, ec_cf, b.qos.delay_bound);
    table.rows.push_back({csv::format_sig12(b.rho_db), csv::format_sig12(b.epsilon),
                          csv::format_sig12(q.theta), csv::format_sig12(q.p_nb),
                          csv::format_sig12(ec_cf), csv::format_sig12(ec_or),
                          csv::format_sig12(eee_cf), csv::format_sig12(eee_or),
                          csv::format_sig12(outage)});
    add_footer(table, b);
    emit(table, out);
    return 0;
}

int cmd_opt_eps(const config::ParamBundle& b, const std::string& out) {
    const double rho = from_db(b.rho_db);
    const auto q = resolve_theta(b, rho, b.epsilon);
    if (q.theta <= 0.0)
        throw infeasible_error("opt-eps: delay constraint slack, theta = 0");
    const auto res = optimize::optimal_epsilon(b.channel, rho, q.theta);

    csv::CsvTable table;
    table.header = {"snr_db", "theta", "epsilon_star", "objective", "at_boundary"};
    table.rows.push_back({csv::format_sig12(b.rho_db), csv::format_sig12(q.theta),
                          csv::format_sig12(res.epsilon), csv::format_sig12(res.objective),
                          res.at_boundary ? "1" : "0"});
    add_footer(table, b);
    emit(table, out);
    return 0;
}

int cmd_opt_power(const config::ParamBundle& b, const std::string& out) {
    const double rho_guess = from_db(b.rho_db);
    const auto q = resolve_theta(b, rho_guess, b.epsilon);
    if (q.theta <= 0.0)
        throw infeasible_error("opt-power: delay constraint slack, theta = 0");
    effcap::QosConfig qos = b.qos;
    qos.theta = q.theta;
    const auto res = optimize::optimal_power(b.channel, qos, b.power, b.epsilon,
                                             1e-2, from_db(b.rho_max_db) * 1e2);

    csv::CsvTable table;
    table.header = {"theta",        "epsilon",      "rho_star_db", "rho_direct_db",
                    "rho_root_db",  "root_bracketed", "route_gap_db"};
    table.rows.push_back(
        {csv::format_sig12(q.theta), csv::format_sig12(b.epsilon),
         csv::format_sig12(to_db(res.rho_star)), csv::format_sig12(to_db(res.rho_direct)),
         res.root_bracketed ? csv::format_sig12(to_db(res.rho_root)) : "",
         res.root_bracketed ? "1" : "0", csv::format_sig12(res.route_gap_db)});
    add_footer(table, b);
    emit(table, out);
    return 0;
}

int cmd_solve(const config::ParamBundle& b, bool oracle, const std::string& out) {
    optimize::SolveConstraints cons;
    cons.qos = b.qos;
    cons.power = b.power;
    cons.rho_max = from_db(b.rho_max_db);
    cons.epsilon_t = b.epsilon_t;
    cons.method = oracle ? effcap::EcMethod::Oracle : effcap::EcMethod::ClosedForm;
    const auto res = optimize::solve_constrained(b.channel, cons);

    csv::CsvTable table;
    table.header = {"rho_star_db", "epsilon_star", "theta_star", "eee_star_bpcu_per_w",
                    "ec_star_bpcu", "p_nb", "feasible", "note"};
    table.rows.push_back(
        {res.rho_star > 0.0 ? csv::format_sig12(to_db(res.rho_star)) : "",
         csv::format_sig12(res.epsilon_star), csv::format_sig12(res.theta_star),
         csv::format_sig12(res.eee_star), csv::format_sig12(res.ec_star),
         csv::format_sig12(res.p_nb), res.feasible ? "1" : "0",
         res.diagnostics.note});
    add_footer(table, b);
    emit(table, out);
    if (!res.feasible) {
        std::cerr << "solve: infeasible ("
                  << (res.diagnostics.note.empty() ? "constraints unmet"
                                                   : res.diagnostics.note)
                  << ")\n";
        return kExitInfeasible;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective-capacity / energy-efficiency toolkit for short-packet "
                 "Rayleigh block-fading links"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags remain valid after the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file");

    // every config key doubles as a flag of the same name
    std::map<std::string, std::string> overrides;
    for (const auto& key : config::known_keys()) {
        app.add_option_function<std::string>(
            "--" + key,
            [&overrides, key](const std::string& v) { overrides[key] = v; },
            "override config key '" + key + "'");
    }

    std::string out_path;
    app.add_option("-o,--out", out_path, "output CSV path (default: stdout)");

    auto* eval = app.add_subcommand("eval", "evaluate EC/EEE at one operating point");
    auto* opt_eps = app.add_subcommand("opt-eps", "error probability maximizing the EEE");
    auto* opt_power = app.add_subcommand("opt-power", "transmit power maximizing the EEE");
    auto* solve = app.add_subcommand("solve", "constrained EEE maximization");
    bool solve_oracle = false;
    solve->add_flag("--oracle", solve_oracle, "use the quadrature oracle instead of the closed form");

    auto* sweepcmd = app.add_subcommand("sweep", "figure-reproduction sweep to CSV");
    int figure = 2;
    bool oracle_check = false;
    sweepcmd->add_option("--figure", figure, "figure number (2-6)")->required();
    sweepcmd->add_flag("--oracle-check", oracle_check,
                       "add quadrature-oracle twin series");

    auto* crosscmd = app.add_subcommand("cross-check",
                                        "closed form vs quadrature vs Monte Carlo");
    int cross_figure = 2;
    std::size_t samples = 1000000;
    crosscmd->add_option("--figure", cross_figure, "figure number (2 or 3)");
    crosscmd->add_option("--samples", samples, "Monte Carlo samples per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints message or help text
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        config::ParamBundle bundle =
            config_path.empty() ? config::default_bundle() : config::parse_config(config_path);
        for (const auto& [key, value] : overrides)
            config::apply_key_value(bundle, key, value);
        bundle.validate();

        if (*eval) return cmd_eval(bundle, out_path);
        if (*opt_eps) return cmd_opt_eps(bundle, out_path);
        if (*opt_power) return cmd_opt_power(bundle, out_path);
        if (*solve) return cmd_solve(bundle, solve_oracle, out_path);
        if (*sweepcmd) {
            if (figure < 2 || figure > 6)
                throw std::invalid_argument("sweep: figure must be in 2..6");
            const auto spec = sweep::SweepSpec::for_figure(
                static_cast<sweep::FigureId>(figure), bundle, oracle_check);
            emit(sweep::run_sweep(spec), out_path);
            return 0;
        }
        if (*crosscmd) {
            if (cross_figure != 2 && cross_figure != 3)
                throw std::invalid_argument("cross-check: figure must be 2 or 3");
            const auto spec = sweep::SweepSpec::for_figure(
                static_cast<sweep::FigureId>(cross_figure), bundle, false);
            emit(sweep::cross_check(spec, samples, bundle.seed), out_path);
            return 0;
        }
        return 0;
    } catch (const infeasible_error& ex) {
        std::cerr << "infeasible: " << ex.what() << '\n';
        return kExitInfeasible;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "invalid input: " << ex.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& ex) {
        std::cerr << "invalid input: " << ex.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
