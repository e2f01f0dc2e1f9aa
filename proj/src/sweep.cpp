#include "fbl/sweep.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fbl::sweep {

namespace {

double from_db(double db) { return std::pow(10.0, db / 10.0); }
double to_db(double rho) { return 10.0 * std::log10(rho); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

bool solver_backed(FigureId figure) {
    return figure == FigureId::EeeVsDelta || figure == FigureId::PowerVsDelta ||
           figure == FigureId::EcVsDelta;
}

std::string spacing_name(GridSpacing s) {
    switch (s) {
        case GridSpacing::Linear: return "linear";
        case GridSpacing::Log10: return "log10";
        case GridSpacing::Decibel: return "db";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Pointwise evaluation (figures 2 and 3)
// ---------------------------------------------------------------------------

enum class EvalMethod { ClosedForm, Oracle, MonteCarlo };

struct PointwiseSetting {
    double rho = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
    bool theta_slack = false;
    double p_nb = 1.0;
};

// Resolves the operating point a series dictates at one grid value.
PointwiseSetting resolve_point(const SweepSpec& spec, const SeriesSpec& series,
                               double grid_value) {
    PointwiseSetting pt;
    if (spec.figure == FigureId::EeeVsSnr) {
        pt.rho = from_db(grid_value);
        pt.epsilon = spec.base.epsilon;
        pt.theta = series.theta;
        pt.p_nb = 1.0;
        return pt;
    }
    // figure 3: the grid variable is the error probability
    pt.rho = from_db(spec.base.rho_db);
    pt.epsilon = grid_value;
    if (series.buffer == effcap::BufferMode::EmptyBufferAware) {
        pt.p_nb = effcap::nonempty_buffer_probability(
            spec.base.channel, pt.rho, pt.epsilon, series.arrival_rate, series.model);
    }
    effcap::QosConfig qos = spec.base.qos;
    qos.theta.reset();
    qos.delay_outage_prob = series.lambda_out;
    qos.arrival_rate = series.arrival_rate;
    const auto theta = optimize::optimal_theta(qos, pt.p_nb);
    pt.theta = theta.theta;
    pt.theta_slack = theta.slack;
    return pt;
}

double pointwise_eee(const SweepSpec& spec, const SeriesSpec& series,
                     const PointwiseSetting& pt, EvalMethod method,
                     std::size_t samples, std::uint64_t cell_seed,
                     double* psi_std_error = nullptr) {
    const auto& cfg = spec.base.channel;
    const double denom = pt.p_nb * spec.base.power.zeta * pt.rho +
                         spec.base.power.circuit_power;

    double ec;
    if (pt.theta_slack || pt.theta == 0.0) {
        // theta -> 0 limit of -log(psi)/(n theta)
        ec = (1.0 - pt.epsilon) *
             channel::expected_rate_unclamped(cfg, pt.rho, pt.epsilon, series.model);
    } else if (method == EvalMethod::MonteCarlo) {
        specfun::RandomStream stream(cell_seed);
        const auto est = channel::service_mgf_monte_carlo(
            cfg, pt.rho, pt.epsilon, pt.theta, stream, samples, series.model);
        if (psi_std_error) *psi_std_error = est.std_error;
        ec = -std::log(est.mean) / (cfg.blocklength * pt.theta);
    } else {
        const channel::OperatingPoint point{pt.rho, pt.epsilon, pt.theta};
        ec = effcap::effective_capacity(cfg, point,
                                        method == EvalMethod::Oracle
                                            ? effcap::EcMethod::Oracle
                                            : effcap::EcMethod::ClosedForm,
                                        series.model);
    }
    return ec / denom;
}

// ---------------------------------------------------------------------------
// Solver-backed evaluation (figures 4-6)
// ---------------------------------------------------------------------------

optimize::SolveResult solve_at_delta(const SweepSpec& spec, const SeriesSpec& series,
                                     double delta) {
    optimize::SolveConstraints cons;
    cons.qos = spec.base.qos;
    cons.qos.theta.reset();
    cons.qos.delay_bound = delta;
    cons.qos.delay_outage_prob = series.lambda_out;
    cons.qos.arrival_rate = series.arrival_rate;
    cons.power = spec.base.power;
    cons.power.buffer_mode = series.buffer;
    cons.rho_max = from_db(spec.base.rho_max_db);
    cons.epsilon_t = spec.base.epsilon_t;
    cons.model = series.model;
    cons.method = series.method;
    // Reference-curve semantics: the EEE maximizer is reported together with
    // the arrival-rate feasibility flag instead of being pruned by it.
    cons.enforce_arrival_constraint = false;
    return optimize::solve_constrained(spec.base.channel, cons);
}

std::string series_label(effcap::BufferMode buffer, channel::RateModel model,
                         double lambda_out, double arrival_rate) {
    std::string label = (buffer == effcap::BufferMode::EmptyBufferAware) ? "ebp" : "fb";
    label += (model == channel::RateModel::ShannonLimit) ? "_sh" : "_fbl";
    label += "_L" + csv::format_sig12(lambda_out);
    if (arrival_rate != 1.0) label += "_lam" + csv::format_sig12(arrival_rate);
    return label;
}

}  // namespace

void GridSpec::validate() const {
    if (count < 2) throw std::invalid_argument("GridSpec: count must be >= 2");
    if (!(start < stop)) throw std::invalid_argument("GridSpec: start must be < stop");
    if (spacing == GridSpacing::Log10 && !(start > 0.0))
        throw std::invalid_argument("GridSpec: log spacing requires positive start");
}

std::vector<double> GridSpec::points() const {
    validate();
    std::vector<double> pts(count);
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        if (spacing == GridSpacing::Log10) {
            pts[i] = std::pow(10.0, std::log10(start) + f * (std::log10(stop) - std::log10(start)));
        } else {
            pts[i] = start + f * (stop - start);  // dB grids stay in dB
        }
    }
    return pts;
}

void SweepSpec::validate() const {
    grid.validate();
    base.validate();
    if (series.empty())
        throw std::invalid_argument("SweepSpec: at least one series required");
    if (jobs < 1) throw std::invalid_argument("SweepSpec: jobs must be >= 1");
}

SweepSpec SweepSpec::for_figure(FigureId figure, const config::ParamBundle& base,
                                bool oracle_check) {
    SweepSpec spec;
    spec.figure = figure;
    spec.base = base;
    spec.jobs = base.jobs;

    const double lambdas_out[] = {1e-2, 1e-3};

    switch (figure) {
        case FigureId::EeeVsSnr: {
            spec.grid = {-10.0, 20.0, 61, GridSpacing::Decibel};
            for (double theta : {0.001, 0.01, 0.1}) {
                for (bool oracle : {false, true}) {
                    SeriesSpec s;
                    s.label = "theta" + csv::format_sig12(theta) + (oracle ? "_oracle" : "_cf");
                    s.method = oracle ? effcap::EcMethod::Oracle : effcap::EcMethod::ClosedForm;
                    s.theta = theta;
                    s.arrival_rate = base.qos.arrival_rate;
                    spec.series.push_back(s);
                }
            }
            break;
        }
        case FigureId::EeeVsEpsilon: {
            spec.grid = {1e-5, 1e-1, 41, GridSpacing::Log10};
            for (double lam_out : lambdas_out) {
                for (auto buffer : {effcap::BufferMode::FullBuffer,
                                    effcap::BufferMode::EmptyBufferAware}) {
                    for (auto model : {channel::RateModel::FiniteBlocklength,
                                       channel::RateModel::ShannonLimit}) {
                        SeriesSpec s;
                        s.buffer = buffer;
                        s.model = model;
                        s.lambda_out = lam_out;
                        s.arrival_rate = base.qos.arrival_rate;
                        s.label = series_label(buffer, model, lam_out, 1.0);
                        spec.series.push_back(s);
                        if (oracle_check) {
                            SeriesSpec o = s;
                            o.method = effcap::EcMethod::Oracle;
                            o.label += "_oracle";
                            spec.series.push_back(o);
                        }
                    }
                }
            }
            break;
        }
        case FigureId::EeeVsDelta:
        case FigureId::PowerVsDelta:
        case FigureId::EcVsDelta: {
            spec.grid = {100.0, 1000.0, 10, GridSpacing::Linear};
            for (double lam_out : lambdas_out) {
                for (auto buffer : {effcap::BufferMode::FullBuffer,
                                    effcap::BufferMode::EmptyBufferAware}) {
                    std::vector<channel::RateModel> models = {
                        channel::RateModel::FiniteBlocklength};
                    if (figure != FigureId::EcVsDelta)
                        models.push_back(channel::RateModel::ShannonLimit);
                    for (auto model : models) {
                        SeriesSpec s;
                        s.buffer = buffer;
                        s.model = model;
                        s.lambda_out = lam_out;
                        s.arrival_rate = base.qos.arrival_rate;
                        s.label = series_label(buffer, model, lam_out, 1.0);
                        spec.series.push_back(s);
                        if (oracle_check) {
                            SeriesSpec o = s;
                            o.method = effcap::EcMethod::Oracle;
                            o.label += "_oracle";
                            spec.series.push_back(o);
                        }
                    }
                }
            }
            if (figure == FigureId::PowerVsDelta) {
                // reduced-arrival full-buffer comparison curve
                SeriesSpec s;
                s.lambda_out = 1e-2;
                s.arrival_rate = 0.3;
                s.label = series_label(s.buffer, s.model, s.lambda_out, 0.3);
                spec.series.push_back(s);
            }
            break;
        }
    }
    return spec;
}

csv::CsvTable run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto points = spec.grid.points();
    const bool solver = solver_backed(spec.figure);
    const std::size_t width = solver ? 2 : 1;

    struct Cell {
        std::vector<std::string> text;
        std::string error;
    };
    std::vector<Cell> cells(points.size() * spec.series.size());

    parallel_for(cells.size(), spec.jobs, [&](std::size_t task) {
        const std::size_t pi = task / spec.series.size();
        const std::size_t si = task % spec.series.size();
        const auto& series = spec.series[si];
        Cell& cell = cells[task];
        cell.text.assign(width, "");
        try {
            if (solver) {
                const auto res = solve_at_delta(spec, series, points[pi]);
                double value = 0.0;
                switch (spec.figure) {
                    case FigureId::EeeVsDelta: value = res.eee_star; break;
                    case FigureId::PowerVsDelta: value = to_db(res.rho_star); break;
                    default: value = res.ec_star; break;
                }
                if (res.rho_star > 0.0) {
                    cell.text[0] = csv::format_sig12(value);
                    cell.text[1] = res.feasible ? "1" : "0";
                } else {
                    cell.error = res.diagnostics.note;
                }
            } else {
                const auto pt = resolve_point(spec, series, points[pi]);
                const auto method = (series.method == effcap::EcMethod::Oracle)
                                        ? EvalMethod::Oracle
                                        : EvalMethod::ClosedForm;
                cell.text[0] =
                    csv::format_sig12(pointwise_eee(spec, series, pt, method, 0, 0));
            }
        } catch (const std::exception& ex) {
            cell.error = ex.what();
        }
    });

    csv::CsvTable table;
    switch (spec.figure) {
        case FigureId::EeeVsSnr: table.header.push_back("snr_db"); break;
        case FigureId::EeeVsEpsilon: table.header.push_back("epsilon"); break;
        default: table.header.push_back("delta_symbols"); break;
    }
    for (const auto& s : spec.series) {
        switch (spec.figure) {
            case FigureId::PowerVsDelta:
                table.header.push_back(s.label + "_rho_star_db");
                break;
            case FigureId::EcVsDelta:
                table.header.push_back(s.label + "_ec_bpcu");
                break;
            default:
                table.header.push_back(s.label + "_eee_bpcu_per_w");
                break;
        }
        if (solver) table.header.push_back(s.label + "_feasible");
    }

    std::size_t error_count = 0;
    std::string first_error;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        std::vector<std::string> row;
        row.push_back(csv::format_sig12(points[pi]));
        for (std::size_t si = 0; si < spec.series.size(); ++si) {
            const Cell& cell = cells[pi * spec.series.size() + si];
            row.insert(row.end(), cell.text.begin(), cell.text.end());
            if (!cell.error.empty()) {
                ++error_count;
                if (first_error.empty()) first_error = cell.error;
            }
        }
        table.rows.push_back(std::move(row));
    }

    table.footer.emplace_back("tool_version", config::kToolVersion);
    table.footer.emplace_back("figure", std::to_string(static_cast<int>(spec.figure)));
    {
        std::ostringstream hash;
        hash << std::hex << spec.base.hash();
        table.footer.emplace_back("config_hash", hash.str());
    }
    table.footer.emplace_back("grid", csv::format_sig12(spec.grid.start) + ":" +
                                          csv::format_sig12(spec.grid.stop) + ":" +
                                          std::to_string(spec.grid.count) + ":" +
                                          spacing_name(spec.grid.spacing));
    table.footer.emplace_back("method", "deterministic");
    if (error_count) {
        table.footer.emplace_back("point_errors", std::to_string(error_count));
        table.footer.emplace_back("point_error_first", first_error);
    }
    return table;
}

csv::CsvTable cross_check(const SweepSpec& spec, std::size_t samples,
                          std::uint64_t seed) {
    spec.validate();
    if (solver_backed(spec.figure))
        throw std::invalid_argument(
            "cross_check: only the pointwise figures (2 and 3) are supported");
    if (samples < 10000)
        throw std::invalid_argument("cross_check: samples must be >= 10^4");

    // Closed-form series only; the oracle and Monte Carlo columns are added
    // per series by this routine.
    std::vector<SeriesSpec> series;
    for (const auto& s : spec.series)
        if (s.method == effcap::EcMethod::ClosedForm) series.push_back(s);
    if (series.empty())
        throw std::invalid_argument("cross_check: no closed-form series in spec");

    const auto points = spec.grid.points();

    struct Cell {
        std::string closed, oracle, mc, rel_cf, rel_mc;
        std::string error;
    };
    std::vector<Cell> cells(points.size() * series.size());

    parallel_for(cells.size(), spec.jobs, [&](std::size_t task) {
        const std::size_t pi = task / series.size();
        const std::size_t si = task % series.size();
        Cell& cell = cells[task];
        try {
            const auto pt = resolve_point(spec, series[si], points[pi]);
            const double closed =
                pointwise_eee(spec, series[si], pt, EvalMethod::ClosedForm, 0, 0);
            const double oracle =
                pointwise_eee(spec, series[si], pt, EvalMethod::Oracle, 0, 0);
            const double mc = pointwise_eee(spec, series[si], pt, EvalMethod::MonteCarlo,
                                            samples, mix_seed(seed, task));
            cell.closed = csv::format_sig12(closed);
            cell.oracle = csv::format_sig12(oracle);
            cell.mc = csv::format_sig12(mc);
            cell.rel_cf = csv::format_sig12(std::abs(closed - oracle) / std::abs(oracle));
            cell.rel_mc = csv::format_sig12(std::abs(mc - oracle) / std::abs(oracle));
        } catch (const std::exception& ex) {
            cell.error = ex.what();
        }
    });

    csv::CsvTable table;
    table.header.push_back(spec.figure == FigureId::EeeVsSnr ? "snr_db" : "epsilon");
    for (const auto& s : series) {
        table.header.push_back(s.label + "_eee_closed");
        table.header.push_back(s.label + "_eee_oracle");
        table.header.push_back(s.label + "_eee_mc");
        table.header.push_back(s.label + "_relerr_closed_vs_oracle");
        table.header.push_back(s.label + "_relerr_mc_vs_oracle");
    }

    std::size_t error_count = 0;
    std::string first_error;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        std::vector<std::string> row;
        row.push_back(csv::format_sig12(points[pi]));
        for (std::size_t si = 0; si < series.size(); ++si) {
            const Cell& cell = cells[pi * series.size() + si];
            row.push_back(cell.closed);
            row.push_back(cell.oracle);
            row.push_back(cell.mc);
            row.push_back(cell.rel_cf);
            row.push_back(cell.rel_mc);
            if (!cell.error.empty()) {
                ++error_count;
                if (first_error.empty()) first_error = cell.error;
            }
        }
        table.rows.push_back(std::move(row));
    }

    table.footer.emplace_back("tool_version", config::kToolVersion);
    table.footer.emplace_back("figure", std::to_string(static_cast<int>(spec.figure)));
    {
        std::ostringstream hash;
        hash << std::hex << spec.base.hash();
        table.footer.emplace_back("config_hash", hash.str());
    }
    table.footer.emplace_back("method", "closed_form|quadrature|monte_carlo");
    table.footer.emplace_back("seed", std::to_string(seed));
    table.footer.emplace_back("samples", std::to_string(samples));
    if (error_count) {
        table.footer.emplace_back("point_errors", std::to_string(error_count));
        table.footer.emplace_back("point_error_first", first_error);
    }
    return table;
}

}  // namespace fbl::sweep
