#include "fbl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fbl/solvers.hpp"

namespace fbl::optimize {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kEpsLo = 1e-12;
constexpr double kEpsHi = 1.0 - 1e-12;

double to_db(double rho) { return 10.0 * std::log10(rho); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void SolveConstraints::validate() const {
    qos.validate();
    power.validate();
    if (!(rho_max > 0.0))
        throw std::invalid_argument("SolveConstraints: rho_max must be positive");
    if (!(epsilon_t > 0.0 && epsilon_t < 1.0))
        throw std::invalid_argument("SolveConstraints: epsilon_t must lie in (0,1)");
    if (!(rho_min > 0.0 && rho_min < rho_max))
        throw std::invalid_argument("SolveConstraints: rho_min must lie in (0, rho_max)");
    if (!(grid_step_db > 0.0))
        throw std::invalid_argument("SolveConstraints: grid_step_db must be positive");
}

EpsilonResult optimal_epsilon(const channel::ChannelConfig& cfg, double rho,
                              double theta, channel::RateModel model) {
    cfg.validate();
    if (!(rho > 0.0))
        throw std::domain_error("optimal_epsilon: rho must be positive");
    if (!(theta > 0.0))
        throw std::domain_error("optimal_epsilon: theta must be positive");

    // The fading moments do not depend on epsilon; only the Taylor weights do.
    const double n = cfg.blocklength;
    const double alpha = -theta * n / std::log(2.0);
    const double m0 = specfun::scaled_gamma_combo(alpha, rho);
    const double m2 = specfun::scaled_gamma_combo(alpha - 2.0, rho);
    const double bscale = (model == channel::RateModel::ShannonLimit)
                              ? 0.0
                              : theta * std::sqrt(n) * kLog2E;

    auto objective = [&](double eps) {
        const double beta = bscale == 0.0 ? 0.0 : bscale * specfun::gaussian_q_inv(eps);
        const double t2 = 0.5 * beta * beta + beta;
        const double j = (t2 + 1.0) * m0 - t2 * m2;
        return eps + (1.0 - eps) * j;
    };

    const auto min = solvers::golden_section_minimize(objective, kEpsLo, kEpsHi, 1e-6);
    EpsilonResult res;
    res.epsilon = min.x;
    res.objective = min.fx;
    res.iterations = min.iterations;
    res.at_boundary = (min.x - kEpsLo < 1e-5) || (kEpsHi - min.x < 1e-5);
    return res;
}

namespace {

// Closed-form EEE and the pieces of its stationarity condition at fixed
// epsilon and theta.
struct PowerObjective {
    const channel::ChannelConfig& cfg;
    const effcap::QosConfig& qos;
    const effcap::PowerModelConfig& pm;
    double epsilon;
    double theta;
    channel::RateModel model;

    double numerator(double rho, double* dnum = nullptr) const {
        const auto terms = effcap::fading_mgf_terms(cfg, rho, theta, epsilon, model);
        const double psi = epsilon + (1.0 - epsilon) * terms.value;
        const double n_theta = cfg.blocklength * theta;
        if (dnum) *dnum = -(1.0 - epsilon) * terms.drho / (n_theta * psi);
        return -std::log(psi) / n_theta;
    }

    double denominator(double rho, double* dden = nullptr) const {
        if (pm.buffer_mode == effcap::BufferMode::EmptyBufferAware) {
            const double mean_rate = channel::expected_rate(cfg, rho, epsilon, model);
            if (!(mean_rate > qos.arrival_rate))
                throw infeasible_error("optimal_power: unstable queue at candidate rho");
            const double p_nb = qos.arrival_rate / mean_rate;
            if (dden) {
                const double dmean =
                    channel::expected_rate_rho_derivative(cfg, rho, epsilon, model);
                *dden = pm.zeta * qos.arrival_rate * (mean_rate - rho * dmean) /
                        (mean_rate * mean_rate);
            }
            return p_nb * pm.zeta * rho + pm.circuit_power;
        }
        if (dden) *dden = pm.zeta;
        return pm.zeta * rho + pm.circuit_power;
    }

    double eee(double rho) const { return numerator(rho) / denominator(rho); }

    // Stationarity gap N'(rho) D(rho) - N(rho) D'(rho); positive below the
    // EEE peak, negative above it.
    double stationarity_gap(double rho) const {
        double dnum = 0.0, dden = 0.0;
        const double num = numerator(rho, &dnum);
        const double den = denominator(rho, &dden);
        return dnum * den - num * dden;
    }
};

}  // namespace

PowerResult optimal_power(const channel::ChannelConfig& cfg,
                          const effcap::QosConfig& qos,
                          const effcap::PowerModelConfig& pm, double epsilon,
                          double rho_lo, double rho_hi, channel::RateModel model) {
    cfg.validate();
    qos.validate();
    pm.validate();
    if (!qos.theta.has_value())
        throw std::invalid_argument("optimal_power: qos.theta must be resolved");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("optimal_power: epsilon must lie in (0,1)");
    if (!(rho_lo > 0.0 && rho_lo < rho_hi))
        throw std::domain_error("optimal_power: invalid bracket");

    const PowerObjective obj{cfg, qos, pm, epsilon, *qos.theta, model};
    const double t_lo = std::log10(rho_lo);
    const double t_hi = std::log10(rho_hi);

    // Candidate rho values inside an empty-buffer-aware bracket can have an
    // unstable queue; such points drop out as -inf / NaN instead of aborting
    // the whole search.
    auto guarded_eee = [&](double rho) {
        try {
            return obj.eee(rho);
        } catch (const infeasible_error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    auto guarded_gap = [&](double t) {
        try {
            return obj.stationarity_gap(std::pow(10.0, t));
        } catch (const infeasible_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    // Flatness guard over the bracket.
    {
        const double e0 = guarded_eee(rho_lo);
        const double e1 = guarded_eee(std::sqrt(rho_lo * rho_hi));
        const double e2 = guarded_eee(rho_hi);
        const double lo = std::min({e0, e1, e2});
        const double hi = std::max({e0, e1, e2});
        if (std::isfinite(lo) && hi - lo < 1e-12)
            throw evaluation_error("optimal_power: EEE numerically flat over bracket");
        if (!std::isfinite(hi))
            throw infeasible_error("optimal_power: queue unstable over the whole bracket");
    }

    PowerResult res;

    const auto direct = solvers::golden_section_maximize(
        [&](double t) { return guarded_eee(std::pow(10.0, t)); }, t_lo, t_hi, 1e-5);
    res.rho_direct = std::pow(10.0, direct.x);
    res.iterations = direct.iterations;

    const auto bracket = solvers::bracket_sign_change(guarded_gap, t_lo, t_hi, 120);
    if (bracket) {
        const auto root =
            solvers::brent_root(guarded_gap, bracket->first, bracket->second, 1e-12);
        res.root_bracketed = root.converged;
        res.rho_root = std::pow(10.0, root.x);
        res.iterations += root.iterations;
    }

    if (res.root_bracketed) {
        res.route_gap_db = std::abs(to_db(res.rho_root) - to_db(res.rho_direct));
        res.routes_agree = res.route_gap_db <= 0.05;
        res.rho_star = res.routes_agree ? res.rho_root : res.rho_direct;
    } else {
        res.rho_star = res.rho_direct;
    }
    return res;
}

ThetaResult optimal_theta(const effcap::QosConfig& qos, double p_nb) {
    if (!(qos.delay_bound > 0.0) ||
        !(qos.delay_outage_prob > 0.0 && qos.delay_outage_prob < 1.0) ||
        !(qos.arrival_rate > 0.0))
        throw std::invalid_argument(
            "optimal_theta: (delay_bound, delay_outage_prob, arrival_rate) required");
    if (!(p_nb > 0.0 && p_nb <= 1.0))
        throw std::domain_error("optimal_theta: p_nb must lie in (0,1]");

    ThetaResult res;
    if (p_nb <= qos.delay_outage_prob) {
        res.slack = true;  // constraint holds for every theta >= 0
        return res;
    }
    res.theta = std::log(p_nb / qos.delay_outage_prob) /
                (qos.arrival_rate * qos.delay_bound);
    return res;
}

namespace {

struct Candidate {
    double rho = 0.0;
    double p_nb = 1.0;
    double theta = 0.0;
    bool theta_slack = false;
    double epsilon = 0.0;
    double ec = 0.0;
    double eee = -std::numeric_limits<double>::infinity();
    bool queue_stable = false;
    bool feasible = false;
};

Candidate evaluate_candidate(const channel::ChannelConfig& cfg,
                             const SolveConstraints& cons, double rho) {
    Candidate cand;
    cand.rho = rho;
    const auto& qos = cons.qos;
    const bool ebp = cons.power.buffer_mode == effcap::BufferMode::EmptyBufferAware;

    auto buffer_probability = [&](double eps) -> bool {
        if (!ebp) {
            cand.p_nb = 1.0;
            return true;
        }
        const double mean_rate = channel::expected_rate(cfg, rho, eps, cons.model);
        if (!(mean_rate > qos.arrival_rate)) return false;
        cand.p_nb = qos.arrival_rate / mean_rate;
        return true;
    };

    auto resolve_theta = [&]() {
        if (qos.theta.has_value()) {
            cand.theta = *qos.theta;
            cand.theta_slack = false;
        } else {
            const ThetaResult t = optimal_theta(qos, cand.p_nb);
            cand.theta = t.theta;
            cand.theta_slack = t.slack;
        }
    };

    if (!buffer_probability(cons.epsilon_t)) return cand;  // unstable queue
    cand.queue_stable = true;
    resolve_theta();

    if (cand.theta > 0.0) {
        const EpsilonResult eps = optimal_epsilon(cfg, rho, cand.theta, cons.model);
        cand.epsilon = std::min(eps.epsilon, cons.epsilon_t);
    } else {
        cand.epsilon = cons.epsilon_t;
    }

    // The buffer probability was computed at epsilon_t; refresh it once if a
    // smaller epsilon was selected (P_nb depends on rho and epsilon only).
    if (ebp && cand.epsilon != cons.epsilon_t) {
        if (!buffer_probability(cand.epsilon)) {
            cand.queue_stable = false;
            return cand;
        }
        resolve_theta();
    }

    if (cand.theta > 0.0) {
        const channel::OperatingPoint point{rho, cand.epsilon, cand.theta};
        cand.ec = effcap::effective_capacity(cfg, point, cons.method, cons.model);
    } else {
        // theta -> 0 limit of -log(psi)/(n theta)
        cand.ec = (1.0 - cand.epsilon) *
                  channel::expected_rate_unclamped(cfg, rho, cand.epsilon, cons.model);
    }
    const double denom = cand.p_nb * cons.power.zeta * rho + cons.power.circuit_power;
    cand.eee = cand.ec / denom;
    cand.feasible = cand.ec >= qos.arrival_rate - 1e-9;
    return cand;
}

}  // namespace

SolveResult solve_constrained(const channel::ChannelConfig& cfg,
                              const SolveConstraints& cons) {
    cfg.validate();
    cons.validate();

    const double t_lo = to_db(cons.rho_min);
    const double t_hi = to_db(cons.rho_max);
    const int steps = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / cons.grid_step_db)));

    SolveResult result;
    result.diagnostics.grid_points = steps + 1;

    std::vector<double> grid_db(steps + 1);
    for (int i = 0; i <= steps; ++i)
        grid_db[i] = (i == steps) ? t_hi : t_lo + i * cons.grid_step_db;

    int best_feasible = -1, best_any = -1;
    double best_feasible_eee = -std::numeric_limits<double>::infinity();
    double best_any_eee = -std::numeric_limits<double>::infinity();
    std::vector<Candidate> cands(grid_db.size());
    for (std::size_t i = 0; i < grid_db.size(); ++i) {
        cands[i] = evaluate_candidate(cfg, cons, from_db(grid_db[i]));
        if (!cands[i].queue_stable) continue;
        if (cands[i].eee > best_any_eee) {
            best_any_eee = cands[i].eee;
            best_any = static_cast<int>(i);
        }
        if (cands[i].feasible && cands[i].eee > best_feasible_eee) {
            best_feasible_eee = cands[i].eee;
            best_feasible = static_cast<int>(i);
        }
        if (cands[i].feasible) ++result.diagnostics.feasible_points;
    }

    const bool have_feasible = cons.enforce_arrival_constraint && best_feasible >= 0;
    const int pick = have_feasible ? best_feasible : best_any;
    if (pick < 0) {
        result.diagnostics.note = "queue unstable at every rho <= rho_max";
        return result;
    }
    if (cons.enforce_arrival_constraint && best_feasible < 0)
        result.diagnostics.note =
            "no candidate reaches EC >= arrival_rate; best-effort maximizer returned";

    // Golden-section refinement between the neighbours of the best grid point.
    const double lo = grid_db[static_cast<std::size_t>(std::max(pick - 1, 0))];
    const double hi = grid_db[std::min(static_cast<std::size_t>(pick) + 1,
                                       grid_db.size() - 1)];
    auto refine_objective = [&](double t) {
        const Candidate c = evaluate_candidate(cfg, cons, from_db(t));
        if (!c.queue_stable) return -std::numeric_limits<double>::infinity();
        if (have_feasible && !c.feasible)
            return -std::numeric_limits<double>::infinity();
        return c.eee;
    };
    const auto refined = solvers::golden_section_maximize(refine_objective, lo, hi, 0.01);
    result.diagnostics.refine_iterations = refined.iterations;

    Candidate best = evaluate_candidate(cfg, cons, from_db(refined.x));
    const bool refined_ok =
        best.queue_stable && (!have_feasible || best.feasible) &&
        best.eee >= cands[static_cast<std::size_t>(pick)].eee;
    if (!refined_ok) best = cands[static_cast<std::size_t>(pick)];

    result.rho_star = best.rho;
    result.epsilon_star = best.epsilon;
    result.theta_star = best.theta;
    result.theta_slack = best.theta_slack;
    result.eee_star = best.eee;
    result.ec_star = best.ec;
    result.p_nb = best.p_nb;
    result.feasible = best.feasible;
    return result;
}

}  // namespace fbl::optimize
