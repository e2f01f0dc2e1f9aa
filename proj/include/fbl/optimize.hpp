#pragma once

// The three optimizers over the link model: error probability, transmit
// power and delay exponent, plus the constrained sweep solver that combines
// them under arrival-rate, delay-outage, power and error-target constraints.

#include <string>

#include "fbl/effcap.hpp"

namespace fbl::optimize {

struct EpsilonResult {
    double epsilon = 0.0;    // minimizer of eps + (1-eps) J(eps)
    double objective = 0.0;  // objective value at the minimizer
    bool at_boundary = false;
    int iterations = 0;
};

// Golden-section search for the error probability maximizing the effective
// capacity (equivalently the full-buffer EEE) at fixed rho and theta.  The
// search interval is clipped to [1e-12, 1-1e-12]; absolute tolerance 1e-6.
EpsilonResult optimal_epsilon(const channel::ChannelConfig& cfg, double rho,
                              double theta,
                              channel::RateModel model = channel::RateModel::FiniteBlocklength);

struct PowerResult {
    double rho_star = 0.0;    // adopted optimum (direct route wins on dispute)
    double rho_direct = 0.0;  // golden-section maximizer of the EEE
    double rho_root = 0.0;    // root of the stationarity condition, if bracketed
    bool root_bracketed = false;
    double route_gap_db = 0.0;
    bool routes_agree = true;  // gap within 0.05 dB when both routes ran
    int iterations = 0;
};

// Optimum transmit power for the closed-form EEE at fixed epsilon and
// resolved theta (qos.theta must be set).  Runs a bracketed root search on
// the stationarity condition of the EEE and a direct golden-section
// maximization; the direct route is authoritative when they disagree.
// Throws evaluation_error if the EEE is numerically flat over the bracket.
PowerResult optimal_power(const channel::ChannelConfig& cfg,
                          const effcap::QosConfig& qos,
                          const effcap::PowerModelConfig& pm, double epsilon,
                          double rho_lo = 1e-2, double rho_hi = 1e4,
                          channel::RateModel model = channel::RateModel::FiniteBlocklength);

struct ThetaResult {
    double theta = 0.0;
    bool slack = false;  // delay constraint holds for every theta >= 0
};

// theta* = log(P_nb / Lambda) / (lambda * delta): the delay-outage
// constraint at equality.  When P_nb <= Lambda the constraint is slack and
// the zero sentinel is returned with the flag set.
ThetaResult optimal_theta(const effcap::QosConfig& qos, double p_nb);

struct SolveConstraints {
    effcap::QosConfig qos;
    effcap::PowerModelConfig power;
    double rho_max = 10.0;     // linear SNR cap
    double epsilon_t = 1e-3;   // error-probability target cap
    channel::RateModel model = channel::RateModel::FiniteBlocklength;
    effcap::EcMethod method = effcap::EcMethod::ClosedForm;
    double rho_min = 1e-2;     // lower end of the line search (-20 dB)
    double grid_step_db = 0.1;
    // When false, candidates violating EC >= lambda are kept (the violation
    // is still reported through SolveResult::feasible).  The figure sweeps
    // use this mode: the reference curves select the EEE maximizer and state
    // the arrival-rate condition without pruning by it.
    bool enforce_arrival_constraint = true;

    void validate() const;
};

struct SolveDiagnostics {
    int grid_points = 0;
    int feasible_points = 0;
    int refine_iterations = 0;
    std::string note;
};

struct SolveResult {
    double rho_star = 0.0;
    double epsilon_star = 0.0;
    double theta_star = 0.0;
    double eee_star = 0.0;
    double ec_star = 0.0;
    double p_nb = 1.0;
    bool feasible = false;
    bool theta_slack = false;
    SolveDiagnostics diagnostics;
};

// Line search over rho with golden-section refinement.  Per candidate:
// P_nb (1 for the full-buffer model), theta from the delay constraint at
// equality, epsilon = min(optimal_epsilon, epsilon_t), then the EEE.
// Candidates violating EC >= lambda are infeasible; when none is feasible
// the best-effort maximizer of the remaining constraint set is returned
// with feasible = false.
SolveResult solve_constrained(const channel::ChannelConfig& cfg,
                              const SolveConstraints& cons);

}  // namespace fbl::optimize
