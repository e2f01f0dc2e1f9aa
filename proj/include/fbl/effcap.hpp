#pragma once

// Effective capacity and effective energy efficiency layer: the delay-outage
// map, the closed-form approximation of the fading-averaged service MGF and
// its rho-derivative, both power-consumption models and the Shannon-limit
// comparator.

#include <optional>

#include "fbl/channel.hpp"

namespace fbl::effcap {

enum class BufferMode { FullBuffer, EmptyBufferAware };

// Whether effective capacity comes from the quadrature expectation (Oracle)
// or from the closed-form approximation (ClosedForm).
enum class EcMethod { Oracle, ClosedForm };

struct QosConfig {
    std::optional<double> theta;     // delay exponent, drives QoS when set
    double delay_bound = 0.0;        // delta, maximum delay in symbol periods
    double delay_outage_prob = 0.0;  // Lambda in (0,1)
    double arrival_rate = 0.0;       // lambda in bpcu

    void validate() const;
};

struct PowerModelConfig {
    double zeta = 0.2;           // inverse drain efficiency of the amplifier
    double circuit_power = 0.2;  // P_c in Watts
    BufferMode buffer_mode = BufferMode::FullBuffer;

    void validate() const;
};

// Pieces of the closed-form approximation
//   J = t1 * M(alpha) - t2 * M(alpha - 2)
// where M(a) = E[(1+rho Z)^a], alpha = -n theta / ln 2 and
// beta = theta sqrt(n) Q^{-1}(eps) log2(e); t1 = beta^2/2 + beta + 1 and
// t2 = t1 - 1.  `drho` is dJ/drho.
struct ApproxTerms {
    double alpha = 0.0;
    double beta = 0.0;
    double t1 = 1.0;
    double t2 = 0.0;
    double value = 1.0;
    double drho = 0.0;
};

// Delay-outage probability e^{-theta * ec * delta}.
double delay_outage(double theta, double ec, double delta);

// Closed-form approximation of E_Z[e^{-n theta r}] plus its derivative.
ApproxTerms fading_mgf_terms(const channel::ChannelConfig& cfg, double rho,
                             double theta, double epsilon,
                             channel::RateModel model = channel::RateModel::FiniteBlocklength);

// eps + (1-eps) * J: closed-form service MGF.
double service_mgf_closed_form(const channel::ChannelConfig& cfg, double rho,
                               double theta, double epsilon,
                               channel::RateModel model = channel::RateModel::FiniteBlocklength);

// Effective capacity -log(psi) / (n theta) in bpcu.
double effective_capacity(const channel::ChannelConfig& cfg,
                          const channel::OperatingPoint& point, EcMethod method,
                          channel::RateModel model = channel::RateModel::FiniteBlocklength);

// P_nb = lambda / E[max(r,0)].  Throws infeasible_error when the arrival
// rate exceeds the mean service rate (unstable queue).
double nonempty_buffer_probability(const channel::ChannelConfig& cfg, double rho,
                                   double epsilon, double arrival_rate,
                                   channel::RateModel model = channel::RateModel::FiniteBlocklength);

// Effective energy efficiency in bpcu per Watt.  FullBuffer divides the EC
// by zeta*rho + P_c; EmptyBufferAware scales the amplifier term by P_nb.
double eee(const channel::ChannelConfig& cfg, const QosConfig& qos,
           const PowerModelConfig& pm, const channel::OperatingPoint& point,
           EcMethod method,
           channel::RateModel model = channel::RateModel::FiniteBlocklength);

// Same pipeline with the dispersion term removed (beta = 0 throughout, the
// error probability stays inside the MGF mixture).
double shannon_baseline_eee(const channel::ChannelConfig& cfg, const QosConfig& qos,
                            const PowerModelConfig& pm,
                            const channel::OperatingPoint& point,
                            EcMethod method = EcMethod::ClosedForm);

}  // namespace fbl::effcap
