#include "fbl/effcap.hpp"

#include <cmath>
#include <stdexcept>

namespace fbl::effcap {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kLn2 = 0.69314718055994530942;

}  // namespace

void QosConfig::validate() const {
    const bool pair_given = delay_bound > 0.0 || delay_outage_prob > 0.0;
    if (theta.has_value()) {
        if (!(*theta >= 0.0))
            throw std::invalid_argument("QosConfig: theta must be >= 0");
    } else if (!pair_given) {
        throw std::invalid_argument(
            "QosConfig: either theta or the (delay_bound, delay_outage_prob) pair is required");
    }
    if (pair_given) {
        if (!(delay_bound > 0.0))
            throw std::invalid_argument("QosConfig: delay_bound must be positive");
        if (!(delay_outage_prob > 0.0 && delay_outage_prob < 1.0))
            throw std::invalid_argument("QosConfig: delay_outage_prob must lie in (0,1)");
    }
    if (!(arrival_rate > 0.0))
        throw std::invalid_argument("QosConfig: arrival_rate must be positive");
}

void PowerModelConfig::validate() const {
    if (!(zeta > 0.0))
        throw std::invalid_argument("PowerModelConfig: zeta must be positive");
    if (!(circuit_power >= 0.0))
        throw std::invalid_argument("PowerModelConfig: circuit_power must be >= 0");
}

double delay_outage(double theta, double ec, double delta) {
    if (!(theta >= 0.0 && ec >= 0.0 && delta >= 0.0))
        throw std::domain_error("delay_outage: arguments must be nonnegative");
    return std::exp(-theta * ec * delta);
}

ApproxTerms fading_mgf_terms(const channel::ChannelConfig& cfg, double rho,
                             double theta, double epsilon,
                             channel::RateModel model) {
    cfg.validate();
    if (!(theta > 0.0))
        throw std::domain_error("fading_mgf_terms: theta must be positive");
    if (!(rho > 0.0))
        throw std::domain_error("fading_mgf_terms: rho must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("fading_mgf_terms: epsilon must lie in (0,1)");

    const double n = cfg.blocklength;
    ApproxTerms terms;
    terms.alpha = -theta * n / kLn2;
    terms.beta = (model == channel::RateModel::ShannonLimit)
                     ? 0.0
                     : theta * std::sqrt(n) * specfun::gaussian_q_inv(epsilon) * kLog2E;
    terms.t2 = 0.5 * terms.beta * terms.beta + terms.beta;
    terms.t1 = terms.t2 + 1.0;

    const double m0 = specfun::scaled_gamma_combo(terms.alpha, rho);
    const double m2 = specfun::scaled_gamma_combo(terms.alpha - 2.0, rho);
    terms.value = terms.t1 * m0 - terms.t2 * m2;

    // dJ/drho from the chain rule and dGamma(s,x)/dx = -x^{s-1} e^{-x}; both
    // exponential prefactors cancel against the scaled moments:
    //   J' = (alpha/rho) J + (1 - J)/rho^2 + (2 t2 / rho) M(alpha-2).
    terms.drho = (terms.alpha / rho) * terms.value +
                 (1.0 - terms.value) / (rho * rho) +
                 2.0 * terms.t2 * m2 / rho;
    return terms;
}

double service_mgf_closed_form(const channel::ChannelConfig& cfg, double rho,
                               double theta, double epsilon,
                               channel::RateModel model) {
    if (rho <= 0.0) return 1.0;
    const ApproxTerms terms = fading_mgf_terms(cfg, rho, theta, epsilon, model);
    return epsilon + (1.0 - epsilon) * terms.value;
}

double effective_capacity(const channel::ChannelConfig& cfg,
                          const channel::OperatingPoint& point, EcMethod method,
                          channel::RateModel model) {
    point.validate();
    if (!(point.theta > 0.0))
        throw std::domain_error("effective_capacity: theta must be positive");

    const double psi =
        (method == EcMethod::Oracle)
            ? channel::service_mgf_quadrature(cfg, point.rho, point.epsilon,
                                              point.theta, model)
            : service_mgf_closed_form(cfg, point.rho, point.theta, point.epsilon,
                                      model);
    if (!(psi > 0.0) || !std::isfinite(psi))
        throw evaluation_error("effective_capacity: service MGF not positive");
    return -std::log(psi) / (cfg.blocklength * point.theta);
}

double nonempty_buffer_probability(const channel::ChannelConfig& cfg, double rho,
                                   double epsilon, double arrival_rate,
                                   channel::RateModel model) {
    if (!(arrival_rate > 0.0))
        throw std::domain_error("nonempty_buffer_probability: arrival_rate must be positive");
    const double mean_rate = channel::expected_rate(cfg, rho, epsilon, model);
    if (!(mean_rate > arrival_rate))
        throw infeasible_error(
            "nonempty_buffer_probability: arrival rate exceeds mean service rate "
            "(unstable queue)");
    return arrival_rate / mean_rate;
}

double eee(const channel::ChannelConfig& cfg, const QosConfig& qos,
           const PowerModelConfig& pm, const channel::OperatingPoint& point,
           EcMethod method, channel::RateModel model) {
    qos.validate();
    pm.validate();
    if (point.rho == 0.0) return 0.0;

    const double ec = effective_capacity(cfg, point, method, model);
    double denom;
    if (pm.buffer_mode == BufferMode::EmptyBufferAware) {
        const double p_nb = nonempty_buffer_probability(cfg, point.rho, point.epsilon,
                                                        qos.arrival_rate, model);
        denom = p_nb * pm.zeta * point.rho + pm.circuit_power;
    } else {
        denom = pm.zeta * point.rho + pm.circuit_power;
    }
    if (!(denom > 0.0))
        throw std::domain_error("eee: total consumed power must be positive");
    return ec / denom;
}

double shannon_baseline_eee(const channel::ChannelConfig& cfg, const QosConfig& qos,
                            const PowerModelConfig& pm,
                            const channel::OperatingPoint& point, EcMethod method) {
    return eee(cfg, qos, pm, point, method, channel::RateModel::ShannonLimit);
}

}  // namespace fbl::effcap
