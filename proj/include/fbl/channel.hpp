#pragma once

// Quasi-static Rayleigh block-fading link at finite blocklength: the
// normal-approximation achievable rate, its clamped expectation (mean
// service rate) and the fading-averaged service MGF
// psi = E_Z[eps + (1-eps) e^{-n theta r(Z)}].

#include <cstddef>

#include "fbl/specfun.hpp"

namespace fbl::channel {

enum class FadingLaw { RayleighUnitMean };

// Which rate expression drives the link: the finite-blocklength normal
// approximation, or the Shannon term alone (dispersion penalty removed).
enum class RateModel { FiniteBlocklength, ShannonLimit };

struct ChannelConfig {
    int blocklength = 500;  // symbols per packet, n >= 2
    FadingLaw fading = FadingLaw::RayleighUnitMean;

    void validate() const;
};

struct OperatingPoint {
    double rho = 0.0;      // linear SNR, >= 0
    double epsilon = 0.0;  // decode-error probability in (0,1)
    double theta = 0.0;    // delay exponent per symbol, >= 0

    void validate() const;
};

// Q^{-1}(eps) * log2(e) / sqrt(n): the weight of the dispersion term.
double dispersion_coefficient(const ChannelConfig& cfg, double epsilon);

// r = log2(1+rho z) - c(eps) sqrt(1 - (1+rho z)^{-2}), optionally clamped
// at zero.  The Shannon model drops the dispersion term.
double achievable_rate(const ChannelConfig& cfg, double rho, double z,
                       double epsilon, bool clamp,
                       RateModel model = RateModel::FiniteBlocklength);

// Largest z at which the unclamped rate crosses zero (0 when the rate is
// nonnegative everywhere).
double rate_zero_crossing(const ChannelConfig& cfg, double rho, double epsilon,
                          RateModel model = RateModel::FiniteBlocklength);

// E_Z[max(r,0)]: mean service rate feeding the queue model.  The logarithmic
// part integrates in closed form through the exponential integral; the
// dispersion part uses the exponential-weight rule on the shifted domain.
double expected_rate(const ChannelConfig& cfg, double rho, double epsilon,
                     RateModel model = RateModel::FiniteBlocklength);

// E_Z[r] without clamping (the theta -> 0 limit of the effective capacity
// is (1-eps) times this value).
double expected_rate_unclamped(const ChannelConfig& cfg, double rho, double epsilon,
                               RateModel model = RateModel::FiniteBlocklength);

// d/drho of expected_rate.  The boundary term vanishes because the rate is
// zero at the clamp point, so this is the expectation of the pointwise
// derivative over the positive-rate region.
double expected_rate_rho_derivative(const ChannelConfig& cfg, double rho,
                                    double epsilon,
                                    RateModel model = RateModel::FiniteBlocklength);

// psi(rho, theta, eps) = E_Z[eps + (1-eps) e^{-n theta r}] with r unclamped.
// Deterministic composite quadrature (substituted panel near zero plus a
// shifted exponential-weight tail) with a doubled-order self check.
double service_mgf_quadrature(const ChannelConfig& cfg, double rho,
                              double epsilon, double theta,
                              RateModel model = RateModel::FiniteBlocklength);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

// Same expectation by seeded Monte Carlo over the fading law.
MonteCarloEstimate service_mgf_monte_carlo(const ChannelConfig& cfg, double rho,
                                           double epsilon, double theta,
                                           specfun::RandomStream& stream,
                                           std::size_t count,
                                           RateModel model = RateModel::FiniteBlocklength);

}  // namespace fbl::channel
