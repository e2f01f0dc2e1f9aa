#include "fbl/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fbl::channel {

namespace {

constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
constexpr double kLn2 = 0.69314718055994530942;

double sqrt_gamma_term(double rho, double z) {
    // sqrt(1 - (1+rho z)^{-2}) evaluated without cancellation near z = 0
    const double u = 1.0 + rho * z;
    const double t = rho * z * (2.0 + rho * z);  // u^2 - 1
    return std::sqrt(t) / u;
}

}  // namespace

void ChannelConfig::validate() const {
    if (blocklength < 2)
        throw std::invalid_argument("ChannelConfig: blocklength must be >= 2");
}

void OperatingPoint::validate() const {
    if (!(rho >= 0.0))
        throw std::invalid_argument("OperatingPoint: rho must be >= 0");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("OperatingPoint: epsilon must lie in (0,1)");
    if (!(theta >= 0.0))
        throw std::invalid_argument("OperatingPoint: theta must be >= 0");
}

double dispersion_coefficient(const ChannelConfig& cfg, double epsilon) {
    cfg.validate();
    return specfun::gaussian_q_inv(epsilon) * kLog2E /
           std::sqrt(static_cast<double>(cfg.blocklength));
}

double achievable_rate(const ChannelConfig& cfg, double rho, double z,
                       double epsilon, bool clamp, RateModel model) {
    if (!(z >= 0.0))
        throw std::domain_error("achievable_rate: z must be >= 0");
    const double shannon = std::log2(1.0 + rho * z);
    double r = shannon;
    if (model == RateModel::FiniteBlocklength)
        r -= dispersion_coefficient(cfg, epsilon) * sqrt_gamma_term(rho, z);
    return clamp ? std::max(r, 0.0) : r;
}

double rate_zero_crossing(const ChannelConfig& cfg, double rho, double epsilon,
                          RateModel model) {
    if (model == RateModel::ShannonLimit || rho <= 0.0) return 0.0;
    const double c = dispersion_coefficient(cfg, epsilon);
    if (c <= 0.0) return 0.0;  // eps >= 0.5: rate nonnegative everywhere

    auto rate = [&](double z) {
        return std::log2(1.0 + rho * z) - c * sqrt_gamma_term(rho, z);
    };

    // The rate dips negative just above z = 0 and crosses back once.  Find a
    // point inside the dip by halving, then expand right until positive.
    double z_neg = 0.0;
    for (double z = 1.0; z > 1e-300; z *= 0.5) {
        if (rate(z) < 0.0) {
            z_neg = z;
            break;
        }
    }
    if (z_neg == 0.0) return 0.0;  // dip below floating-point resolution

    double z_pos = std::max(1.0, 2.0 * z_neg);
    while (rate(z_pos) <= 0.0) {
        z_pos *= 2.0;
        if (z_pos > 1e12)
            throw evaluation_error("rate_zero_crossing: no positive-rate region");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (z_neg + z_pos);
        (rate(mid) < 0.0 ? z_neg : z_pos) = mid;
        if (z_pos - z_neg <= 1e-15 * z_pos) break;
    }
    return 0.5 * (z_neg + z_pos);
}

namespace {

// integral_{z0}^inf log2(1+rho z) e^{-z} dz, exact through E1:
//   e^{-z0} [ log2(1+rho z0) + e^{Z} E1(Z) / ln 2 ],  Z = z0 + 1/rho.
double log_part_from(double rho, double z0) {
    const double scaled = specfun::exponential_integral_e1_scaled(z0 + 1.0 / rho);
    return std::exp(-z0) * (std::log2(1.0 + rho * z0) + scaled / kLn2);
}

// integral_{z0}^inf sqrt(1-(1+rho z)^{-2}) e^{-z} dz via the shifted rule.
double gamma_part_from(double rho, double z0) {
    const double val = specfun::exp_weight_expectation(
        [&](double u) { return sqrt_gamma_term(rho, z0 + u); });
    return std::exp(-z0) * val;
}

double expected_rate_impl(const ChannelConfig& cfg, double rho, double epsilon,
                          RateModel model, bool clamp) {
    cfg.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("expected_rate: epsilon must lie in (0,1)");
    if (!(rho >= 0.0))
        throw std::domain_error("expected_rate: rho must be >= 0");
    if (rho == 0.0) return 0.0;

    const double z0 = clamp ? rate_zero_crossing(cfg, rho, epsilon, model) : 0.0;
    double value = log_part_from(rho, z0);
    if (model == RateModel::FiniteBlocklength) {
        const double c = dispersion_coefficient(cfg, epsilon);
        if (c != 0.0) value -= c * gamma_part_from(rho, z0);
    }
    return value;
}

}  // namespace

double expected_rate(const ChannelConfig& cfg, double rho, double epsilon,
                     RateModel model) {
    return expected_rate_impl(cfg, rho, epsilon, model, true);
}

double expected_rate_unclamped(const ChannelConfig& cfg, double rho, double epsilon,
                               RateModel model) {
    return expected_rate_impl(cfg, rho, epsilon, model, false);
}

double expected_rate_rho_derivative(const ChannelConfig& cfg, double rho,
                                    double epsilon, RateModel model) {
    cfg.validate();
    if (!(rho > 0.0))
        throw std::domain_error("expected_rate_rho_derivative: rho must be positive");
    const double c = (model == RateModel::FiniteBlocklength)
                         ? dispersion_coefficient(cfg, epsilon)
                         : 0.0;
    const double z0 = rate_zero_crossing(cfg, rho, epsilon, model);
    auto drate = [&](double z) {
        const double u = 1.0 + rho * z;
        double d = z / (u * kLn2);
        if (c != 0.0) {
            const double g = sqrt_gamma_term(rho, z);
            if (g > 0.0) d -= c * z / (u * u * u * g);
        }
        return d;
    };
    return std::exp(-z0) *
           specfun::exp_weight_expectation([&](double u) { return drate(z0 + u); });
}

namespace {

// psi integrand at one fading realization.
double mgf_integrand(const ChannelConfig& cfg, double rho, double epsilon,
                     double theta, RateModel model, double z) {
    const double n = cfg.blocklength;
    const double r = achievable_rate(cfg, rho, z, epsilon, false, model);
    return epsilon + (1.0 - epsilon) * std::exp(-n * theta * r);
}

// Composite quadrature: z = t^2 on [0,1] (the dispersion term behaves like
// sqrt(z) there, smooth in t) plus a shifted exponential-weight tail on
// [1, inf).  Both parts at the requested order.
double mgf_quadrature_order(const ChannelConfig& cfg, double rho, double epsilon,
                            double theta, RateModel model, int order) {
    const auto& leg = specfun::legendre01_rule(order);
    double head = 0.0;
    for (std::size_t i = 0; i < leg.size(); ++i) {
        const double t = leg.nodes[i];
        const double z = t * t;
        head += leg.weights[i] * 2.0 * t * std::exp(-z) *
                mgf_integrand(cfg, rho, epsilon, theta, model, z);
    }
    const double tail =
        std::exp(-1.0) *
        specfun::exp_weight_quadrature(
            [&](double u) {
                return mgf_integrand(cfg, rho, epsilon, theta, model, 1.0 + u);
            },
            specfun::exp_weight_rule(order));
    return head + tail;
}

}  // namespace

double service_mgf_quadrature(const ChannelConfig& cfg, double rho,
                              double epsilon, double theta, RateModel model) {
    cfg.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("service_mgf: epsilon must lie in (0,1)");
    if (!(theta > 0.0))
        throw std::domain_error("service_mgf: theta must be positive");
    if (rho <= 0.0) return 1.0;  // zero rate: integrand is identically 1

    const double lo = mgf_quadrature_order(cfg, rho, epsilon, theta, model, 64);
    const double hi = mgf_quadrature_order(cfg, rho, epsilon, theta, model, 128);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    return (std::abs(hi - lo) > 1e-9 * scale) ? hi : lo;
}

MonteCarloEstimate service_mgf_monte_carlo(const ChannelConfig& cfg, double rho,
                                           double epsilon, double theta,
                                           specfun::RandomStream& stream,
                                           std::size_t count, RateModel model) {
    cfg.validate();
    if (count == 0)
        throw std::domain_error("service_mgf_monte_carlo: count must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("service_mgf: epsilon must lie in (0,1)");
    if (!(theta > 0.0))
        throw std::domain_error("service_mgf: theta must be positive");

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double z = stream.next_exponential();
        const double v = mgf_integrand(cfg, rho, epsilon, theta, model, z);
        sum += v;
        sumsq += v * v;
    }
    MonteCarloEstimate est;
    est.count = count;
    est.mean = sum / static_cast<double>(count);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(count) - est.mean * est.mean);
    est.std_error = std::sqrt(var / static_cast<double>(count));
    return est;
}

}  // namespace fbl::channel
