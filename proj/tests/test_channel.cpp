#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbl/channel.hpp"
#include "oracles.hpp"

using namespace fbl;
using namespace fbl::channel;

namespace {

const ChannelConfig kCfg{500, FadingLaw::RayleighUnitMean};

double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("achievable_rate: anchors") {
    // zero channel gain: both terms vanish
    CHECK(achievable_rate(kCfg, 10.0, 0.0, 1e-3, false) == 0.0);
    CHECK(achievable_rate(kCfg, 123.0, 0.0, 0.4, false) == 0.0);

    // median error probability kills the dispersion term
    CHECK(achievable_rate(kCfg, 10.0, 1.0, 0.5, false) ==
          doctest::Approx(std::log2(11.0)).epsilon(1e-13));

    // dispersion penalty assembled from oracle pieces
    {
        const double qinv = oracles::q_inverse_by_bisection(1e-3);
        const double want = std::log2(11.0) -
                            qinv * std::log2(std::exp(1.0)) / std::sqrt(500.0) *
                                std::sqrt(1.0 - 1.0 / 121.0);
        const double got = achievable_rate(kCfg, 10.0, 1.0, 1e-3, false);
        CHECK(rel_err(got, want) < 1e-9);
        CHECK(got == doctest::Approx(3.2609).epsilon(2e-4));  // frozen
    }

    // clamping floors the low-gain dip at zero
    {
        const double z = 1e-4;
        CHECK(achievable_rate(kCfg, 10.0, z, 1e-3, false) < 0.0);
        CHECK(achievable_rate(kCfg, 10.0, z, 1e-3, true) == 0.0);
    }

    CHECK_THROWS_AS(achievable_rate(kCfg, 10.0, -1.0, 1e-3, false), std::domain_error);
}

TEST_CASE("achievable_rate: monotonicity and Shannon dominance") {
    for (double eps : {1e-4, 1e-2, 0.3}) {
        double prev = -1e9;
        for (double z = 0.0; z <= 5.0; z += 0.05) {
            const double r = achievable_rate(kCfg, 10.0, z, eps, false);
            CHECK(r >= prev - 1e-12);  // nondecreasing in z
            prev = r;
        }
        prev = -1e9;
        for (double rho = 0.0; rho <= 50.0; rho += 0.5) {
            const double r = achievable_rate(kCfg, rho, 1.3, eps, false);
            CHECK(r >= prev - 1e-12);  // nondecreasing in rho
            prev = r;
        }
    }
    // nonincreasing in eps below 1/2, never above the Shannon term
    for (double z : {0.2, 1.0, 4.0}) {
        double prev = -1e9;
        for (double eps : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 0.4999}) {
            const double r = achievable_rate(kCfg, 10.0, z, eps, false);
            CHECK(r >= prev - 1e-12);
            CHECK(r <= std::log2(1.0 + 10.0 * z) + 1e-12);
            prev = r;
        }
    }
}

TEST_CASE("rate_zero_crossing brackets the sign change") {
    for (double eps : {1e-5, 1e-3, 0.1}) {
        for (double rho : {0.05, 1.0, 10.0, 300.0}) {
            const double z0 = rate_zero_crossing(kCfg, rho, eps);
            CHECK(z0 > 0.0);
            CHECK(std::abs(achievable_rate(kCfg, rho, z0, eps, false)) < 1e-9);
            CHECK(achievable_rate(kCfg, rho, z0 * 0.9, eps, false) < 0.0);
            CHECK(achievable_rate(kCfg, rho, z0 * 1.1, eps, false) > 0.0);
        }
    }
    CHECK(rate_zero_crossing(kCfg, 10.0, 0.5) == 0.0);
    CHECK(rate_zero_crossing(kCfg, 10.0, 0.7) == 0.0);
    CHECK(rate_zero_crossing(kCfg, 0.0, 1e-3) == 0.0);
}

TEST_CASE("expected_rate: anchors and oracles") {
    CHECK(expected_rate(kCfg, 0.0, 1e-3) == 0.0);

    // eps = 1/2: no dispersion, E[log2(1+rho Z)] has the exponential-integral
    // closed form; frozen from that independent route
    {
        const double got = expected_rate(kCfg, 10.0, 0.5);
        const double e1 = oracles::adaptive_simpson(
            [](double t) { return std::exp(-t) / t; }, 0.1, 60.0, 1e-14);
        const double want = std::exp(0.1) * e1 / std::log(2.0);
        CHECK(rel_err(got, want) < 1e-8);
        CHECK(got == doctest::Approx(2.906512).epsilon(1e-6));
    }

    // positive dispersion penalty for eps < 1/2
    CHECK(expected_rate(kCfg, 10.0, 1e-3) < expected_rate(kCfg, 10.0, 0.5));

    // Monte Carlo oracle for the clamped mean rate
    {
        specfun::RandomStream stream(1234);
        const std::size_t n = 1000000;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r =
                achievable_rate(kCfg, 10.0, stream.next_exponential(), 1e-3, true);
            sum += r;
            sumsq += r * r;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sumsq / n - mean * mean) / n);
        CHECK(std::abs(expected_rate(kCfg, 10.0, 1e-3) - mean) < 3.0 * se);
    }

    // Shannon model drops the penalty entirely
    CHECK(expected_rate(kCfg, 10.0, 1e-3, RateModel::ShannonLimit) ==
          doctest::Approx(expected_rate(kCfg, 10.0, 0.5)).epsilon(1e-12));
}

TEST_CASE("expected_rate_rho_derivative matches finite differences") {
    // FD of expected_rate carries the order-escalation noise of its
    // dispersion quadrature, so the band is wider than the FD truncation.
    for (double rho : {0.5, 10.0, 80.0}) {
        for (double eps : {1e-3, 0.2}) {
            const double h = 1e-3 * rho;
            const double fd = (expected_rate(kCfg, rho + h, eps) -
                               expected_rate(kCfg, rho - h, eps)) /
                              (2.0 * h);
            const double got = expected_rate_rho_derivative(kCfg, rho, eps);
            CHECK(rel_err(got, fd) < 2e-3);
        }
    }
}

TEST_CASE("service MGF: limits and the quadrature/Monte Carlo oracle pair") {
    // integrand collapses to 1
    CHECK(service_mgf_quadrature(kCfg, 0.0, 1e-3, 0.01) == 1.0);
    CHECK(std::abs(service_mgf_quadrature(kCfg, 10.0, 1.0 - 1e-9, 0.01) - 1.0) < 1e-6);

    // ground-truth pair at the reference point
    {
        const double q = service_mgf_quadrature(kCfg, 10.0, 1e-3, 0.01);
        specfun::RandomStream stream(5150);
        const auto mc = service_mgf_monte_carlo(kCfg, 10.0, 1e-3, 0.01, stream, 1000000);
        CHECK(std::abs(q - mc.mean) < 3.0 * mc.std_error);
        CHECK(q == doctest::Approx(0.0261283).epsilon(1e-4));  // frozen
    }

    CHECK_THROWS_AS(service_mgf_quadrature(kCfg, 10.0, 1e-3, 0.0), std::domain_error);
    specfun::RandomStream stream(1);
    CHECK_THROWS_AS(service_mgf_monte_carlo(kCfg, 10.0, 1e-3, 0.01, stream, 0),
                    std::domain_error);
}

TEST_CASE("service MGF: monotone in rho and theta, convex in eps") {
    // decreasing in rho
    double prev = 2.0;
    for (double db = -10.0; db <= 20.0; db += 1.0) {
        const double psi =
            service_mgf_quadrature(kCfg, std::pow(10.0, db / 10.0), 1e-3, 0.01);
        CHECK(psi < prev);
        prev = psi;
    }
    // decreasing in theta at practical SNR (the positive-rate mass dominates
    // the mixture, so a larger exponent shrinks the MGF and the EC with it)
    prev = 2.0;
    for (double theta : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const double psi = service_mgf_quadrature(kCfg, 10.0, 1e-3, theta);
        CHECK(psi < prev);
        prev = psi;
    }
    // convex in eps: three-point second difference stays nonnegative
    for (double theta : {0.005, 0.05}) {
        const double step = 0.02;
        std::vector<double> vals;
        for (double eps = 0.01; eps <= 0.99 + 1e-9; eps += step)
            vals.push_back(service_mgf_quadrature(kCfg, 10.0, eps, theta));
        for (std::size_t i = 1; i + 1 < vals.size(); ++i)
            CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-9);
    }
}

TEST_CASE("service MGF: quadrature agrees with Monte Carlo on random draws") {
    specfun::RandomStream param_stream(31337);
    int checked = 0;
    while (checked < 20) {
        const double rho = std::pow(10.0, -1.0 + 3.0 * param_stream.next_uniform());
        const double theta = std::pow(10.0, -3.0 + 2.0 * param_stream.next_uniform());
        const double eps = std::pow(10.0, -5.0 + 4.0 * param_stream.next_uniform());
        const int n = 200 + static_cast<int>(800 * param_stream.next_uniform());
        const ChannelConfig cfg{n, FadingLaw::RayleighUnitMean};

        const double q = service_mgf_quadrature(cfg, rho, eps, theta);
        specfun::RandomStream mc_stream(1000 + checked);
        const auto mc = service_mgf_monte_carlo(cfg, rho, eps, theta, mc_stream, 1000000);
        CHECK(std::abs(q - mc.mean) < 3.0 * mc.std_error + 1e-12);
        ++checked;
    }
}
