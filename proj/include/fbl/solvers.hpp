#pragma once

// Scalar bracketing solvers: golden-section extremum search and a Brent-style
// derivative-free root finder.

#include <cmath>
#include <optional>
#include <utility>

#include "fbl/errors.hpp"

namespace fbl::solvers {

struct ScalarResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Minimizes f over [lo, hi] to absolute tolerance xtol.  Monotone objectives
// converge to the matching endpoint.
template <class F>
ScalarResult golden_section_minimize(F&& f, double lo, double hi, double xtol,
                                     int max_iter = 400) {
    constexpr double kInvPhi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    ScalarResult res;
    while (res.iterations < max_iter && (b - a) > xtol) {
        ++res.iterations;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    res.converged = (b - a) <= xtol;
    if (fc <= fd) {
        res.x = c;
        res.fx = fc;
    } else {
        res.x = d;
        res.fx = fd;
    }
    return res;
}

template <class F>
ScalarResult golden_section_maximize(F&& f, double lo, double hi, double xtol,
                                     int max_iter = 400) {
    auto neg = [&](double x) { return -f(x); };
    ScalarResult res = golden_section_minimize(neg, lo, hi, xtol, max_iter);
    res.fx = -res.fx;
    return res;
}

// Scans [lo, hi] on a uniform grid and returns the first cell whose endpoint
// values change sign.
template <class F>
std::optional<std::pair<double, double>> bracket_sign_change(F&& f, double lo,
                                                             double hi,
                                                             int scan_points) {
    double xa = lo;
    double fa = f(xa);
    for (int i = 1; i <= scan_points; ++i) {
        const double xb = lo + (hi - lo) * i / scan_points;
        const double fb = f(xb);
        if (fa == 0.0) return std::make_pair(xa, xa);
        if (fa * fb < 0.0) return std::make_pair(xa, xb);
        xa = xb;
        fa = fb;
    }
    return std::nullopt;
}

// Brent's method: bisection/secant/inverse-quadratic on a sign-changing
// bracket.  Throws evaluation_error if the bracket does not change sign.
template <class F>
ScalarResult brent_root(F&& f, double a, double b, double xtol_rel = 1e-13,
                        int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if (fa * fb > 0.0)
        throw evaluation_error("brent_root: bracket endpoints must change sign");

    double c = a, fc = fa;
    double d = b - a, e = d;
    ScalarResult res;
    for (int it = 0; it < max_iter; ++it) {
        ++res.iterations;
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * xtol_rel * std::abs(b) + 1e-300;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) {
            res.x = b;
            res.fx = fb;
            res.converged = true;
            return res;
        }
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    res.x = b;
    res.fx = fb;
    res.converged = false;
    return res;
}

}  // namespace fbl::solvers
