#pragma once

// Quadrature along stored profiles. Node-aligned Gauss–Kronrod on every dense-output
// interval, the log-radius variable in the far field, and chunked integration of the
// asymptotic tail until it stops contributing.

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pucci/error.hpp"
#include "pucci/integrator.hpp"

namespace pucci {

struct Quadrature {
    double value = 0.0;
    double error = 0.0;

    Quadrature& operator+=(const Quadrature& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
};

/// Surface measure of the unit sphere in R^N.
inline double sphere_measure(int dim) {
    const double n = dim;
    return 2.0 * std::pow(boost::math::constants::pi<double>(), 0.5 * n) / boost::math::tgamma(0.5 * n);
}

template <class F>
Quadrature gauss_kronrod(F&& f, double a, double b, double rel_tol = 1e-10, unsigned max_depth = 8) {
    if (!(b > a)) return {};
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol, &err);
    return {v, err};
}

/// ∫_a^b f(r) dr on panels that are uniform in log r, independent of any profile nodes.
template <class F>
Quadrature integrate_log_panels(F&& f, double a, double b, double rel_tol = 1e-10, int panels_per_e = 4) {
    Quadrature q;
    if (!(b > a)) return q;
    double lo = a;
    if (a <= 0.0) {
        lo = std::min(b, 1e-6 * b);
        q += gauss_kronrod(f, a, lo, rel_tol);
    }
    const int n = std::max(1, static_cast<int>(std::ceil(panels_per_e * std::log(b / lo))));
    const double step = std::log(b / lo) / n;
    for (int i = 0; i < n; ++i) {
        const double x0 = lo * std::exp(step * i);
        const double x1 = i + 1 == n ? b : lo * std::exp(step * (i + 1));
        q += gauss_kronrod(f, x0, x1, rel_tol);
    }
    return q;
}

/// ∫_a^∞ f(r) dr for a smooth integrand with at least power-law decay.
template <class F>
Quadrature integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    const double v = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &err);
    return {v, err};
}

namespace detail {

template <class G>
double profile_integrand(const RadialProfile& prof, G& g, double r) {
    const RadialState s = prof.evaluate(r);
    return g(s.r, s.u, s.du);
}

// ∫ g dr over log-radius interval [t0, t1], in the variable t.
template <class G>
Quadrature integrate_in_log(const RadialProfile& prof, G& g, double t0, double t1, double rel_tol) {
    auto h = [&](double t) {
        const double r = std::exp(t);
        return profile_integrand(prof, g, r) * r;
    };
    return gauss_kronrod(h, t0, t1, rel_tol);
}

}  // namespace detail

/// ∫_a^b g(r, u(r), u'(r)) dr along a stored profile; b may be +∞ when the profile has a tail.
template <class G>
Quadrature integrate_profile(const RadialProfile& prof, double a, double b, G g, double rel_tol = 1e-10) {
    if (!(a >= 0.0) || !(b >= a)) throw OutOfRange("integrate_profile needs 0 <= a <= b");
    const bool to_infinity = std::isinf(b);
    if (to_infinity && !prof.tail) throw OutOfRange("profile has no asymptotic tail; cannot integrate to infinity");
    if (!to_infinity && b > prof.truncation_radius * (1.0 + 1e-13))
        throw OutOfRange("integration limit beyond the stored profile");
    Quadrature total;
    auto rint = [&](double x) { return detail::profile_integrand(prof, g, x); };

    if (a < prof.r_init) total += gauss_kronrod(rint, a, std::min(b, prof.r_init), rel_tol);
    for (const auto& seg : prof.inner) {
        const double lo = std::max(a, seg.lo()), hi = std::min(b, seg.hi());
        if (hi > lo) total += gauss_kronrod(rint, lo, hi, rel_tol);
    }
    const double ta = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    const double tb = std::log(b);
    for (const auto& seg : prof.outer) {
        double lo = std::max(ta, seg.lo()), hi = std::min(tb, seg.hi());
        if (prof.tail) hi = std::min(hi, prof.tail->t_start);
        if (hi > lo) total += detail::integrate_in_log(prof, g, lo, hi, rel_tol);
    }
    if (!prof.tail) return total;

    double t0 = std::max(ta, prof.tail->t_start);
    if (!(tb > t0)) return total;
    constexpr double chunk = 2.0;
    int quiet = 0;
    for (int i = 0; i < 2000 && t0 < tb; ++i) {
        const double t1 = std::min(tb, t0 + chunk);
        const Quadrature piece = detail::integrate_in_log(prof, g, t0, t1, rel_tol);
        total += piece;
        t0 = t1;
        if (std::abs(piece.value) <= 1e-17 * std::abs(total.value)) {
            if (++quiet == 3) {
                if (to_infinity) total.error += std::abs(piece.value);
                return total;
            }
        } else {
            quiet = 0;
        }
    }
    if (to_infinity) throw BudgetExhausted("tail integral did not settle; integrand decays too slowly");
    return total;
}

}  // namespace pucci
