#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pucci/error.hpp"
#include "pucci/params.hpp"

namespace pucci {

struct RadialState {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

/// Spectrum of the Hessian of a radial function: u'' once and u'/r with multiplicity N−1.
inline std::vector<double> hessian_eigen_radial(const RadialState& s, double ddu, int dim) {
    if (!(s.r > 0.0)) throw OutOfRange("radial Hessian spectrum needs r > 0; use the origin limit");
    std::vector<double> eig(static_cast<std::size_t>(dim), s.du / s.r);
    eig.front() = ddu;
    return eig;
}

/// Origin limit of the spectrum: every eigenvalue equals u''(0).
inline std::vector<double> hessian_eigen_origin(double ddu, int dim) {
    return std::vector<double>(static_cast<std::size_t>(dim), ddu);
}

namespace detail {
// Pucci weight applied to a single eigenvalue.
inline double pucci_weight(const Params& prm, double mu) {
    if (mu > 0.0) return (prm.op == Operator::Plus ? prm.Lambda : prm.lambda) * mu;
    return (prm.op == Operator::Plus ? prm.lambda : prm.Lambda) * mu;
}

inline double signed_power(double u, double p) {
    return u >= 0.0 ? std::pow(u, p) : -std::pow(-u, p);
}
}  // namespace detail

inline double pucci_apply(const Params& prm, std::span<const double> eigs) {
    double acc = 0.0;
    for (double mu : eigs) acc += detail::pucci_weight(prm, mu);
    return acc;
}

/// Solves M±(diag(a, b, ..., b)) = −source for a, where b repeats N−1 times.
///
/// All arguments are in the scale-free form used by the integrator: a = r²u'', b = r u',
/// source = r²|u|^{p−1}u. The operator is strictly increasing in a, so the branch is
/// picked by the sign of the right-hand side and the answer is unique.
inline double solve_scaled(const Params& prm, double b, double source) {
    const double target = -source - (prm.dim - 1) * detail::pucci_weight(prm, b);
    if (target > 0.0) return target / (prm.op == Operator::Plus ? prm.Lambda : prm.lambda);
    return target / (prm.op == Operator::Plus ? prm.lambda : prm.Lambda);
}

/// u'' such that −M±(D²u) = |u|^{p−1}u at a point r > 0.
///
/// Negative u uses the odd extension so that a step may overshoot the first zero.
inline double solve_ddu(const Params& prm, double p, const RadialState& s) {
    if (!(s.r > 0.0)) throw OutOfRange("solve_ddu needs r > 0; the origin is handled by the series start");
    const double r2 = s.r * s.r;
    return solve_scaled(prm, s.r * s.du, r2 * detail::signed_power(s.u, p)) / r2;
}

}  // namespace pucci
