#pragma once

// Dirichlet problem −M±(D²u) = u^p in the unit ball, u = 0 on the boundary.
//
// For subcritical p the shot from height u0 first vanishes at some R_w; the rescaling
// u(r) = s·w(R_w r) with s = R_w^{2/(p−1)} is the unique positive radial solution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pucci/check.hpp"
#include "pucci/critical.hpp"
#include "pucci/error.hpp"
#include "pucci/integrator.hpp"
#include "pucci/quadrature.hpp"
#include "pucci/radial_operator.hpp"

namespace pucci {

struct BallOptions {
    std::optional<double> p_star;  // refuse p ≥ p_star − p_tolerance when known
    double p_tolerance = 0.0;
    double u0 = 1.0;
    double rtol = 1e-14;
    double atol = 1e-16;
};

struct BallSolution {
    Params params;
    double p = 0.0;
    double eps = std::numeric_limits<double>::quiet_NaN();
    double R = 0.0;     // first zero of the normalized shot, M^{(p−1)/2}
    double M = 0.0;     // u(0) = sup u
    double r0 = 0.0;    // inflection radius in (0, 1)
    double du_at_1 = 0.0;
    double residual = 0.0;  // sup relative residual of −M±(D²u) = u^p on [0, 1]
    RadialProfile shot;     // the shot actually integrated, from height shot.u0

    double shot_zero() const { return *shot.events.first_zero; }
    double shot_scale() const { return std::pow(shot_zero(), 2.0 / (p - 1.0)); }

    RadialState state(double r) const {
        if (!(r >= 0.0) || r > 1.0 + 1e-13) throw OutOfRange("ball solution evaluated outside [0, 1]");
        const double rw = shot_zero(), s = shot_scale();
        const RadialState w = shot.evaluate(std::min(r * rw, shot.truncation_radius));
        return {r, s * w.u, s * rw * w.du};
    }
    double u(double r) const { return state(r).u; }
    double du(double r) const { return state(r).du; }
    double ddu(double r) const {
        const double rw = shot_zero();
        return shot_scale() * rw * rw * shot.ddu(std::min(r * rw, shot.truncation_radius));
    }

    /// ũ(ρ) = u(ρ/R)/M on [0, R], extended by zero beyond R.
    RadialState rescaled(double rho) const {
        if (rho >= R) return {rho, 0.0, 0.0};
        const double a = std::pow(shot.u0, (p - 1.0) / 2.0);
        const RadialState w = shot.evaluate(rho / a);
        return {rho, w.u / shot.u0, w.du / (shot.u0 * a)};
    }
    double rescaled_ddu(double rho) const {
        const double a = std::pow(shot.u0, (p - 1.0) / 2.0);
        return shot.ddu(std::min(rho / a, shot.truncation_radius)) / (shot.u0 * a * a);
    }
    double r0_tilde() const { return R * r0; }
};

/// Relative residual of −M±(D²u) = u^p on a uniform grid over (0, 1).
inline double ball_residual(const BallSolution& b, int n = 2000) {
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        const double r = static_cast<double>(i) / n;
        const RadialState s = b.state(r);
        const double ddu = b.ddu(r);
        const auto eig = hessian_eigen_radial(s, ddu, b.params.dim);
        const double lhs = pucci_apply(b.params, eig);
        const double rhs = std::pow(std::max(s.u, 0.0), b.p);
        double scale = rhs;
        for (double mu : eig) scale += std::abs(detail::pucci_weight(b.params, mu));
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs + rhs) / scale);
    }
    return worst;
}

inline BallSolution solve_ball(const Params& prm, double p, const BallOptions& opt = {}) {
    validate(prm);
    if (!(p > 1.0)) throw InvalidParams("exponent p must exceed 1");
    if (opt.p_star) {
        if (p >= *opt.p_star - opt.p_tolerance)
            throw Supercritical("supercritical: no solution for p = " + std::to_string(p) + " >= p* = " +
                                std::to_string(*opt.p_star));
    } else {
        const auto br = exponent_bracket(prm);
        const double ceiling = br.is_exact() ? *br.exact : br.hi;
        if (p >= ceiling)
            throw Supercritical("supercritical: no solution for p = " + std::to_string(p) +
                                " at or above the critical bracket");
    }
    IntegratorConfig cfg;
    cfg.rtol = opt.rtol;
    cfg.atol = opt.atol;
    BallSolution b;
    b.params = prm;
    b.p = p;
    if (opt.p_star) b.eps = *opt.p_star - p;
    b.shot = integrate(prm, p, opt.u0, StopCondition::at_first_zero(), cfg);
    if (!b.shot.events.first_zero)
        throw Supercritical("supercritical: shot does not vanish before r = e^" + std::to_string(cfg.t_cap));
    if (!b.shot.events.inflection) throw OutOfRange("ball shot has no inflection radius");
    const double rw = b.shot_zero();
    b.M = b.shot_scale() * opt.u0;
    b.R = std::pow(b.M, (p - 1.0) / 2.0);
    b.r0 = *b.shot.events.inflection / rw;
    b.du_at_1 = b.shot_scale() * rw * b.shot.nodes.back().du;
    b.residual = ball_residual(b);
    return b;
}

/// Ball solution at p = p* − ε using a computed critical exponent.
inline BallSolution solve_ball_eps(const CriticalResult& crit, double eps, const BallOptions& base = {}) {
    if (!(eps > 0.0)) throw InvalidParams("eps must be positive");
    if (eps < 100.0 * crit.p_tolerance)
        throw InvalidParams("eps below 100 * p_tolerance: indistinguishable from the critical exponent");
    BallOptions opt = base;
    opt.p_star = crit.p_star;
    opt.p_tolerance = crit.p_tolerance;
    return solve_ball(crit.params, crit.p_star - eps, opt);
}

struct Theorem1Row {
    double eps = 0.0;
    double p_eps = 0.0;
    double M = 0.0;
    double R = 0.0;
    double r0 = 0.0;
    double r0_tilde = 0.0;
    double u_r0_over_M = 0.0;
    double du_at_1 = 0.0;
    double scaled_derivative = 0.0;  // M^κ u'(1)
    std::vector<double> sup_outside;  // sup_{r ≥ r1} u for each r1
    std::vector<double> sup_profile_gap;  // sup_{[0,K]} |ũ − U| for each K
    double sup_far_field_gap = 0.0;  // sup_{[0.1,1]} |M^κ u − c1(r^{2−Ñ} − 1)|
    double invariance_gap = 0.0;
    double conv_infinite = 0.0;  // ũ(√R) (√R)^{Ñ−2}
    double conv_half = 0.0;      // ũ(R/2) (R/2)^{Ñ−2}
    double estib_max = 0.0;      // sup of ũ'(ρ) ρ^{Ñ−1} over [r̃0, R]
    double phsp_u = 0.0;         // sup ũ(ρ) ρ^{Ñ−2}
    double phsp_du = 0.0;        // sup |ũ'(ρ)| ρ^{Ñ−1}
    int eqd_violations = 0;
    double residual = 0.0;
};

struct Theorem1Report {
    Params params;
    double p_star = 0.0;
    double c1 = 0.0;
    double R0 = 0.0;
    double U_R0 = 0.0;
    std::vector<double> r1_list{0.1, 0.25, 0.5};
    std::vector<double> K_list{1.0, 5.0, 10.0};
    std::vector<Theorem1Row> rows;
    std::vector<double> excluded_eps;
    std::vector<Check> checks;
};

namespace detail {

inline Theorem1Row theorem1_row(const CriticalResult& crit, const BallSolution& b,
                                const std::vector<double>& r1_list, const std::vector<double>& K_list,
                                double eqd_k) {
    const double nt = crit.dimension_like();
    const double p = b.p;
    Theorem1Row row;
    row.eps = b.eps;
    row.p_eps = p;
    row.M = b.M;
    row.R = b.R;
    row.r0 = b.r0;
    row.r0_tilde = b.r0_tilde();
    row.u_r0_over_M = b.u(b.r0) / b.M;
    row.du_at_1 = b.du_at_1;
    row.residual = b.residual;
    const double kappa = (p * (nt - 2.0) - nt) / 2.0;
    row.scaled_derivative = std::pow(b.M, kappa) * b.du_at_1;

    constexpr int n = 4000;
    for (double r1 : r1_list) {
        double sup = 0.0;
        for (int i = 0; i <= n; ++i) sup = std::max(sup, b.u(r1 + (1.0 - r1) * i / n));
        row.sup_outside.push_back(sup);
    }
    for (double K : K_list) {
        double sup = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double rho = K * i / n;
            sup = std::max(sup, std::abs(b.rescaled(rho).u - crit.profile.u(rho)));
        }
        row.sup_profile_gap.push_back(sup);
    }
    const double mk = std::pow(b.M, kappa);
    for (int i = 0; i <= n; ++i) {
        const double r = 0.1 + 0.9 * i / n;
        row.sup_far_field_gap =
            std::max(row.sup_far_field_gap, std::abs(mk * b.u(r) - crit.c1 * (std::pow(r, 2.0 - nt) - 1.0)));
    }
    const double lam2 = 2.0 / (p - 1.0);
    const double lhs = std::pow(b.r0, lam2) * b.u(b.r0);
    const double rhs = std::pow(row.r0_tilde, lam2) * b.rescaled(row.r0_tilde).u;
    row.invariance_gap = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));

    const double rs = std::sqrt(b.R);
    row.conv_infinite = b.rescaled(rs).u * std::pow(rs, nt - 2.0);
    row.conv_half = b.rescaled(0.5 * b.R).u * std::pow(0.5 * b.R, nt - 2.0);

    // Log grid over [r̃0, R] for the far-field bounds.
    const double a = row.r0_tilde;
    const double u_a = b.rescaled(a).u;
    row.estib_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double rho = a * std::pow(b.R / a, static_cast<double>(i) / n) * (i == n ? 1.0 - 1e-12 : 1.0);
        const RadialState s = b.rescaled(rho);
        row.estib_max = std::max(row.estib_max, s.du * std::pow(rho, nt - 1.0));
        row.phsp_u = std::max(row.phsp_u, s.u * std::pow(rho, nt - 2.0));
        row.phsp_du = std::max(row.phsp_du, std::abs(s.du) * std::pow(rho, nt - 1.0));
        const double bound = sandwich_envelope(u_a, a, eqd_k * std::pow(u_a, 2.0 / (nt - 2.0)), nt, rho);
        if (s.u > 1.1 * bound) ++row.eqd_violations;
    }
    return row;
}

}  // namespace detail

/// Ball solutions along p = p* − ε and the concentration observables, with monotonicity checks.
inline Theorem1Report theorem1_sweep(const CriticalResult& crit, const std::vector<double>& eps_list,
                                     const BallOptions& base = {}) {
    Theorem1Report rep;
    rep.params = crit.params;
    rep.p_star = crit.p_star;
    rep.c1 = crit.c1;
    rep.R0 = crit.R0;
    rep.U_R0 = crit.U_R0;
    const double nt = crit.dimension_like();
    const SandwichConstants sk = sandwich_constants(crit);
    const double eqd_k = sk.upper_k / std::pow(crit.U_R0, 2.0 / (nt - 2.0));

    std::vector<double> eps_sorted = eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
    for (double eps : eps_sorted) {
        if (eps < 10.0 * crit.p_tolerance || eps >= crit.p_star - 1.0 || eps < 100.0 * crit.p_tolerance) {
            rep.excluded_eps.push_back(eps);
            continue;
        }
        const BallSolution b = solve_ball_eps(crit, eps, base);
        rep.rows.push_back(detail::theorem1_row(crit, b, rep.r1_list, rep.K_list, eqd_k));
    }
    if (rep.rows.size() < 2) throw InvalidParams("theorem1 sweep needs at least two admissible eps values");

    auto column = [&](auto f) {
        std::vector<double> v;
        for (const auto& r : rep.rows) v.push_back(f(r));
        return v;
    };
    auto& ch = rep.checks;
    const auto M = column([](const Theorem1Row& r) { return r.M; });
    ch.push_back(check_true("i: M_eps strictly increasing", strictly_increasing(M), M.back()));
    for (std::size_t j = 0; j < rep.r1_list.size(); ++j) {
        const auto s = column([&](const Theorem1Row& r) { return r.sup_outside[j]; });
        ch.push_back(check_true("ii: sup_{r>=" + std::to_string(rep.r1_list[j]) + "} u_eps strictly decreasing",
                                strictly_decreasing(s), s.back() / s.front(), "measured = final/initial"));
        if (rep.r1_list[j] == 0.25)
            ch.push_back(check_at_most("ii: sup_{r>=0.25} u_eps final/initial", s.back() / s.front(), 0.1));
    }
    for (std::size_t j = 0; j < rep.K_list.size(); ++j) {
        const auto s = column([&](const Theorem1Row& r) { return r.sup_profile_gap[j]; });
        ch.push_back(check_true("iii: sup_[0," + std::to_string(rep.K_list[j]) + "] |u~ - U| strictly decreasing",
                                strictly_decreasing(s), s.back()));
    }
    const auto iv = column([](const Theorem1Row& r) { return r.sup_far_field_gap; });
    ch.push_back(check_true("iv: sup_[0.1,1] |M^k u - c1(r^(2-N~) - 1)| strictly decreasing",
                            strictly_decreasing(iv), iv.back()));

    const auto r0t = column([&](const Theorem1Row& r) { return std::abs(r.r0_tilde - crit.R0); });
    ch.push_back(check_true("r0~(eps) -> R0", strictly_decreasing(r0t), r0t.back()));
    const auto ur0 = column([&](const Theorem1Row& r) { return std::abs(r.u_r0_over_M - crit.U_R0); });
    ch.push_back(check_true("u(r0)/M -> U(R0)", strictly_decreasing(ur0), ur0.back()));
    const auto r0 = column([](const Theorem1Row& r) { return r.r0; });
    ch.push_back(check_true("r0(eps) -> 0", strictly_decreasing(r0), r0.back()));

    double inv = 0.0, res = 0.0, estib = -std::numeric_limits<double>::infinity();
    int eqd = 0;
    for (const auto& r : rep.rows) {
        inv = std::max(inv, r.invariance_gap);
        res = std::max(res, r.residual);
        estib = std::max(estib, r.estib_max);
        eqd += r.eqd_violations;
    }
    ch.push_back(check_at_most("invariance identity per eps", inv, 1e-10));
    ch.push_back(check_at_most("ball ODE residual", res, 1e-8));
    ch.push_back(check_true("estib: u~' r^(N~-1) < 0 on [r0~, R]", estib < 0.0, estib));
    ch.push_back(check_at_most("eqd bound violations (10% slack)", eqd, 0.0));
    return rep;
}

/// Limit as ε → 0 of values expanded as v∞ + aε + bε², from the last three iterates.
inline double richardson_limit(const std::vector<double>& eps, const std::vector<double>& v) {
    const std::size_t m = v.size();
    if (m == 0) return std::numeric_limits<double>::quiet_NaN();
    if (m < 3) return v.back();
    const double e0 = eps[m - 3], e1 = eps[m - 2], e2 = eps[m - 1];
    const double a1 = (e0 * v[m - 2] - e1 * v[m - 3]) / (e0 - e1);
    const double a2 = (e1 * v[m - 1] - e2 * v[m - 2]) / (e1 - e2);
    return a2 + (a2 - a1) * e2 / (e0 - e2);
}

struct DerivativeLimitReport {
    std::vector<double> eps;
    std::vector<double> scaled_derivative;
    std::vector<double> cauchy;           // |D_{k} − D_{k−1}|
    double extrapolated = 0.0;
    double exact_limit = 0.0;             // −(Ñ−2) c1
    double integrated_identity = 0.0;     // U'(R0) R0^{Ñ−1} − (1/ell) ∫_{R0}^∞ U^p r^{Ñ−1} dr
    double alt_limit = 0.0;         // −U(R0)^p R0^Ñ/ell − (1/ell) ∫ ..., without the (Ñ−1)
    double integral_term = 0.0;
    std::vector<Check> checks;
};

/// Limit of M^κ u'(1) along the ε-sweep against the integrated identity on U.
inline DerivativeLimitReport derivative_limit_sweep(const CriticalResult& crit, const std::vector<double>& eps_list,
                                                    const BallOptions& base = {}) {
    DerivativeLimitReport rep;
    const double nt = crit.dimension_like();
    const double ell = crit.params.outer_coef();
    const double p = crit.p_star;
    std::vector<double> eps_sorted = eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
    for (double eps : eps_sorted) {
        if (eps < 100.0 * crit.p_tolerance) continue;
        const BallSolution b = solve_ball_eps(crit, eps, base);
        const double kappa = (b.p * (nt - 2.0) - nt) / 2.0;
        rep.eps.push_back(eps);
        rep.scaled_derivative.push_back(std::pow(b.M, kappa) * b.du_at_1);
    }
    const auto& D = rep.scaled_derivative;
    for (std::size_t i = 1; i < D.size(); ++i) rep.cauchy.push_back(std::abs(D[i] - D[i - 1]));

    const Quadrature tail =
        integrate_profile(crit.profile, crit.R0, std::numeric_limits<double>::infinity(),
                          [&](double r, double u, double) { return std::pow(std::max(u, 0.0), p) * std::pow(r, nt - 1.0); });
    rep.integral_term = tail.value / ell;
    const RadialState at_r0 = crit.profile.evaluate(crit.R0);
    rep.integrated_identity = at_r0.du * std::pow(crit.R0, nt - 1.0) - rep.integral_term;
    rep.alt_limit = -std::pow(at_r0.u, p) * std::pow(crit.R0, nt) / ell - rep.integral_term;
    rep.exact_limit = -(nt - 2.0) * crit.c1;

    rep.extrapolated = richardson_limit(rep.eps, D);

    rep.checks.push_back(check_true("scaled derivative negative", !D.empty() && D.back() < 0.0, D.empty() ? 0.0 : D.back()));
    rep.checks.push_back(check_true("Cauchy differences decreasing", strictly_decreasing(rep.cauchy),
                                    rep.cauchy.empty() ? 0.0 : rep.cauchy.back()));
    const double gap = std::abs(rep.integrated_identity - rep.exact_limit) / std::abs(rep.exact_limit);
    rep.checks.push_back(check_at_most("integrated identity equals -(N~-2) c1", gap, 1e-6));
    return rep;
}

}  // namespace pucci
