#pragma once

// Pohozaev functionals, the integral characterization of p*, the two-sided bounds on U,
// and the weighted energies.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pucci/ball.hpp"
#include "pucci/check.hpp"
#include "pucci/critical.hpp"
#include "pucci/quadrature.hpp"

namespace pucci {

// ---------------------------------------------------------------------------------------------
// Pohozaev functionals on [R0, ∞)

struct PohozaevSample {
    double r = 0.0;
    double H = 0.0;
    double dH_analytic = 0.0;
    double dH_numeric = 0.0;
};

struct PohozaevCurve {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<PohozaevSample> samples;
    double max_gap = 0.0;  // max |H'_analytic − H'_numeric|
    double scale = 0.0;    // max over the grid of the H' term magnitudes plus |H terms| / r
    double worst_r = 0.0;
};

struct PohozaevPair {
    std::string name;
    double alpha = 0.0;
    double beta = 0.0;
};

/// The two pairs used for the bounds on U and for the integral identity, plus (0, 0).
inline std::vector<PohozaevPair> pohozaev_pairs(const CriticalResult& crit) {
    const double nt = crit.dimension_like();
    const double ell = crit.params.outer_coef();
    const double p = crit.p_star;
    return {{"bounds", (nt - 2.0) * (p + 1.0) / (ell * nt), nt - 2.0},
            {"identity", 2.0 / ell, nt - 2.0},
            {"plain", 0.0, 0.0}};
}

namespace detail {

struct PohozaevForm {
    double nt, p, ell, alpha, beta;

    double H(double r, double u, double du) const {
        return std::pow(r, nt) * (du * du + alpha / (p + 1.0) * std::pow(u, p + 1.0)) +
               beta * std::pow(r, nt - 1.0) * du * u;
    }
    std::array<double, 3> dH_terms(double r, double u, double du) const {
        return {(2.0 + beta - nt) * std::pow(r, nt - 1.0) * du * du,
                (alpha * nt / (p + 1.0) - beta / ell) * std::pow(r, nt - 1.0) * std::pow(u, p + 1.0),
                (alpha - 2.0 / ell) * std::pow(r, nt) * std::pow(u, p) * du};
    }
    double dH(double r, double u, double du) const {
        const auto t = dH_terms(r, u, du);
        return t[0] + t[1] + t[2];
    }
};

inline PohozaevForm pohozaev_form(const CriticalResult& crit, double alpha, double beta) {
    return {crit.dimension_like(), crit.p_star, crit.params.outer_coef(), alpha, beta};
}

}  // namespace detail

inline std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return g;
}

inline PohozaevCurve pohozaev_curve(const CriticalResult& crit, double alpha, double beta,
                                    const std::vector<double>& r_grid) {
    const auto form = detail::pohozaev_form(crit, alpha, beta);
    PohozaevCurve c;
    c.alpha = alpha;
    c.beta = beta;
    auto H_at = [&](double r) {
        const RadialState s = crit.profile.evaluate(r);
        return form.H(r, s.u, s.du);
    };
    for (double r : r_grid) {
        if (r < crit.R0 * (1.0 - 1e-12)) throw OutOfRange("Pohozaev grid must lie in [R0, infinity)");
        const RadialState s = crit.profile.evaluate(r);
        PohozaevSample smp;
        smp.r = r;
        smp.H = form.H(r, s.u, s.du);
        smp.dH_analytic = form.dH(r, s.u, s.du);
        // Richardson-extrapolated differences; one-sided where a central stencil would cross R0.
        const double h = 1e-3 * r;
        if (r - h >= crit.R0) {
            auto central = [&](double k) { return (H_at(r + k) - H_at(r - k)) / (2.0 * k); };
            smp.dH_numeric = (4.0 * central(0.5 * h) - central(h)) / 3.0;
        } else {
            auto forward = [&](double k) { return (-3.0 * H_at(r) + 4.0 * H_at(r + k) - H_at(r + 2.0 * k)) / (2.0 * k); };
            smp.dH_numeric = (4.0 * forward(0.5 * h) - forward(h)) / 3.0;
        }
        const auto terms = form.dH_terms(r, s.u, s.du);
        const double h_terms = (std::pow(r, form.nt) * (s.du * s.du + std::abs(form.alpha) / (form.p + 1.0) * std::pow(s.u, form.p + 1.0)) +
                                std::abs(form.beta) * std::pow(r, form.nt - 1.0) * std::abs(s.du) * s.u) / r;
        c.scale = std::max(c.scale, std::abs(terms[0]) + std::abs(terms[1]) + std::abs(terms[2]) + h_terms);
        const double gap = std::abs(smp.dH_analytic - smp.dH_numeric);
        if (gap > c.max_gap) {
            c.max_gap = gap;
            c.worst_r = r;
        }
        c.samples.push_back(smp);
    }
    return c;
}

struct PohozaevIntegral {
    double alpha = 0.0;
    double beta = 0.0;
    double integral = 0.0;  // ∫_{R0}^∞ H' dr
    double H_R0 = 0.0;
    double H_terms = 0.0;       // summed magnitudes of the terms of H(R0)
    double relative_gap = 0.0;  // |∫H' + H(R0)| / |H(R0)|
};

inline PohozaevIntegral pohozaev_integral(const CriticalResult& crit, double alpha, double beta) {
    const auto form = detail::pohozaev_form(crit, alpha, beta);
    PohozaevIntegral out;
    out.alpha = alpha;
    out.beta = beta;
    out.integral = integrate_profile(crit.profile, crit.R0, std::numeric_limits<double>::infinity(),
                                     [&](double r, double u, double du) { return form.dH(r, u, du); })
                       .value;
    const RadialState s = crit.profile.evaluate(crit.R0);
    out.H_R0 = form.H(crit.R0, s.u, s.du);
    const double r = crit.R0;
    out.H_terms = std::pow(r, form.nt) * (s.du * s.du + std::abs(form.alpha) / (form.p + 1.0) * std::pow(s.u, form.p + 1.0)) +
                  std::abs(form.beta) * std::pow(r, form.nt - 1.0) * std::abs(s.du) * s.u;
    // When H(R0) cancels to roundoff (λ = Λ) the gap is measured against the size of its terms.
    const double denom = std::max(std::abs(out.H_R0), 1e-6 * out.H_terms);
    out.relative_gap = std::abs(out.integral + out.H_R0) / denom;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Integral characterization of p*

struct IntegralIdentity {
    double p = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double alt_rhs = 0.0;  // same prefactor with the bracket [1 − (p+1)K0/(ell(Ñ−1))]
    double scale = 0.0;
    double residual = 0.0;
};

/// (Ñ+2−p(Ñ−2)) ∫_{R0}^∞ r^{Ñ−1}U^{p+1} = U(R0)^{p+1}R0^Ñ/(Ñ−1) · [p(Ñ−2) − Ñ − (p+1)K0/(ell(Ñ−1))].
///
/// The residual is normalized by the summed magnitudes of the individual terms, which keeps it
/// meaningful in the Laplacian case where both sides vanish.
inline IntegralIdentity integral_identity_residual(const CriticalResult& crit, std::optional<double> p_override = {}) {
    const double nt = crit.dimension_like();
    const double ell = crit.params.outer_coef();
    const double p = p_override.value_or(crit.p_star);
    const double I = integrate_profile(crit.profile, crit.R0, std::numeric_limits<double>::infinity(),
                                       [&](double r, double u, double) {
                                           return std::pow(r, nt - 1.0) * std::pow(std::max(u, 0.0), p + 1.0);
                                       })
                         .value;
    const double u0 = crit.U_R0, R0 = crit.R0;
    const double K0 = std::pow(u0, p - 1.0) * R0 * R0;
    const double pre = std::pow(u0, p + 1.0) * std::pow(R0, nt) / (nt - 1.0);
    const double k_term = (p + 1.0) * K0 / (ell * (nt - 1.0));
    IntegralIdentity id;
    id.p = p;
    id.lhs = (nt + 2.0 - p * (nt - 2.0)) * I;
    id.rhs = pre * (p * (nt - 2.0) - nt - k_term);
    id.alt_rhs = pre * (1.0 - k_term);
    id.scale = std::abs(nt + 2.0 - p * (nt - 2.0)) * I + pre * (std::abs(p * (nt - 2.0) - nt) + k_term);
    id.residual = std::abs(id.lhs - id.rhs) / id.scale;
    return id;
}

// ---------------------------------------------------------------------------------------------
// Two-sided bounds on U

struct SandwichReport {
    SandwichConstants constants;
    int points = 0;
    int violations = 0;
    double slack = 0.0;
    double min_lower_ratio = std::numeric_limits<double>::infinity();  // min U / lower envelope
    double max_upper_ratio = 0.0;                                       // max U / upper envelope
    double first_violation_r = std::numeric_limits<double>::quiet_NaN();
    double far_upper_ratio = 0.0;  // U / upper envelope at the last grid point
};

inline SandwichReport sandwich_check(const CriticalResult& crit, double slack = 0.1, int n = 1000,
                                     double span = 1e3) {
    SandwichReport rep;
    rep.constants = sandwich_constants(crit);
    rep.slack = slack;
    const double nt = crit.dimension_like();
    for (double r : log_grid(crit.R0, span * crit.R0, n)) {
        const double u = crit.profile.u(r);
        const double lo = sandwich_envelope(crit.U_R0, crit.R0, rep.constants.lower_k, nt, r);
        const double hi = sandwich_envelope(crit.U_R0, crit.R0, rep.constants.upper_k, nt, r);
        rep.min_lower_ratio = std::min(rep.min_lower_ratio, u / lo);
        rep.max_upper_ratio = std::max(rep.max_upper_ratio, u / hi);
        rep.far_upper_ratio = u / hi;
        ++rep.points;
        if (u < (1.0 - slack) * lo || u > (1.0 + slack) * hi) {
            if (rep.violations == 0) rep.first_violation_r = r;
            ++rep.violations;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Weighted energies

struct EnergyReport {
    double gamma = 0.0;
    double value = 0.0;
    double tail_correction = 0.0;
    double quadrature_err = 0.0;
};

/// True when u'' < 0 on (0, r0) and u'' > 0 on (r0, r_max], sampled on a log grid.
inline bool in_set_X(const std::function<double(double)>& ddu, double r0, double r_max, int n = 2000) {
    if (!(r0 > 0.0) || !(r_max > r0)) return false;
    const double r_min = 1e-6 * r0;
    for (double r : log_grid(r_min, r_max, n)) {
        if (std::abs(r - r0) <= 1e-9 * r0) continue;
        const double v = ddu(r);
        if (r < r0 && !(v < 0.0)) return false;
        if (r > r0 && !(v > 0.0)) return false;
    }
    return true;
}

inline bool in_set_X(const CriticalResult& crit) {
    return in_set_X([&](double r) { return crit.profile.ddu(r); }, crit.R0, 1e4 * crit.R0);
}

inline bool in_set_X(const BallSolution& b) {
    return in_set_X([&](double r) { return b.ddu(r); }, b.r0, 1.0 - 1e-9);
}

inline double weight_exponent(int dim, double p) { return 2.0 * (p + 1.0) / (p - 1.0) - dim; }

/// E*(U) with node-aligned quadrature on the stored profile and its asymptotic tail.
inline EnergyReport energy_star(const CriticalResult& crit) {
    if (!in_set_X(crit)) throw OutOfRange("U fails the single-inflection predicate; weight undefined");
    const int n = crit.params.dim;
    const double p = crit.p_star;
    const double nt = crit.dimension_like();
    if (!((nt - 2.0) * (p + 1.0) > 2.0 * (p + 1.0) / (p - 1.0)))
        throw OutOfRange("energy tail diverges: exponent not above N~/(N~-2)");
    EnergyReport e;
    e.gamma = weight_exponent(n, p);
    const double wN = sphere_measure(n);
    const Quadrature inner = integrate_profile(crit.profile, 0.0, crit.R0, [&](double r, double u, double) {
        return std::pow(u, p + 1.0) * std::pow(r, n - 1.0);
    });
    auto outer_f = [&](double r, double u, double) { return std::pow(std::max(u, 0.0), p + 1.0) * std::pow(r, e.gamma + n - 1.0); };
    const double r_tail = std::exp(crit.profile.tail->t_start);
    const Quadrature mid = integrate_profile(crit.profile, crit.R0, r_tail, outer_f);
    const Quadrature tail =
        integrate_profile(crit.profile, r_tail, std::numeric_limits<double>::infinity(), outer_f);
    e.value = wN * (std::pow(crit.R0, e.gamma) * inner.value + mid.value + tail.value);
    e.tail_correction = wN * tail.value;
    e.quadrature_err = wN * (std::pow(crit.R0, e.gamma) * inner.error + mid.error + tail.error);
    return e;
}

/// E*(U_α) for U_α(r) = α U(α^{(p−1)/2} r), integrated on log panels that ignore the profile nodes.
inline EnergyReport energy_star_rescaled(const CriticalResult& crit, double alpha) {
    const int n = crit.params.dim;
    const double p = crit.p_star;
    const double k = std::pow(alpha, (p - 1.0) / 2.0);
    const double r0 = crit.R0 / k;
    EnergyReport e;
    e.gamma = weight_exponent(n, p);
    auto U = [&](double r) { return alpha * std::max(crit.profile.u(k * r), 0.0); };
    const Quadrature inner =
        integrate_log_panels([&](double r) { return std::pow(U(r), p + 1.0) * std::pow(r, n - 1.0); }, 0.0, r0);
    auto outer_f = [&](double r) {
        const double u = U(r);
        return u > 0.0 ? std::exp((p + 1.0) * std::log(u) + (e.gamma + n - 1.0) * std::log(r)) : 0.0;
    };
    const double r_mid = 1e3 * r0;
    const Quadrature mid = integrate_log_panels(outer_f, r0, r_mid);
    const Quadrature tail = integrate_to_infinity(outer_f, r_mid);
    const double wN = sphere_measure(n);
    e.value = wN * (std::pow(r0, e.gamma) * inner.value + mid.value + tail.value);
    e.tail_correction = wN * tail.value;
    e.quadrature_err = wN * (std::pow(r0, e.gamma) * inner.error + mid.error + tail.error);
    return e;
}

/// E_ε(u_ε) on the unit ball, from the solution itself on log panels.
inline EnergyReport energy_eps(const BallSolution& b) {
    if (!in_set_X(b)) throw OutOfRange("ball solution fails the single-inflection predicate");
    const int n = b.params.dim;
    const double p = b.p;
    EnergyReport e;
    e.gamma = weight_exponent(n, p);
    auto up = [&](double r) { return std::pow(std::max(b.u(r), 0.0), p + 1.0); };
    const Quadrature inner = integrate_log_panels([&](double r) { return up(r) * std::pow(r, n - 1.0); }, 0.0, b.r0);
    const Quadrature outer =
        integrate_log_panels([&](double r) { return up(r) * std::pow(r, e.gamma + n - 1.0); }, b.r0, 1.0);
    const double wN = sphere_measure(n);
    e.value = wN * (std::pow(b.r0, e.gamma) * inner.value + outer.value);
    e.quadrature_err = wN * (std::pow(b.r0, e.gamma) * inner.error + outer.error);
    return e;
}

/// E_ε(ũ_ε) in the rescaled variables, node-aligned on the stored shot.
inline EnergyReport energy_eps_rescaled(const BallSolution& b) {
    const int n = b.params.dim;
    const double p = b.p;
    const double a = std::pow(b.shot.u0, (p - 1.0) / 2.0);
    const double u0 = b.shot.u0;
    const double rt0 = b.r0_tilde();
    EnergyReport e;
    e.gamma = weight_exponent(n, p);
    // ρ = a s, ũ(ρ) = w(s)/u0.
    const Quadrature inner = integrate_profile(b.shot, 0.0, rt0 / a, [&](double s, double w, double) {
        return std::pow(std::max(w, 0.0) / u0, p + 1.0) * std::pow(a * s, n - 1.0) * a;
    });
    const Quadrature outer = integrate_profile(b.shot, rt0 / a, b.shot_zero(), [&](double s, double w, double) {
        return std::pow(std::max(w, 0.0) / u0, p + 1.0) * std::pow(a * s, e.gamma + n - 1.0) * a;
    });
    const double wN = sphere_measure(n);
    e.value = wN * (std::pow(rt0, e.gamma) * inner.value + outer.value);
    e.quadrature_err = wN * (std::pow(rt0, e.gamma) * inner.error + outer.error);
    return e;
}

struct EnergySweep {
    double sigma = 0.0;  // E*(U)
    std::vector<double> eps;
    std::vector<double> energy;
    std::vector<double> energy_rescaled;
    std::vector<double> gap;  // |E_ε − Σ|
    double rate = 0.0;        // observed order of |E_ε − Σ| in ε
    double extrapolated = 0.0;
    double aitken = 0.0;      // extrapolation with the observed order instead of integer orders
};

inline EnergySweep energy_sweep(const CriticalResult& crit, const std::vector<double>& eps_list,
                                const BallOptions& base = {}) {
    EnergySweep s;
    s.sigma = energy_star(crit).value;
    std::vector<double> eps_sorted = eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
    for (double eps : eps_sorted) {
        if (eps < 100.0 * crit.p_tolerance) continue;
        const BallSolution b = solve_ball_eps(crit, eps, base);
        s.eps.push_back(eps);
        s.energy.push_back(energy_eps(b).value);
        s.energy_rescaled.push_back(energy_eps_rescaled(b).value);
        s.gap.push_back(std::abs(s.energy.back() - s.sigma));
    }
    const std::size_t m = s.energy.size();
    if (m >= 3) {
        const double d1 = s.energy[m - 2] - s.energy[m - 3];
        const double d2 = s.energy[m - 1] - s.energy[m - 2];
        const double q = d2 / d1;
        s.rate = q > 0.0 ? std::log(1.0 / q) / std::log(s.eps[m - 2] / s.eps[m - 1]) : 0.0;
        s.aitken = (q > 0.0 && q < 1.0) ? s.energy[m - 1] + d2 * q / (1.0 - q) : s.energy[m - 1];
        s.extrapolated = richardson_limit(s.eps, s.energy);
    } else if (m > 0) {
        s.extrapolated = s.aitken = s.energy.back();
    }
    return s;
}

struct SobolevChain {
    double gradient = 0.0;  // ∫ |∇U|²
    double mass = 0.0;      // ∫ U^{2N/(N−2)}
    double sobolev = 0.0;   // S = ‖∇U‖₂ / ‖U‖_{2*}
    double lhs = 0.0;       // (1/2 − 1/(p*+1)) E*
    double rhs = 0.0;       // S^N / N
    double relative_gap = 0.0;
};

/// Laplacian-case chain (1/2 − 1/(p*+1)) E* = S^N/N with S computed from U directly.
inline SobolevChain sobolev_chain(const CriticalResult& crit) {
    if (!crit.params.laplacian()) throw InvalidParams("Sobolev chain applies only when lambda = Lambda");
    const int n = crit.params.dim;
    const double p = crit.p_star;
    const double wN = sphere_measure(n);
    SobolevChain c;
    c.gradient = wN * integrate_profile(crit.profile, 0.0, std::numeric_limits<double>::infinity(),
                                        [&](double r, double, double du) { return du * du * std::pow(r, n - 1.0); })
                          .value;
    c.mass = wN * integrate_profile(crit.profile, 0.0, std::numeric_limits<double>::infinity(),
                                    [&](double r, double u, double) {
                                        return std::pow(std::max(u, 0.0), p + 1.0) * std::pow(r, n - 1.0);
                                    })
                      .value;
    c.sobolev = std::sqrt(c.gradient) / std::pow(c.mass, 1.0 / (p + 1.0));
    c.lhs = (0.5 - 1.0 / (p + 1.0)) * energy_star(crit).value;
    c.rhs = std::pow(c.sobolev, n) / n;
    c.relative_gap = std::abs(c.lhs - c.rhs) / std::abs(c.rhs);
    return c;
}

/// Energy invariance for D+ u = u'' + (Ñ−1)u'/r with p = (Ñ+2)/(Ñ−2) and weight |x|^{Ñ−N}.
///
/// The fast-decay solution is the Talenti profile in the real dimension Ñ; its ODE residual is
/// reported alongside the energies of its rescalings.
struct DPlusReport {
    double nt = 0.0;
    double p = 0.0;
    double ode_residual = 0.0;
    double energy = 0.0;
    std::vector<double> alphas;
    std::vector<double> relative_gaps;
};

inline DPlusReport d_plus_invariance(const Params& prm, const std::vector<double>& alphas) {
    DPlusReport rep;
    const int n = prm.dim;
    const double nt = dimension_like(prm.with_op(Operator::Plus));
    rep.nt = nt;
    rep.p = (nt + 2.0) / (nt - 2.0);
    const double k = nt * (nt - 2.0);
    auto V = [&](double r) { return std::pow(1.0 + r * r / k, -(nt - 2.0) / 2.0); };
    auto dV = [&](double r) { return -(nt - 2.0) / k * r * std::pow(1.0 + r * r / k, -nt / 2.0); };
    auto ddV = [&](double r) {
        const double q = 1.0 + r * r / k;
        return -(nt - 2.0) / k * (std::pow(q, -nt / 2.0) - nt / k * r * r * std::pow(q, -nt / 2.0 - 1.0));
    };
    for (double r : log_grid(1e-3, 1e3, 400)) {
        const double res = ddV(r) + (nt - 1.0) * dV(r) / r + std::pow(V(r), rep.p);
        rep.ode_residual = std::max(rep.ode_residual, std::abs(res) / std::pow(V(r), rep.p));
    }
    const double wN = sphere_measure(n);
    auto energy = [&](double a) {
        const double s = std::pow(a, (rep.p - 1.0) / 2.0);
        auto f = [&](double r) {
            const double v = a * V(s * r);
            return v > 0.0 ? std::exp((rep.p + 1.0) * std::log(v) + (nt - 1.0) * std::log(r)) : 0.0;
        };
        return wN * (integrate_log_panels(f, 0.0, 1e3 / s).value + integrate_to_infinity(f, 1e3 / s).value);
    };
    rep.energy = energy(1.0);
    for (double a : alphas) {
        rep.alphas.push_back(a);
        rep.relative_gaps.push_back(std::abs(energy(a) - rep.energy) / rep.energy);
    }
    return rep;
}

}  // namespace pucci
