#pragma once

// Emden–Fowler phase plane: x(t) = r^{2/(p−1)} u(r), r = e^t.
//
// In the convex regime the radial equation becomes the autonomous ODE
//     x'' − (λ1 + λ2) x' + λ1 λ2 x = −x^p / ell,
// with ell = Λ for M+ and λ for M−. Fast decay means x(t) ~ c1 e^{λ1 t}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pucci/error.hpp"
#include "pucci/integrator.hpp"
#include "pucci/params.hpp"

namespace pucci {

struct PhasePoint {
    double t = 0.0;
    double x = 0.0;
    double dx = 0.0;
};

struct Crossing {
    double R = 0.0;  // first zero of u
};
struct SlowDecay {
    double turning_t = 0.0;  // dx returned to 0 with x > 0
};
struct Undetermined {
    std::string reason;
};
using ShotOutcome = std::variant<Crossing, SlowDecay, Undetermined>;

inline const char* outcome_name(const ShotOutcome& o) {
    if (std::holds_alternative<Crossing>(o)) return "crossing";
    if (std::holds_alternative<SlowDecay>(o)) return "slow_decay";
    return "undetermined";
}

struct PhaseTrajectory {
    ExponentConstants constants;
    double ell = 1.0;
    std::vector<PhasePoint> points;
    double outer_from = std::numeric_limits<double>::infinity();  // log of the inflection radius
    ProfileEvents events;
    Termination termination = Termination::RadiusReached;
    double t_end = 0.0;
    double residual = 0.0;  // sup-norm relative residual of the autonomous ODE on the outer regime
    std::optional<ShotOutcome> classification;
};

namespace detail {
// x, x', x'' at log-radius t from a profile, avoiding r^{λ2} overflow in the far field.
inline std::array<double, 3> phase_at(const RadialProfile& prof, const ExponentConstants& c, double t) {
    const double r = std::exp(t);
    const RadialState s = prof.evaluate(std::min(r, prof.truncation_radius));
    const double ddu = solve_ddu(prof.params, prof.p, s);
    const double scale = std::exp(c.lambda2 * t);
    const double x = scale * s.u;
    const double dx = scale * (c.lambda2 * s.u + r * s.du);
    const double ddx = scale * (c.lambda2 * c.lambda2 * s.u + (2.0 * c.lambda2 + 1.0) * r * s.du + r * r * ddu);
    return {x, dx, ddx};
}
}  // namespace detail

/// Samples a profile on a uniform log-radius grid and checks the autonomous equation.
inline PhaseTrajectory to_phase(const RadialProfile& prof, const ExponentConstants& c, int n_points = 2000,
                                std::optional<double> t_hi = std::nullopt) {
    if (!prof.events.inflection)
        throw OutOfRange("profile has no inflection radius; the convex regime is not covered");
    PhaseTrajectory tr;
    tr.constants = c;
    tr.ell = prof.params.outer_coef();
    tr.events = prof.events;
    tr.termination = prof.termination;
    tr.outer_from = std::log(*prof.events.inflection);
    const double t_lo = std::log(std::max(prof.r_init, 1e-8 * prof.r_switch));
    double t_top = std::log(prof.truncation_radius);
    if (!std::isfinite(t_top)) t_top = prof.tail ? prof.tail->t_start + 10.0 : t_lo + 10.0;
    if (t_hi) t_top = std::min(t_top, *t_hi);
    tr.t_end = t_top;
    if (!(t_top > tr.outer_from)) throw OutOfRange("profile ends before leaving the concave regime");
    tr.points.reserve(static_cast<std::size_t>(n_points));
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double t = t_lo + (t_top - t_lo) * i / (n_points - 1);
        const auto v = detail::phase_at(prof, c, t);
        tr.points.push_back({t, v[0], v[1]});
        if (t > tr.outer_from && v[0] > 0.0) {
            const double a = v[2];
            const double b = (c.lambda1 + c.lambda2) * v[1];
            const double d = c.lambda1 * c.lambda2 * v[0];
            const double f = std::pow(v[0], c.p) / tr.ell;
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(d), f});
            if (scale > 0.0) worst = std::max(worst, std::abs(a - b + d + f) / scale);
        }
    }
    tr.residual = worst;
    return tr;
}

/// The two equilibria {0, (|λ1| λ2 ell)^{1/(p−1)}} of the autonomous equation.
inline std::vector<double> equilibria(const ExponentConstants& c, double ell_coef) {
    if (!(c.lambda1 < 0.0))
        throw InvalidParams("lambda1 >= 0: exponent at or below Ñ/(Ñ−2), outside the phase-plane theory");
    return {0.0, std::pow(-c.lambda1 * c.lambda2 * ell_coef, 1.0 / (c.p - 1.0))};
}

/// e^{−λ1 t} x(t) on every sampled point of the convex regime.
inline std::vector<std::pair<double, double>> fast_decay_quotient(const PhaseTrajectory& tr) {
    std::vector<std::pair<double, double>> q;
    for (const auto& pt : tr.points)
        if (pt.t > tr.outer_from) q.emplace_back(pt.t, std::exp(-tr.constants.lambda1 * pt.t) * pt.x);
    return q;
}

/// Crossing / SlowDecay / Undetermined from the shot's own events up to t_max.
inline ShotOutcome classify(const PhaseTrajectory& tr, double t_max) {
    if (tr.events.first_zero && std::log(*tr.events.first_zero) <= t_max) return Crossing{*tr.events.first_zero};
    bool after_max = false;
    for (const auto& turn : tr.events.phase_turns) {
        if (turn.t > t_max) break;
        if (!turn.minimum) after_max = true;
        if (turn.minimum && after_max && turn.x > 0.0) return SlowDecay{turn.t};
    }
    if (tr.events.equilibrium_t && *tr.events.equilibrium_t <= t_max) return SlowDecay{*tr.events.equilibrium_t};
    if (tr.t_end < t_max && tr.termination != Termination::RadiusReached)
        return Undetermined{std::string("shot ended early: ") + to_string(tr.termination)};
    double drift = std::numeric_limits<double>::infinity();
    const auto q = fast_decay_quotient(tr);
    if (q.size() >= 8) {
        const std::size_t from = q.size() * 3 / 4;
        double lo = q[from].second, hi = lo;
        for (std::size_t i = from; i < q.size(); ++i) {
            lo = std::min(lo, q[i].second);
            hi = std::max(hi, q[i].second);
        }
        drift = (hi - lo) / std::max(std::abs(hi), 1e-300);
    }
    return Undetermined{"t_max reached with x > 0, dx < 0; fast-decay quotient drift " + std::to_string(drift)};
}

struct C1Estimate {
    double c1 = 0.0;
    double err = 0.0;
};

/// Plateau of e^{−λ1 t} x(t) over the last quarter of the sampled convex regime.
inline C1Estimate extract_c1(const PhaseTrajectory& tr, double window_fraction = 0.25) {
    const auto q = fast_decay_quotient(tr);
    if (q.size() < 4) throw OutOfRange("trajectory too short in the convex regime to extract c1");
    const auto from = static_cast<std::size_t>(static_cast<double>(q.size()) * (1.0 - window_fraction));
    double lo = q[from].second, hi = lo, sum = 0.0;
    for (std::size_t i = from; i < q.size(); ++i) {
        lo = std::min(lo, q[i].second);
        hi = std::max(hi, q[i].second);
        sum += q[i].second;
    }
    return {sum / static_cast<double>(q.size() - from), hi - lo};
}

/// Companion estimate from the derivative: r^{Ñ−1} u'(r) → −(Ñ−2) c1.
inline C1Estimate extract_c1_from_derivative(const PhaseTrajectory& tr, double window_fraction = 0.25) {
    const double l1 = tr.constants.lambda1;
    const double shift = tr.constants.lambda2 - l1;
    std::vector<double> vals;
    for (const auto& pt : tr.points) {
        if (pt.t <= tr.outer_from) continue;
        const double y = std::exp(-l1 * pt.t) * pt.x;
        const double yp = std::exp(-l1 * pt.t) * pt.dx - l1 * y;
        vals.push_back((shift * y - yp) / shift);
    }
    if (vals.size() < 4) throw OutOfRange("trajectory too short in the convex regime to extract c1");
    const auto from = static_cast<std::size_t>(static_cast<double>(vals.size()) * (1.0 - window_fraction));
    double lo = vals[from], hi = lo, sum = 0.0;
    for (std::size_t i = from; i < vals.size(); ++i) {
        lo = std::min(lo, vals[i]);
        hi = std::max(hi, vals[i]);
        sum += vals[i];
    }
    return {sum / static_cast<double>(vals.size() - from), hi - lo};
}

namespace detail {
// Adaptive Simpson on [a, b].
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int depth = 40) {
    auto rec = [&](auto&& self, double a0, double b0, double fa, double fm, double fb, double whole, double eps,
                   int lvl) -> double {
        const double m = 0.5 * (a0 + b0);
        const double lm = 0.5 * (a0 + m), rm = 0.5 * (m + b0);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a0) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b0 - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (lvl <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return self(self, a0, m, fa, flm, fm, left, eps / 2, lvl - 1) +
               self(self, m, b0, fm, frm, fb, right, eps / 2, lvl - 1);
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(rec, a, b, fa, fm, fb, whole, tol, depth);
}
}  // namespace detail

/// Sup-norm gap between x(t) and the variation-of-constants formula anchored at T, on [T, T+span].
///
/// The forcing f(x(s)) = −x^p/ell is read from the stored profile and integrated by adaptive
/// Simpson, so this checks the profile against the closed-form solution operator of the
/// linear part.
inline double representation_residual(const RadialProfile& prof, const ExponentConstants& c, double T,
                                      double span = 2.0, int n_check = 21) {
    const double ell = prof.params.outer_coef();
    const double l1 = c.lambda1, l2 = c.lambda2, gap = l2 - l1;
    const auto at_T = detail::phase_at(prof, c, T);
    const double x_minus = (l2 * at_T[0] - at_T[1]) / gap;
    const double x_plus = (at_T[1] - l1 * at_T[0]) / gap;
    auto forcing = [&](double s) {
        const double x = detail::phase_at(prof, c, s)[0];
        return -std::pow(std::max(x, 0.0), c.p) / ell;
    };
    double worst = 0.0, scale = 0.0;
    for (int i = 1; i < n_check; ++i) {
        const double t = T + span * i / (n_check - 1);
        const double i2 = detail::adaptive_simpson([&](double s) { return forcing(s) * std::exp(l2 * (t - s)); }, T, t, 1e-12);
        const double i1 = detail::adaptive_simpson([&](double s) { return forcing(s) * std::exp(l1 * (t - s)); }, T, t, 1e-12);
        const double rep = x_minus * std::exp(l1 * (t - T)) + x_plus * std::exp(l2 * (t - T)) + (i2 - i1) / gap;
        const double x = detail::phase_at(prof, c, t)[0];
        worst = std::max(worst, std::abs(rep - x));
        scale = std::max(scale, std::abs(x));
    }
    return scale > 0.0 ? worst / scale : worst;
}

}  // namespace pucci
