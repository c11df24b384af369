#pragma once

// Critical exponent by bisection on the shot classifier, and the fast-decay solution U.
//
// Forward shots near p* stay on the fast-decay manifold only until the unstable mode,
// seeded at the p-tolerance level, has grown by e^{(Ñ−2)t}. The stored U therefore keeps
// the forward shot up to a matching radius and continues it by a backward shot started
// on the asymptotic expansion y = c1 + a1 e^{κt}, with c1 fixed by matching y there.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pucci/dopri5.hpp"
#include "pucci/emden_fowler.hpp"
#include "pucci/error.hpp"
#include "pucci/integrator.hpp"
#include "pucci/params.hpp"

namespace pucci {

struct BisectionStep {
    double p = 0.0;
    ShotOutcome outcome;
    double t_max = 0.0;
};

struct CriticalOptions {
    double p_tol = 1e-10;
    double t_max = 35.0;
    double t_max_cap = 400.0;
    int max_iterations = 200;
    bool force_bisection = false;  // run the search even when λ = Λ
    double rtol = 1e-12;
    double atol = 1e-14;
};

struct CriticalResult {
    Params params;
    ExponentBracket bracket;
    double search_lo = 0.0;
    double search_hi = 0.0;
    bool exact_mode = false;
    bool budget_exhausted = false;
    double p_star = 0.0;
    double p_tolerance = 0.0;
    RadialProfile profile;  // U with U(0) = 1, continued to infinity by its tail
    double R0 = 0.0;
    double U_R0 = 0.0;
    double c1 = 0.0;
    double c1_err = 0.0;
    double match_radius = 0.0;
    double match_defect = 0.0;  // relative mismatch of y' at the matching radius
    double t_max_used = 0.0;
    int iterations = 0;
    std::vector<BisectionStep> history;

    ExponentConstants constants() const { return exponent_constants(params, p_star); }
    double dimension_like() const { return pucci::dimension_like(params); }
};

namespace detail {

inline IntegratorConfig shot_config(const CriticalOptions& opt) {
    IntegratorConfig cfg;
    cfg.rtol = opt.rtol;
    cfg.atol = opt.atol;
    return cfg;
}

inline ShotOutcome shoot_and_classify(const Params& prm, double p, double t_max, const IntegratorConfig& cfg) {
    const RadialProfile prof = integrate(prm, p, 1.0, StopCondition::shooting(t_max), cfg);
    if (prof.events.first_zero) return Crossing{*prof.events.first_zero};
    if (!prof.events.inflection) return Undetermined{"no inflection before t_max"};
    const auto tr = to_phase(prof, exponent_constants(prm, p), 400);
    return classify(tr, t_max);
}

struct BackwardShot {
    double y = 0.0;
    double yp = 0.0;
    std::vector<DenseSegment<2>> segments;
    AsymptoticTail tail;
};

// Integrates the outer equation from the asymptotic start down to t_m for a given c1.
inline BackwardShot backward_from_tail(const Params& prm, double p, double c1, double t_m, double rtol,
                                       double atol, bool keep_segments) {
    const OuterRhs rhs{prm, p, dimension_like(prm) - 2.0};
    const double kappa = rhs.kappa();
    const double ell = prm.outer_coef();
    const double t_far = std::max(t_m + 5.0, std::log(1e-9) / kappa);
    AsymptoticTail tail{t_far, c1, -std::pow(c1, p) / (ell * kappa * (kappa - rhs.shift)), kappa};
    StepControl ctl;
    ctl.rtol = rtol;
    ctl.atol = atol;
    BackwardShot out;
    out.tail = tail;
    OdeState<2> y0 = tail(t_far);
    OdeState<2> last = y0;
    const auto res = drive_dopri5<2>(rhs, t_far, y0, t_m, 1e-2, ctl,
                                     [&](const DenseSegment<2>& seg, const OdeState<2>&, const OdeState<2>& y1) {
                                         if (keep_segments) out.segments.push_back(seg);
                                         last = y1;
                                         return false;
                                     });
    if (res.status != DriveStatus::Completed) throw BudgetExhausted("backward far-field shot did not reach t_m");
    out.y = last[0];
    out.yp = last[1];
    return out;
}

struct Match {
    double c1 = 0.0;
    double defect = 0.0;
};

// Plateau of y − y'/κ along the forward shot, where its relative variation between nodes is least.
inline double c1_guess(const RadialProfile& fwd, double kappa) {
    double best = std::numeric_limits<double>::infinity(), guess = 0.0, prev = 0.0, prev_t = 0.0;
    bool have_prev = false;
    for (const auto& seg : fwd.outer) {
        const double t = seg.hi();
        const auto s = seg(t);
        if (s[1] <= 0.0) break;
        const double g = s[0] - s[1] / kappa;
        if (have_prev) {
            const double slope = std::abs(g - prev) / ((t - prev_t) * std::max(std::abs(g), 1e-300));
            if (slope < best) {
                best = slope;
                guess = g;
            }
        }
        prev = g;
        prev_t = t;
        have_prev = true;
    }
    if (!have_prev) throw OutOfRange("forward shot never enters the increasing part of y");
    return guess > 0.0 ? guess : prev;
}

// Secant on c1 so that the backward shot reproduces the forward y(t_m).
//
// y(t_m) is not monotone in c1 across the rescaled family, so the iteration starts from the
// forward plateau estimate to stay on the matching branch.
inline Match match_far_field(const Params& prm, double p, double t_m, const OdeState<2>& fwd, double guess,
                             double rtol, double atol) {
    auto F = [&](double c1) { return backward_from_tail(prm, p, c1, t_m, rtol, atol, false); };
    double a = guess, b = guess * (1.0 + 1e-4);
    BackwardShot sa = F(a), sb = F(b);
    double fa = sa.y - fwd[0], fb = sb.y - fwd[0];
    for (int it = 0; it < 80; ++it) {
        if (std::abs(fb) <= 1e-14 * std::abs(fwd[0])) break;
        if (fb == fa) break;
        const double c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c > 0.0 ? c : 0.5 * b;
        sb = F(b);
        fb = sb.y - fwd[0];
    }
    if (std::abs(fb) > 1e-10 * std::abs(fwd[0])) throw BudgetExhausted("far-field matching on c1 did not converge");
    return {b, std::abs(sb.yp - fwd[1]) / std::max(std::abs(fwd[1]), std::abs(fwd[0]))};
}

// Log-radius of the first outer node at or beyond r_target.
inline double outer_node_at_or_after(const RadialProfile& prof, double r_target) {
    const double t_target = std::log(std::max(r_target, prof.r_switch));
    for (const auto& seg : prof.outer)
        if (seg.hi() >= t_target) return seg.hi();
    throw OutOfRange("forward shot does not reach the matching radius");
}

// Forward profile up to t_m, then the backward far-field branch and its tail.
inline RadialProfile splice(RadialProfile fwd, const BackwardShot& back, double t_m) {
    fwd.outer.erase(std::remove_if(fwd.outer.begin(), fwd.outer.end(),
                                   [&](const DenseSegment<2>& s) { return s.lo() >= t_m - 1e-14; }),
                    fwd.outer.end());
    const double r_m = std::exp(t_m);
    fwd.nodes.erase(std::remove_if(fwd.nodes.begin(), fwd.nodes.end(),
                                   [&](const ProfileNode& n) { return n.r > r_m * (1.0 + 1e-14); }),
                    fwd.nodes.end());
    std::vector<DenseSegment<2>> tail_side = back.segments;
    std::sort(tail_side.begin(), tail_side.end(),
              [](const DenseSegment<2>& a, const DenseSegment<2>& b) { return a.lo() < b.lo(); });
    const double d = fwd.shift;
    const OuterRhs rhs{fwd.params, fwd.p, d};
    for (const auto& seg : tail_side) {
        fwd.outer.push_back(seg);
        const double t = seg.hi();
        const auto s = seg(t);
        fwd.nodes.push_back({std::exp(t), std::exp(-d * t) * s[0], std::exp(-(d + 1.0) * t) * (s[1] - d * s[0]),
                             rhs.scaled_ddu(t, s[0], s[1]) * std::exp(-(d + 2.0) * t)});
    }
    fwd.tail = back.tail;
    fwd.truncation_radius = std::numeric_limits<double>::infinity();
    fwd.termination = Termination::RadiusReached;
    fwd.events.first_zero.reset();
    fwd.events.phase_turns.erase(std::remove_if(fwd.events.phase_turns.begin(), fwd.events.phase_turns.end(),
                                                [&](const PhaseTurn& pt) { return pt.t > t_m; }),
                                 fwd.events.phase_turns.end());
    fwd.events.equilibrium_t.reset();
    return fwd;
}

}  // namespace detail

/// Fast-decay solution at a given exponent, assumed critical.
inline CriticalResult build_fast_decay(const Params& prm, double p, double t_shot, const CriticalOptions& opt) {
    CriticalResult res;
    res.params = prm;
    res.p_star = p;
    const auto cfg = detail::shot_config(opt);
    const RadialProfile fwd = integrate(prm, p, 1.0, StopCondition::ef_time(t_shot), cfg);
    if (!fwd.events.inflection) throw OutOfRange("fast-decay candidate has no inflection radius");
    res.R0 = *fwd.events.inflection;
    res.U_R0 = fwd.evaluate(res.R0).u;

    const double t_m = detail::outer_node_at_or_after(fwd, 2.0 * res.R0);
    const double t_m2 = detail::outer_node_at_or_after(fwd, 4.0 * res.R0);
    const auto y_m = fwd.outer_state(t_m);
    const auto y_m2 = fwd.outer_state(t_m2);
    const double guess = detail::c1_guess(fwd, 2.0 - (p - 1.0) * fwd.shift);
    const auto m1 = detail::match_far_field(prm, p, t_m, y_m, guess, opt.rtol, opt.atol);
    const auto m2 = detail::match_far_field(prm, p, t_m2, y_m2, guess, opt.rtol, opt.atol);
    res.c1 = m1.c1;
    res.c1_err = std::abs(m1.c1 - m2.c1) + 1e-13 * std::abs(m1.c1);
    res.match_radius = std::exp(t_m);
    res.match_defect = m1.defect;
    const auto back = detail::backward_from_tail(prm, p, m1.c1, t_m, opt.rtol, opt.atol, true);
    res.profile = detail::splice(fwd, back, t_m);
    return res;
}

/// p* by bisection over the bracket (or exactly when λ = Λ) plus the fast-decay solution U.
inline CriticalResult find_critical(const Params& prm, const CriticalOptions& opt = {}) {
    validate(prm);
    if (!(opt.p_tol > 0.0)) throw InvalidParams("p_tol must be positive");
    if (!(opt.t_max > 0.0)) throw InvalidParams("t_max must be positive");
    const ExponentBracket bracket = exponent_bracket(prm);
    const auto cfg = detail::shot_config(opt);

    if (bracket.is_exact() && !opt.force_bisection) {
        CriticalResult res = build_fast_decay(prm, *bracket.exact, opt.t_max, opt);
        res.bracket = bracket;
        res.exact_mode = true;
        res.p_tolerance = 0.0;
        res.search_lo = res.search_hi = *bracket.exact;
        res.t_max_used = opt.t_max;
        return res;
    }

    double lo = bracket.lo, hi = bracket.hi;
    if (bracket.is_exact()) {
        const double n = prm.dim;
        lo = n / (n - 2.0);
        hi = *bracket.exact + 1.0;
    }
    std::tie(lo, hi) = shrink_inward(lo, hi);
    const double search_lo = lo, search_hi = hi;

    std::vector<BisectionStep> history;
    double t_max = opt.t_max;
    bool exhausted = false;
    int iterations = 0;

    // Returns nullopt when the shot stays Undetermined up to the t_max cap.
    auto decide = [&](double p) -> std::optional<bool> {
        while (true) {
            ShotOutcome o = detail::shoot_and_classify(prm, p, t_max, cfg);
            history.push_back({p, o, t_max});
            if (std::holds_alternative<Crossing>(o)) return true;
            if (std::holds_alternative<SlowDecay>(o)) return false;
            if (t_max * 1.5 > opt.t_max_cap) return std::nullopt;
            t_max *= 1.5;
        }
    };

    const auto at_lo = decide(lo);
    const auto at_hi = decide(hi);
    if (at_lo && at_hi && *at_lo == *at_hi)
        throw BracketViolation(std::string("classifier gives ") + (*at_lo ? "crossing" : "slow decay") +
                               " at both ends of the bracket for operator " + std::string(to_string(prm.op)));
    if (at_lo && !*at_lo) throw BracketViolation("slow decay at the lower end of the bracket");
    if (at_hi && *at_hi) throw BracketViolation("crossing at the upper end of the bracket");

    while (hi - lo > opt.p_tol) {
        if (++iterations > opt.max_iterations) {
            exhausted = true;
            break;
        }
        const double mid = 0.5 * (lo + hi);
        const auto below = decide(mid);
        if (!below) {
            exhausted = true;
            break;
        }
        (*below ? lo : hi) = mid;
    }

    const double p_star = 0.5 * (lo + hi);
    CriticalResult res = build_fast_decay(prm, p_star, std::min(t_max, 60.0), opt);
    res.bracket = bracket;
    res.search_lo = search_lo;
    res.search_hi = search_hi;
    res.p_tolerance = 0.5 * (hi - lo);
    res.budget_exhausted = exhausted;
    res.t_max_used = t_max;
    res.iterations = iterations;
    res.history = std::move(history);
    return res;
}

inline CriticalResult find_critical(const Params& prm, double p_tol) {
    CriticalOptions opt;
    opt.p_tol = p_tol;
    return find_critical(prm, opt);
}

struct OrderingReport {
    double p_minus = 0.0;
    double p_plus = 0.0;
    double sobolev = 0.0;
    bool minus_in_bracket = false;
    bool plus_in_bracket = false;
    bool ordered = false;
    bool degenerate = false;  // λ = Λ: all three coincide
};

/// p*− < (N+2)/(N−2) < p*+ together with bracket membership of each exponent.
inline OrderingReport critical_ordering_check(const CriticalResult& plus, const CriticalResult& minus) {
    if (plus.params.op != Operator::Plus || minus.params.op != Operator::Minus)
        throw InvalidParams("ordering check needs one M+ and one M− result");
    if (plus.params.dim != minus.params.dim || plus.params.lambda != minus.params.lambda ||
        plus.params.Lambda != minus.params.Lambda)
        throw InvalidParams("ordering check needs identical (lambda, Lambda, dim)");
    OrderingReport rep;
    rep.p_minus = minus.p_star;
    rep.p_plus = plus.p_star;
    rep.sobolev = sobolev_exponent(plus.params.dim);
    rep.degenerate = plus.params.laplacian();
    if (rep.degenerate) {
        rep.minus_in_bracket = rep.plus_in_bracket = true;
        rep.ordered = std::abs(rep.p_minus - rep.sobolev) <= 1e-6 && std::abs(rep.p_plus - rep.sobolev) <= 1e-6;
        return rep;
    }
    auto inside = [](const CriticalResult& r) {
        return r.p_star - r.p_tolerance > r.bracket.lo && r.p_star + r.p_tolerance < r.bracket.hi;
    };
    rep.minus_in_bracket = inside(minus);
    rep.plus_in_bracket = inside(plus);
    rep.ordered = rep.p_minus + minus.p_tolerance < rep.sobolev && rep.sobolev < rep.p_plus - plus.p_tolerance;
    if (!rep.ordered)
        throw BracketViolation("critical exponents violate p*- < (N+2)/(N-2) < p*+");
    return rep;
}

}  // namespace pucci

namespace pucci {

/// Constants of the two-sided bound U(R0)(1 + k(r² − R0²))^{−(Ñ−2)/2} on [R0, ∞).
struct SandwichConstants {
    double lower_k = 0.0;  // larger constant: gives the lower envelope
    double upper_k = 0.0;  // smaller constant: gives the upper envelope
    double from_inflection = 0.0;  // U(R0)^{p−1} / (ell (Ñ−1)(Ñ−2))
    double from_c1 = 0.0;          // (U(R0)/c1)^{2/(Ñ−2)}
};

inline SandwichConstants sandwich_constants(const CriticalResult& crit) {
    const double nt = crit.dimension_like();
    const double p = crit.p_star;
    SandwichConstants k;
    k.from_inflection = std::pow(crit.U_R0, p - 1.0) / (crit.params.outer_coef() * (nt - 1.0) * (nt - 2.0));
    k.from_c1 = std::pow(crit.U_R0 / crit.c1, 2.0 / (nt - 2.0));
    // Below (Ñ+2)/(Ñ−2) the Pohozaev function H is negative and the inflection data bound from below;
    // above it the roles swap.
    if (p * (nt - 2.0) <= nt + 2.0) {
        k.lower_k = k.from_inflection;
        k.upper_k = k.from_c1;
    } else {
        k.lower_k = k.from_c1;
        k.upper_k = k.from_inflection;
    }
    return k;
}

inline double sandwich_envelope(double u_r0, double r0, double k, double nt, double r) {
    return u_r0 * std::pow(1.0 + k * (r * r - r0 * r0), -(nt - 2.0) / 2.0);
}

}  // namespace pucci
