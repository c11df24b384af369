#pragma once

// Radial shooting for -M±(D²u) = u^p, u(0) = u0, u'(0) = 0.
//
// Near the origin the ODE is integrated in r with state (u, u'). Past the switch radius the
// integrator changes to the log-radius t = log r and the state (y, y') with
//     u = e^{-(Ñ-2)t} y,
// so y tends to the fast-decay constant along the fast-decaying solution and stays O(1)
// over many decades of r. Both pieces keep their Runge–Kutta dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pucci/dopri5.hpp"
#include "pucci/error.hpp"
#include "pucci/params.hpp"
#include "pucci/radial_operator.hpp"

namespace pucci {

struct ProfileNode {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
    double ddu = 0.0;
};

/// Stationary point of x(t) = r^{2/(p−1)} u(r).
struct PhaseTurn {
    double t = 0.0;
    double x = 0.0;
    bool minimum = false;  // dx went from negative to positive
};

struct ProfileEvents {
    std::optional<double> first_zero;
    std::optional<double> inflection;  // first sign change of u'' from − to +
    int inflection_count = 0;
    int derivative_zero_count = 0;
    std::vector<PhaseTurn> phase_turns;
    std::optional<double> equilibrium_t;  // trajectory settled at the positive equilibrium
};

enum class Termination { FirstZero, SlowDecay, Equilibrium, RadiusReached, StepUnderflow, MaxSteps };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::FirstZero: return "first_zero";
        case Termination::SlowDecay: return "slow_decay";
        case Termination::Equilibrium: return "equilibrium";
        case Termination::RadiusReached: return "radius_reached";
        case Termination::StepUnderflow: return "step_underflow";
        case Termination::MaxSteps: return "max_steps";
    }
    return "?";
}

/// Where to stop a shot. Every shot also stops at the first zero of u.
struct StopCondition {
    enum class Kind { FirstZero, Radius, EfTime };
    Kind kind = Kind::FirstZero;
    double limit = 0.0;
    bool stop_on_slow_decay = false;

    static StopCondition at_first_zero() { return {}; }
    static StopCondition at_radius(double r_max) { return {Kind::Radius, r_max, false}; }
    static StopCondition ef_time(double t_max) { return {Kind::EfTime, t_max, false}; }
    /// Stops at whichever comes first: zero, a positive minimum of x(t), or t_max.
    static StopCondition shooting(double t_max) { return {Kind::EfTime, t_max, true}; }
};

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double r_init_rel = 1e-6;  // series start radius, relative to the natural length u0^{-(p−1)/2}
    double r_switch_rel = 1.0;
    double t_cap = 300.0;  // log-radius ceiling when stopping at the first zero
    long max_steps = 2'000'000;
    double equilibrium_tol = 1e-3;
};

/// Far-field expansion y(t) = c1 + a1 e^{κt} of the fast-decaying solution.
struct AsymptoticTail {
    double t_start = 0.0;
    double c1 = 0.0;
    double a1 = 0.0;
    double kappa = 0.0;

    OdeState<2> operator()(double t) const {
        const double e = std::exp(kappa * t);
        return {c1 + a1 * e, a1 * kappa * e};
    }
};

/// Dense, interpolable radial solution with its event markers.
struct RadialProfile {
    Params params;
    double p = 0.0;
    double u0 = 0.0;
    double shift = 0.0;  // Ñ − 2, the exponent linking u and y
    double r_init = 0.0;
    double r_switch = 0.0;
    double c2 = 0.0;  // u''(0)
    double truncation_radius = 0.0;
    Termination termination = Termination::RadiusReached;
    bool odd_extension_used = false;
    long steps = 0;
    double rtol = 0.0;
    double atol = 0.0;

    std::vector<ProfileNode> nodes;
    ProfileEvents events;
    std::vector<DenseSegment<2>> inner;  // x = r, state (u, u')
    std::vector<DenseSegment<2>> outer;  // x = log r, state (y, y'), sorted by x
    std::optional<AsymptoticTail> tail;

    double t_switch() const { return std::log(r_switch); }

    /// (y, y') at log-radius t ≥ log r_switch.
    OdeState<2> outer_state(double t) const {
        if (tail && t >= tail->t_start) return (*tail)(t);
        if (outer.empty() || t < outer.front().lo() - 1e-12 || t > outer.back().hi() + 1e-12)
            throw OutOfRange("log-radius " + std::to_string(t) + " outside the stored outer range");
        auto it = std::lower_bound(outer.begin(), outer.end(), t,
                                   [](const DenseSegment<2>& s, double v) { return s.hi() < v; });
        if (it == outer.end()) it = std::prev(outer.end());
        return (*it)(t);
    }

    /// (u, u') at radius r via the integrator's own interpolant.
    RadialState evaluate(double r) const {
        if (!(r >= 0.0) || r > truncation_radius * (1.0 + 1e-13))
            throw OutOfRange("radius " + std::to_string(r) + " outside [0, " +
                             std::to_string(truncation_radius) + "]");
        if (r <= r_init) return {r, u0 + 0.5 * c2 * r * r, c2 * r};
        if (r <= r_switch) {
            auto it = std::lower_bound(inner.begin(), inner.end(), r,
                                       [](const DenseSegment<2>& s, double v) { return s.hi() < v; });
            if (it == inner.end()) it = std::prev(inner.end());
            const auto s = (*it)(r);
            return {r, s[0], s[1]};
        }
        const double t = std::log(r);
        const auto s = outer_state(t);
        return {r, std::exp(-shift * t) * s[0], std::exp(-(shift + 1.0) * t) * (s[1] - shift * s[0])};
    }

    double ddu(double r) const {
        if (r <= 0.0) return c2;
        return solve_ddu(params, p, evaluate(r));
    }

    double u(double r) const { return evaluate(r).u; }
};

namespace detail {

inline double signed_pow_scaled(double y, double p, double log_scale) {
    if (y == 0.0) return 0.0;
    const double m = std::exp(log_scale + p * std::log(std::abs(y)));
    return y > 0.0 ? m : -m;
}

/// Right-hand side in the log-radius variables (y, y').
struct OuterRhs {
    Params prm;
    double p = 0.0;
    double shift = 0.0;

    double kappa() const { return 2.0 - (p - 1.0) * shift; }

    /// r² u'' e^{(Ñ−2)t}, whose sign is the sign of u''.
    double scaled_ddu(double t, double y, double yp) const {
        return solve_scaled(prm, yp - shift * y, signed_pow_scaled(y, p, kappa() * t));
    }

    OdeState<2> operator()(double t, const OdeState<2>& s) const {
        const double b = s[1] - shift * s[0];
        const double a = scaled_ddu(t, s[0], s[1]);
        return {s[1], a + b + 2.0 * shift * s[1] - shift * shift * s[0]};
    }
};

struct InnerRhs {
    Params prm;
    double p = 0.0;
    OdeState<2> operator()(double r, const OdeState<2>& s) const {
        return {s[1], solve_ddu(prm, p, {r, s[0], s[1]})};
    }
};

// Bisection for a sign change of g along a dense segment between a and b.
template <class G>
double locate_root(G&& g, double a, double b, double ga) {
    const double tol = 1e-15 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm > 0.0) == (ga > 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

/// Taylor start u(r) = u0 + c2 r²/2 at a small radius; c2 = −u0^p/(coef·N).
struct SeriesStart {
    RadialState state;
    double ddu = 0.0;
    double truncation_order = 4.0;  // local error is O(r_init⁴)
};

inline SeriesStart series_start(const Params& prm, double p, double u0, double r_init) {
    if (!(r_init > 0.0)) throw InvalidParams("series start radius must be positive");
    if (!(u0 > 0.0)) throw InvalidParams("shooting height u0 must be positive");
    const double c2 = -std::pow(u0, p) / (prm.inner_coef() * prm.dim);
    return {{r_init, u0 + 0.5 * c2 * r_init * r_init, c2 * r_init}, c2, 4.0};
}

inline RadialProfile integrate(const Params& prm, double p, double u0, const StopCondition& stop,
                               const IntegratorConfig& cfg = {}) {
    validate(prm);
    if (!(p > 1.0)) throw InvalidParams("exponent p must exceed 1");
    if (!(u0 > 0.0)) throw InvalidParams("shooting height u0 must be positive");

    RadialProfile prof;
    prof.params = prm;
    prof.p = p;
    prof.u0 = u0;
    prof.shift = dimension_like(prm) - 2.0;
    prof.rtol = cfg.rtol;
    prof.atol = cfg.atol;
    const double length = std::pow(u0, -(p - 1.0) / 2.0);
    prof.r_init = cfg.r_init_rel * length;
    prof.r_switch = cfg.r_switch_rel * length;
    const auto start = series_start(prm, p, u0, prof.r_init);
    prof.c2 = start.ddu;
    prof.nodes.push_back({0.0, u0, 0.0, prof.c2});
    prof.nodes.push_back({start.state.r, start.state.u, start.state.du, solve_ddu(prm, p, start.state)});

    const auto ec = exponent_constants(prm, p);
    const double d = prof.shift;
    const double ell = prm.outer_coef();
    const std::optional<double> x_eq =
        ec.lambda1 < 0.0 ? std::optional<double>(std::pow(-ec.lambda1 * ec.lambda2 * ell, 1.0 / (p - 1.0)))
                         : std::nullopt;

    double r_stop = 0.0;
    switch (stop.kind) {
        case StopCondition::Kind::FirstZero: r_stop = std::exp(cfg.t_cap); break;
        case StopCondition::Kind::Radius: r_stop = stop.limit; break;
        case StopCondition::Kind::EfTime: r_stop = std::exp(stop.limit); break;
    }
    if (!(r_stop > prof.r_init)) throw InvalidParams("stop radius must exceed the series start radius");

    StepControl ctl;
    ctl.rtol = cfg.rtol;
    ctl.atol = cfg.atol;
    ctl.max_steps = cfg.max_steps;

    // Event functions: u, u', sign(u''), phase derivative dx ∝ λ2 u + r u'.
    struct Ev {
        std::array<double, 4> g;
    };
    bool done = false;
    bool seen_descent = false;  // dx < 0 observed
    Termination term = Termination::RadiusReached;

    auto process = [&](auto&& seg, const Ev& e0, const Ev& e1, auto&& ev_at, auto&& to_node, auto&& to_t) {
        struct Hit {
            double x;
            int kind;
        };
        std::vector<Hit> hits;
        for (int k = 0; k < 4; ++k) {
            const int s0 = detail::sign_of(e0.g[k]);
            const int s1 = detail::sign_of(e1.g[k]);
            if (s0 != 0 && s1 != 0 && s0 != s1) {
                const double xr = detail::locate_root([&](double x) { return ev_at(x).g[k]; }, seg.x0,
                                                      seg.x1(), e0.g[k]);
                hits.push_back({xr, k});
            }
        }
        std::sort(hits.begin(), hits.end(),
                  [&](const Hit& a, const Hit& b) { return (a.x - b.x) * (seg.h > 0 ? 1 : -1) < 0; });
        for (const auto& hit : hits) {
            const double sgn_before = e0.g[hit.kind];
            switch (hit.kind) {
                case 0: {
                    prof.events.first_zero = to_node(hit.x).r;
                    prof.nodes.push_back(to_node(hit.x));
                    prof.nodes.back().u = 0.0;
                    prof.truncation_radius = prof.nodes.back().r;
                    term = Termination::FirstZero;
                    done = true;
                    return;
                }
                case 1: ++prof.events.derivative_zero_count; break;
                case 2:
                    ++prof.events.inflection_count;
                    if (!prof.events.inflection && sgn_before < 0.0) prof.events.inflection = to_node(hit.x).r;
                    break;
                case 3: {
                    const bool minimum = sgn_before < 0.0;
                    const auto nd = to_node(hit.x);
                    const double t = to_t(hit.x);
                    const double x = std::pow(nd.r, ec.lambda2) * nd.u;
                    prof.events.phase_turns.push_back({t, x, minimum});
                    if (minimum && seen_descent && stop.stop_on_slow_decay) {
                        prof.nodes.push_back(nd);
                        prof.truncation_radius = nd.r;
                        term = Termination::SlowDecay;
                        done = true;
                        return;
                    }
                    break;
                }
            }
        }
        if (e1.g[3] < 0.0) seen_descent = true;
    };

    // Phase A: r from r_init to min(r_switch, r_stop).
    const detail::InnerRhs inner_rhs{prm, p};
    auto ev_inner = [&](double r, const OdeState<2>& s) {
        const double src = r * r * detail::signed_power(s[0], p);
        return Ev{{s[0], s[1], solve_scaled(prm, r * s[1], src), ec.lambda2 * s[0] + r * s[1]}};
    };
    const double r_end_a = std::min(prof.r_switch, r_stop);
    OdeState<2> ya{start.state.u, start.state.du};
    Ev prev = ev_inner(prof.r_init, ya);
    prev.g[1] = -1.0;  // u'(r) < 0 just off the origin
    auto res_a = drive_dopri5<2>(
        inner_rhs, prof.r_init, ya, r_end_a, 1e-3 * prof.r_init, ctl,
        [&](const DenseSegment<2>& seg, const OdeState<2>&, const OdeState<2>& y1) {
            prof.inner.push_back(seg);
            if (y1[0] < 0.0) prof.odd_extension_used = true;
            const Ev e1 = ev_inner(seg.x1(), y1);
            process(
                seg, prev, e1, [&](double x) { return ev_inner(x, seg(x)); },
                [&](double x) {
                    const auto s = seg(x);
                    return ProfileNode{x, s[0], s[1], solve_ddu(prm, p, {x, s[0], s[1]})};
                },
                [](double x) { return std::log(x); });
            if (!done) prof.nodes.push_back({seg.x1(), y1[0], y1[1], solve_ddu(prm, p, {seg.x1(), y1[0], y1[1]})});
            prev = e1;
            return done;
        });
    prof.steps += res_a.steps;
    if (!done && res_a.status == DriveStatus::StepUnderflow) term = Termination::StepUnderflow;
    if (!done && res_a.status == DriveStatus::MaxSteps) term = Termination::MaxSteps;
    const bool phase_a_ok = res_a.status == DriveStatus::Completed || res_a.status == DriveStatus::Stopped;

    if (!done && phase_a_ok && r_stop > prof.r_switch) {
        const detail::OuterRhs outer_rhs{prm, p, d};
        const double t0 = std::log(prof.r_switch);
        const double t_end = std::log(r_stop);
        const auto s0 = prof.inner.back()(prof.r_switch);
        const double y0 = std::pow(prof.r_switch, d) * s0[0];
        OdeState<2> yb{y0, std::pow(prof.r_switch, d + 1.0) * s0[1] + d * y0};
        auto ev_outer = [&](double t, const OdeState<2>& s) {
            return Ev{{s[0], s[1] - d * s[0], outer_rhs.scaled_ddu(t, s[0], s[1]), s[1] + ec.lambda1 * s[0]}};
        };
        auto node_at = [&](double t, const OdeState<2>& s) {
            const double a = outer_rhs.scaled_ddu(t, s[0], s[1]);
            return ProfileNode{std::exp(t), std::exp(-d * t) * s[0], std::exp(-(d + 1.0) * t) * (s[1] - d * s[0]),
                               a * std::exp(-(d + 2.0) * t)};
        };
        auto res_b = drive_dopri5<2>(
            outer_rhs, t0, yb, t_end, 1e-2, ctl,
            [&](const DenseSegment<2>& seg, const OdeState<2>&, const OdeState<2>& y1) {
                prof.outer.push_back(seg);
                if (y1[0] < 0.0) prof.odd_extension_used = true;
                const Ev e1 = ev_outer(seg.x1(), y1);
                process(
                    seg, prev, e1, [&](double x) { return ev_outer(x, seg(x)); },
                    [&](double x) { return node_at(x, seg(x)); }, [](double x) { return x; });
                if (done) return true;
                prof.nodes.push_back(node_at(seg.x1(), y1));
                prev = e1;
                if (x_eq && e1.g[2] > 0.0) {
                    const double scale = std::exp(ec.lambda1 * seg.x1());
                    const double x = scale * y1[0];
                    const double dx = scale * (y1[1] + ec.lambda1 * y1[0]);
                    if (std::abs(x - *x_eq) < cfg.equilibrium_tol * *x_eq &&
                        std::abs(dx) < cfg.equilibrium_tol * *x_eq) {
                        prof.events.equilibrium_t = seg.x1();
                        if (stop.stop_on_slow_decay) {
                            prof.truncation_radius = std::exp(seg.x1());
                            term = Termination::Equilibrium;
                            done = true;
                        }
                    }
                }
                return done;
            });
        prof.steps += res_b.steps;
        if (!done) {
            if (res_b.status == DriveStatus::StepUnderflow) term = Termination::StepUnderflow;
            else if (res_b.status == DriveStatus::MaxSteps) term = Termination::MaxSteps;
            prof.truncation_radius = std::exp(res_b.x);
        }
    } else if (!done) {
        prof.truncation_radius = std::min(r_end_a, prof.inner.empty() ? prof.r_init : prof.inner.back().x1());
    }
    prof.termination = term;
    if (!prof.nodes.empty()) prof.truncation_radius = std::min(prof.truncation_radius, prof.nodes.back().r);
    return prof;
}

/// Dense-output evaluation, bounds-checked against the truncation radius.
inline RadialState evaluate(const RadialProfile& prof, double r) { return prof.evaluate(r); }

}  // namespace pucci
