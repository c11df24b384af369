#pragma once

// Dormand–Prince 5(4) with the 4th-order continuous extension of Hairer, Nørsett & Wanner.
// Works for either direction of integration (h may be negative).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace pucci {

template <std::size_t Dim>
using OdeState = std::array<double, Dim>;

/// Dense output of one accepted step, valid for x between x0 and x0 + h.
template <std::size_t Dim>
struct DenseSegment {
    double x0 = 0.0;
    double h = 0.0;
    std::array<OdeState<Dim>, 5> c{};

    double lo() const { return h >= 0.0 ? x0 : x0 + h; }
    double hi() const { return h >= 0.0 ? x0 + h : x0; }
    double x1() const { return x0 + h; }

    OdeState<Dim> operator()(double x) const {
        const double th = (x - x0) / h;
        const double th1 = 1.0 - th;
        OdeState<Dim> y{};
        for (std::size_t i = 0; i < Dim; ++i)
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        return y;
    }
};

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_min = 1e-14;  // relative to |x| + 1
    long max_steps = 2'000'000;
};

enum class DriveStatus { Completed, Stopped, StepUnderflow, MaxSteps };

struct DriveResult {
    DriveStatus status = DriveStatus::Completed;
    double x = 0.0;
    long steps = 0;
    long rejected = 0;
};

namespace detail::dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace detail::dp

/// Integrates y' = f(x, y) from x to x_end with adaptive steps.
///
/// `observe(seg, y_old, y_new)` is called after every accepted step and returns true to stop.
template <std::size_t Dim, class Rhs, class Observer>
DriveResult drive_dopri5(Rhs&& f, double x, OdeState<Dim> y, double x_end, double h,
                         const StepControl& ctl, Observer&& observe) {
    using namespace detail::dp;
    using S = OdeState<Dim>;
    DriveResult res;
    const double dir = x_end >= x ? 1.0 : -1.0;
    h = dir * std::abs(h);
    S k1 = f(x, y), k2, k3, k4, k5, k6, k7, yt, ynew;
    bool last_rejected = false;

    while (dir * (x_end - x) > 0.0) {
        if (res.steps >= ctl.max_steps) {
            res.status = DriveStatus::MaxSteps;
            res.x = x;
            return res;
        }
        if (dir * (x + h - x_end) > 0.0) h = x_end - x;
        if (std::abs(h) < ctl.h_min * (std::abs(x) + 1.0)) {
            res.status = DriveStatus::StepUnderflow;
            res.x = x;
            return res;
        }
        for (std::size_t i = 0; i < Dim; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f(x + c2 * h, yt);
        for (std::size_t i = 0; i < Dim; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(x + c3 * h, yt);
        for (std::size_t i = 0; i < Dim; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(x + c4 * h, yt);
        for (std::size_t i = 0; i < Dim; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(x + c5 * h, yt);
        for (std::size_t i = 0; i < Dim; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double xph = (x_end - (x + h)) * dir <= 0.0 ? x_end : x + h;
        k6 = f(x + h, yt);
        for (std::size_t i = 0; i < Dim; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(xph, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / Dim);
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            DenseSegment<Dim> seg;
            seg.x0 = x;
            seg.h = h;
            for (std::size_t i = 0; i < Dim; ++i) {
                seg.c[0][i] = y[i];
                seg.c[1][i] = ynew[i] - y[i];
                seg.c[2][i] = h * k1[i] - seg.c[1][i];
                seg.c[3][i] = seg.c[1][i] - h * k7[i] - seg.c[2][i];
                seg.c[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            const S yold = y;
            x = xph;
            y = ynew;
            k1 = k7;
            ++res.steps;
            if (observe(seg, yold, y)) {
                res.status = DriveStatus::Stopped;
                res.x = x;
                return res;
            }
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            h *= fac;
            last_rejected = false;
        } else {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    res.status = DriveStatus::Completed;
    res.x = x;
    return res;
}

}  // namespace pucci
