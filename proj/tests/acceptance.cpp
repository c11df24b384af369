// One PASS/FAIL line per acceptance criterion; exit status 1 when any criterion fails.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pucci/pucci.hpp"

using namespace pucci;

namespace {

using Clock = std::chrono::steady_clock;

struct Line {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

template <class F>
void criterion(int id, const char* title, F&& body) {
    const auto t0 = Clock::now();
    Line line;
    try {
        body(line);
    } catch (const std::exception& e) {
        line.ok = false;
        line.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!line.ok) ++failures;
    std::printf("%s  %2d  %-44s %7.2fs %s\n", line.ok ? "PASS" : "FAIL", id, title, secs, line.note.str().c_str());
    std::fflush(stdout);
}

const std::vector<double> kSweep{0.2, 0.1, 0.05, 0.025, 0.0125};

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

int main() {
    const Params plus{1, 2, 4, Operator::Plus};
    const Params minus{1, 2, 4, Operator::Minus};
    const CriticalResult crit_plus = find_critical(plus);
    const CriticalResult crit_minus = find_critical(minus);
    const CriticalResult lap4 = find_critical({1, 1, 4, Operator::Plus});

    criterion(1, "forced bisection recovers (N+2)/(N-2)", [](Line& l) {
        for (int n : {3, 4, 5}) {
            const auto t0 = Clock::now();
            CriticalOptions opt;
            opt.force_bisection = true;
            const auto res = find_critical({1, 1, n, Operator::Plus}, opt);
            const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
            const double err = std::abs(res.p_star - (n + 2.0) / (n - 2.0));
            l.note << " N=" << n << ": err " << g(err) << " in " << g(secs) << "s;";
            l.require(err <= 1e-6, "N=" + std::to_string(n) + " accuracy");
            l.require(secs <= 60.0, "N=" + std::to_string(n) + " runtime");
        }
    });

    criterion(2, "profile vs (1+r^2/8)^-1 on [0,10]", [&](Line& l) {
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double r = 10.0 * i / 10000.0;
            worst = std::max(worst, std::abs(lap4.profile.u(r) - oracle::talenti(4, r)));
        }
        l.note << " max gap " << g(worst);
        l.require(worst <= 1e-7, "max gap");
    });

    criterion(3, "c1 and R0 in the Laplacian case", [&](Line& l) {
        for (int n : {3, 4, 5}) {
            const auto res = n == 4 ? lap4 : find_critical({1, 1, n, Operator::Plus});
            const double rel = std::abs(res.c1 - oracle::talenti_c1(n)) / oracle::talenti_c1(n);
            l.note << " N=" << n << ": c1 rel " << g(rel) << ";";
            l.require(rel <= 1e-3, "c1 N=" + std::to_string(n));
        }
        const double dr = std::abs(lap4.R0 - std::sqrt(8.0 / 3.0));
        l.note << " R0 gap " << g(dr);
        l.require(dr <= 1e-6, "R0");
    });

    criterion(4, "bracket membership and ordering", [](Line& l) {
        const auto t0 = Clock::now();
        for (double big : {1.5, 2.0, 4.0}) {
            for (int n : {4, 5}) {
                const Params pm{1, big, n, Operator::Minus};
                const auto cm = find_critical(pm);
                const auto bm = exponent_bracket(pm);
                const bool m_in = cm.p_star - cm.p_tolerance > bm.lo && cm.p_star + cm.p_tolerance < bm.hi;
                const bool m_below = cm.p_star + cm.p_tolerance < sobolev_exponent(n);
                l.require(m_in && m_below, "M- (1," + g(big) + ") N=" + std::to_string(n));
                const Params pp = pm.with_op(Operator::Plus);
                if (!(dimension_like_unchecked(pp) > 2.0)) {
                    l.note << " (1," << g(big) << ") N=" << n << " M+ N/A (N~=" << g(dimension_like_unchecked(pp))
                           << "<=2);";
                    continue;
                }
                const auto cp = find_critical(pp);
                const auto rep = critical_ordering_check(cp, cm);
                l.require(rep.plus_in_bracket && rep.minus_in_bracket && rep.ordered,
                          "(1," + g(big) + ") N=" + std::to_string(n));
            }
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        l.require(secs <= 300.0, "runtime");
    });

    criterion(5, "Pohozaev identities", [&](Line& l) {
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            for (const auto& pr : pohozaev_pairs(*crit)) {
                if (pr.name == "plain") continue;
                const auto in = pohozaev_integral(*crit, pr.alpha, pr.beta);
                const auto curve =
                    pohozaev_curve(*crit, pr.alpha, pr.beta, log_grid(crit->R0, 100.0 * crit->R0, 400));
                const double d = curve.max_gap / curve.scale;
                l.note << ' ' << to_string(crit->params.op) << '/' << pr.name << ": " << g(in.relative_gap) << ", "
                       << g(d) << ';';
                l.require(in.relative_gap <= 1e-4, "integral " + pr.name);
                l.require(d <= 1e-5, "derivative " + pr.name);
            }
        }
    });

    criterion(6, "integral characterization residual", [&](Line& l) {
        const auto lap = integral_identity_residual(lap4);
        const auto lap_off = integral_identity_residual(lap4, 1.01 * lap4.p_star);
        l.note << " lap " << g(lap.residual) << " (1% off: " << g(lap_off.residual) << ");";
        l.require(lap.residual <= 1e-6, "laplacian");
        l.require(lap_off.residual >= 10.0 * lap.residual, "laplacian sensitivity");
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            const auto id = integral_identity_residual(*crit);
            const auto off = integral_identity_residual(*crit, 1.01 * crit->p_star);
            l.note << ' ' << to_string(crit->params.op) << ' ' << g(id.residual) << " (1% off: " << g(off.residual)
                   << ");";
            l.require(id.residual <= 1e-4, to_string(crit->params.op).data());
            l.require(off.residual >= 10.0 * id.residual, "sensitivity");
        }
    });

    criterion(7, "sandwich bounds, 10% slack", [&](Line& l) {
        for (const auto* crit : {&crit_plus, &crit_minus, &lap4}) {
            const auto rep = sandwich_check(*crit);
            l.note << ' ' << to_string(crit->params.op) << (crit->params.laplacian() ? "(lap)" : "") << ": "
                   << rep.violations << '/' << rep.points << ';';
            l.require(rep.violations == 0, "violations");
        }
    });

    criterion(8, "concentration sweep, lambda=1 Lambda=2 N=4", [&](Line& l) {
        const auto t0 = Clock::now();
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            const auto rep = theorem1_sweep(*crit, kSweep);
            std::vector<double> M, s25, gap5, far;
            for (const auto& r : rep.rows) {
                M.push_back(r.M);
                s25.push_back(r.sup_outside.at(1));
                gap5.push_back(r.sup_profile_gap.at(1));
                far.push_back(r.sup_far_field_gap);
            }
            const std::string op(to_string(crit->params.op));
            const double ratio = s25.back() / s25.front();
            l.note << ' ' << op << ": sup ratio " << g(ratio) << ';';
            l.require(rep.rows.size() == kSweep.size(), op + " all eps admissible");
            l.require(strictly_increasing(M), op + " (i) M increasing");
            l.require(strictly_decreasing(s25), op + " (ii) sup decreasing");
            l.require(ratio < 0.1, op + " (ii) final < 10% of initial");
            l.require(strictly_decreasing(gap5), op + " (iii)");
            l.require(strictly_decreasing(far), op + " (iv)");
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        l.require(secs <= 600.0, "runtime");
    });

    criterion(9, "energy invariance under rescaling", [&](Line& l) {
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            const double base = energy_star(*crit).value;
            double worst = 0.0;
            for (double a : {0.5, 2.0, 10.0})
                worst = std::max(worst, std::abs(energy_star_rescaled(*crit, a).value - base) / base);
            l.note << ' ' << to_string(crit->params.op) << ' ' << g(worst) << ';';
            l.require(worst <= 1e-6, to_string(crit->params.op).data());
        }
    });

    criterion(10, "energy limit and Sobolev chain", [&](Line& l) {
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            const auto s = energy_sweep(*crit, kSweep);
            const double rel = std::abs(s.extrapolated - s.sigma) / s.sigma;
            const std::string op(to_string(crit->params.op));
            l.note << ' ' << op << ": extrapolation " << g(rel) << ';';
            l.require(strictly_decreasing(s.gap), op + " gap decreasing");
            l.require(rel <= 0.01, op + " extrapolation");
        }
        const auto chain = sobolev_chain(lap4);
        l.note << " chain " << g(chain.relative_gap);
        l.require(chain.relative_gap <= 1e-6, "chain");
    });

    criterion(11, "height independence, invariance, determinism", [&](Line& l) {
        double height = 0.0, inv = 0.0;
        for (const auto* crit : {&crit_plus, &crit_minus}) {
            for (double eps : kSweep) {
                BallOptions two;
                two.u0 = 2.0;
                const auto a = solve_ball_eps(*crit, eps);
                const auto b = solve_ball_eps(*crit, eps, two);
                height = std::max(height, std::abs(a.M - b.M) / a.M);
            }
            for (const auto& r : theorem1_sweep(*crit, kSweep).rows) inv = std::max(inv, r.invariance_gap);
        }
        const bool same = to_json(find_critical(minus)).dump() == to_json(crit_minus).dump() &&
                          to_json(solve_ball_eps(crit_plus, 0.05)).dump() == to_json(solve_ball_eps(crit_plus, 0.05)).dump();
        l.note << " height " << g(height) << "; invariance " << g(inv) << "; json " << (same ? "identical" : "differs");
        l.require(height <= 1e-9, "height independence");
        l.require(inv <= 1e-10, "invariance");
        l.require(same, "determinism");
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
