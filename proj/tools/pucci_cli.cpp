#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pucci/io.hpp"
#include "pucci/parallel.hpp"
#include "pucci/pucci.hpp"

namespace {

using namespace pucci;

enum ExitCode : int { kOk = 0, kInvalid = 1, kNoSolution = 2, kBudget = 3, kVerifyFailed = 4 };

struct RunConfig {
    double lambda = 1.0;
    double Lambda = 1.0;
    int dim = 0;
    std::string op = "plus";
    std::optional<double> p;
    std::optional<double> eps;
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> ratios;
    double p_tol = 1e-10;
    double t_max = 35.0;
    double rel_tol = 1e-12;
    bool force_bisection = false;
    std::string out_json;
    std::string out_profile;
    std::string out_csv;
    std::string baseline;
    std::string suite = "all";

    Params params() const {
        if (dim == 0) throw InvalidParams("--dim is required");
        Params prm{lambda, Lambda, dim, parse_operator(op)};
        validate(prm);
        return prm;
    }

    CriticalOptions critical_options() const {
        if (!(p_tol > 0.0) || !(t_max > 0.0) || !(rel_tol > 0.0)) throw InvalidParams("tolerances must be positive");
        CriticalOptions o;
        o.p_tol = p_tol;
        o.t_max = t_max;
        o.rtol = rel_tol;
        o.atol = rel_tol * 1e-2;
        o.force_bisection = force_bisection;
        return o;
    }
};

void emit(const RunConfig& cfg, const Json& j) {
    if (cfg.out_json.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(cfg.out_json, j);
}

void print_checks(const std::string& suite, const std::vector<Check>& checks) {
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << '[' << suite << "] " << c.name << "  measured=" << fmt17(c.measured);
        if (c.threshold != 0.0) std::cout << "  threshold=" << fmt17(c.threshold);
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ')';
        std::cout << '\n';
    }
}

// ---------------------------------------------------------------------------------------------
// Regression baselines: {"tolerances": {field: rel}, "entries": [{params, field: value, ...}]}

std::vector<Check> compare_baseline(const std::string& path, const Params& prm, const Json& current) {
    std::ifstream in(path);
    if (!in) throw InvalidParams("cannot read baseline '" + path + "'");
    const Json base = Json::parse(in);
    const Json want = to_json(prm);
    std::vector<Check> out;
    for (const auto& e : base.at("entries")) {
        if (e.at("params") != want) continue;
        for (const auto& [field, tol] : base.at("tolerances").items()) {
            if (!e.contains(field) || !current.contains(field)) continue;
            const double b = e.at(field).get<double>(), c = current.at(field).get<double>();
            const double rel = std::abs(c - b) / std::max(std::abs(b), 1e-300);
            out.push_back(check_at_most("baseline " + field, rel, tol.get<double>()));
        }
        return out;
    }
    out.push_back(check_true("baseline entry present for these parameters", false));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Subcommands

int cmd_critical(const RunConfig& cfg) {
    const Params prm = cfg.params();
    const CriticalResult crit = find_critical(prm, cfg.critical_options());
    Json j = to_json(crit);
    j["E_star"] = energy_star(crit).value;
    emit(cfg, j);
    if (!cfg.out_profile.empty())
        write_file(cfg.out_profile, [](std::ostream& o, const RadialProfile& p) { write_profile_csv(o, p); },
                   crit.profile);
    if (!cfg.baseline.empty()) {
        const auto checks = compare_baseline(cfg.baseline, prm, j);
        print_checks("baseline", checks);
        if (!all_passed(checks)) return kVerifyFailed;
    }
    return crit.budget_exhausted ? kBudget : kOk;
}

int cmd_ball(const RunConfig& cfg) {
    const Params prm = cfg.params();
    if (cfg.p.has_value() == cfg.eps.has_value()) throw InvalidParams("ball needs exactly one of --p or --eps");
    if (cfg.p && !(*cfg.p > 1.0)) throw InvalidParams("exponent p must exceed 1");
    const CriticalResult crit = find_critical(prm, cfg.critical_options());
    BallSolution b;
    if (cfg.eps) {
        b = solve_ball_eps(crit, *cfg.eps);
    } else {
        BallOptions opt;
        opt.p_star = crit.p_star;
        opt.p_tolerance = crit.p_tolerance;
        b = solve_ball(prm, *cfg.p, opt);
    }
    emit(cfg, to_json(b));
    if (!cfg.out_profile.empty())
        write_file(cfg.out_profile, [](std::ostream& o, const BallSolution& s) { write_profile_csv(o, s); }, b);
    return kOk;
}

int cmd_phase(const RunConfig& cfg) {
    const Params prm = cfg.params();
    const double p = cfg.p ? *cfg.p : find_critical(prm, cfg.critical_options()).p_star;
    IntegratorConfig icfg;
    icfg.rtol = cfg.rel_tol;
    icfg.atol = cfg.rel_tol * 1e-2;
    const RadialProfile prof = integrate(prm, p, 1.0, StopCondition::shooting(cfg.t_max), icfg);
    const ExponentConstants c = exponent_constants(prm, p);
    PhaseTrajectory tr = to_phase(prof, c);
    const ShotOutcome outcome = classify(tr, cfg.t_max);
    const auto eq = equilibria(c, prm.outer_coef());
    Json j{{"params", to_json(prm)},
           {"p", p},
           {"lambda1", c.lambda1},
           {"lambda2", c.lambda2},
           {"x_s", eq.back()},
           {"classification", outcome_name(outcome)},
           {"residual", tr.residual}};
    emit(cfg, j);
    if (!cfg.out_profile.empty())
        write_file(cfg.out_profile, [](std::ostream& o, const PhaseTrajectory& t) { write_phase_csv(o, t); }, tr);
    return kOk;
}

struct SweepCell {
    std::optional<CriticalResult> crit;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.ratios.empty()) throw InvalidParams("sweep needs a non-empty --ratios grid");
    if (cfg.dim == 0) throw InvalidParams("--dim is required");
    const auto opts = cfg.critical_options();
    const std::size_t n = cfg.ratios.size();
    const auto cells = parallel_map(2 * n, [&](std::size_t k) {
        SweepCell cell;
        Params prm{cfg.lambda, cfg.lambda * cfg.ratios[k / 2], cfg.dim, k % 2 == 0 ? Operator::Plus : Operator::Minus};
        try {
            cell.crit = find_critical(prm, opts);
            cell.sigma = energy_star(*cell.crit).value;
        } catch (const Error& e) {
            cell.error = e.what();
        }
        return cell;
    });
    std::ostringstream csv;
    csv << "ratio,p_star_plus,c1_plus,R0_plus,Sigma_plus,p_star_minus,c1_minus,R0_minus,Sigma_minus,error\n";
    Json rows = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        csv << fmt17(cfg.ratios[i]);
        std::string err;
        Json row{{"ratio", cfg.ratios[i]}};
        for (int s = 0; s < 2; ++s) {
            const auto& cell = cells[2 * i + static_cast<std::size_t>(s)];
            const std::string tag = s == 0 ? "plus" : "minus";
            if (cell.crit) {
                csv << ',' << fmt17(cell.crit->p_star) << ',' << fmt17(cell.crit->c1) << ',' << fmt17(cell.crit->R0)
                    << ',' << fmt17(cell.sigma);
                row[tag] = to_json(*cell.crit);
                row[tag]["E_star"] = num(cell.sigma);
            } else {
                csv << ",,,,";
                err += (err.empty() ? "" : "; ") + tag + ": " + cell.error;
                row[tag] = {{"error", cell.error}};
            }
        }
        csv << ",\"" << err << "\"\n";
        rows.push_back(row);
    }
    if (cfg.out_csv.empty())
        std::cout << csv.str();
    else
        std::ofstream(cfg.out_csv) << csv.str();
    if (!cfg.out_json.empty()) write_json(cfg.out_json, Json{{"dim", cfg.dim}, {"lambda", cfg.lambda}, {"rows", rows}});
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// Verification suites

std::vector<Check> suite_oracle(int dim, Json& out) {
    std::vector<Check> ch;
    const Params prm{1.0, 1.0, dim, Operator::Plus};
    const double n = dim;
    const double p_exact = sobolev_exponent(dim);
    CriticalOptions forced;
    forced.force_bisection = true;
    forced.p_tol = 1e-9;
    const CriticalResult bis = find_critical(prm, forced);
    ch.push_back(check_at_most("forced bisection p* vs (N+2)/(N-2)", std::abs(bis.p_star - p_exact), 1e-6));

    const CriticalResult crit = find_critical(prm);
    const double k = n * (n - 2.0);
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double r = 10.0 * i / 4000.0;
        worst = std::max(worst, std::abs(crit.profile.u(r) - std::pow(1.0 + r * r / k, -(n - 2.0) / 2.0)));
    }
    ch.push_back(check_at_most("profile vs closed form on [0,10]", worst, 1e-7));
    const double c1 = std::pow(k, (n - 2.0) / 2.0);
    ch.push_back(check_at_most("c1 relative error", std::abs(crit.c1 - c1) / c1, 1e-3));
    ch.push_back(check_at_most("R0 vs sqrt(N(N-2)/(N-1))", std::abs(crit.R0 - std::sqrt(k / (n - 1.0))), 1e-6));
    const auto id = integral_identity_residual(crit);
    ch.push_back(check_at_most("integral identity residual", id.residual, 1e-6));
    const auto sc = sobolev_chain(crit);
    ch.push_back(check_at_most("(1/2 - 1/(p+1)) E* = S^N / N", sc.relative_gap, 1e-6));
    out["oracle"] = {{"p_star_bisection", bis.p_star}, {"c1", crit.c1}, {"R0", crit.R0}, {"sobolev", sc.sobolev}};
    return ch;
}

std::vector<Check> suite_pohozaev(const CriticalResult& crit, Json& out) {
    std::vector<Check> ch;
    const auto grid = log_grid(crit.R0, 100.0 * crit.R0, 400);
    Json curves = Json::array();
    for (const auto& pr : pohozaev_pairs(crit)) {
        const auto curve = pohozaev_curve(crit, pr.alpha, pr.beta, grid);
        ch.push_back(check_at_most("H' analytic vs numeric / scale (" + pr.name + ")", curve.max_gap / curve.scale, 1e-5));
        const auto integral = pohozaev_integral(crit, pr.alpha, pr.beta);
        ch.push_back(check_at_most("|int H' + H(R0)| relative (" + pr.name + ")", integral.relative_gap, 1e-5));
        curves.push_back({{"pair", pr.name}, {"alpha", pr.alpha}, {"beta", pr.beta}, {"H_R0", integral.H_R0},
                          {"relative_gap", integral.relative_gap}, {"curve_gap", curve.max_gap / curve.scale}});
    }
    const auto id = integral_identity_residual(crit);
    const auto perturbed = integral_identity_residual(crit, 1.01 * crit.p_star);
    ch.push_back(check_at_most("integral identity residual", id.residual, crit.params.laplacian() ? 1e-6 : 1e-4));
    ch.push_back(check_true("1% perturbation inflates residual >= 10x", perturbed.residual >= 10.0 * id.residual,
                            perturbed.residual / id.residual));
    out["pohozaev"] = {{"pairs", curves},
                       {"identity", {{"lhs", id.lhs}, {"rhs", id.rhs}, {"alt_rhs", id.alt_rhs},
                                     {"residual", id.residual}, {"perturbed_residual", perturbed.residual}}}};
    return ch;
}

std::vector<Check> suite_bounds(const CriticalResult& crit, Json& out) {
    std::vector<Check> ch;
    const auto rep = sandwich_check(crit);
    ch.push_back(check_at_most("two-sided bound violations (10% slack)", rep.violations, 0.0));
    ch.push_back(check_true("U has a single inflection (set X)", in_set_X(crit)));
    out["bounds"] = {{"lower_k", rep.constants.lower_k}, {"upper_k", rep.constants.upper_k},
                     {"min_lower_ratio", rep.min_lower_ratio}, {"max_upper_ratio", rep.max_upper_ratio},
                     {"violations", rep.violations}};
    return ch;
}

std::vector<Check> suite_energy(const CriticalResult& crit, const std::vector<double>& eps_list, Json& out) {
    std::vector<Check> ch;
    const auto star = energy_star(crit);
    for (double a : {0.5, 2.0, 10.0}) {
        const double rel = std::abs(energy_star_rescaled(crit, a).value - star.value) / star.value;
        ch.push_back(check_at_most("E*(U_a) invariance, a=" + fmt17(a), rel, 1e-6));
    }
    const auto sweep = energy_sweep(crit, eps_list);
    ch.push_back(check_true("|E_eps - E*| strictly decreasing", strictly_decreasing(sweep.gap), sweep.gap.back()));
    ch.push_back(check_at_most("Richardson limit vs E*", std::abs(sweep.extrapolated - star.value) / star.value, 1e-2));
    double route_gap = 0.0;
    for (std::size_t i = 0; i < sweep.eps.size(); ++i)
        route_gap = std::max(route_gap, std::abs(sweep.energy[i] - sweep.energy_rescaled[i]) / sweep.energy[i]);
    ch.push_back(check_at_most("E_eps(u) = E_eps(u~) per eps", route_gap, 1e-9));
    Json j = to_json(sweep);
    if (crit.params.laplacian()) {
        const auto sc = sobolev_chain(crit);
        ch.push_back(check_at_most("(1/2 - 1/(p+1)) E* = S^N / N", sc.relative_gap, 1e-6));
        j["sobolev"] = {{"lhs", sc.lhs}, {"rhs", sc.rhs}};
    } else {
        const auto dp = d_plus_invariance(crit.params, {0.5, 2.0, 10.0});
        double worst = 0.0;
        for (double g : dp.relative_gaps) worst = std::max(worst, g);
        ch.push_back(check_at_most("D+ energy invariance (weight |x|^(N~-N))", worst, 1e-6));
    }
    out["energy"] = j;
    return ch;
}

std::vector<Check> suite_theorem1(const CriticalResult& crit, const std::vector<double>& eps_list, Json& out) {
    const auto rep = theorem1_sweep(crit, eps_list);
    const auto der = derivative_limit_sweep(crit, eps_list);
    std::vector<Check> ch = rep.checks;
    ch.insert(ch.end(), der.checks.begin(), der.checks.end());
    double height = 0.0;
    for (const auto& row : rep.rows) {
        BallOptions two;
        two.u0 = 2.0;
        const auto a = solve_ball_eps(crit, row.eps);
        const auto b = solve_ball_eps(crit, row.eps, two);
        for (int i = 0; i <= 1000; ++i) {
            const double r = i / 1000.0;
            height = std::max(height, std::abs(a.u(r) - b.u(r)) / a.M);
        }
    }
    ch.push_back(check_at_most("shooting-height independence (u0 = 1 vs 2)", height, 1e-9));
    out["theorem1"] = to_json(rep);
    out["derivative_limit"] = to_json(der);
    return ch;
}

int cmd_verify(const RunConfig& cfg) {
    static const std::vector<std::string> suites{"oracle", "pohozaev", "bounds", "energy", "theorem1"};
    if (cfg.suite != "all" && std::find(suites.begin(), suites.end(), cfg.suite) == suites.end())
        throw InvalidParams("unknown suite '" + cfg.suite + "'");
    const Params prm = cfg.params();
    auto wanted = [&](const std::string& s) { return cfg.suite == "all" || cfg.suite == s; };
    Json out{{"params", to_json(prm)}, {"suite", cfg.suite}};
    std::vector<Check> all;
    auto run = [&](const std::string& name, std::vector<Check> checks) {
        print_checks(name, checks);
        all.insert(all.end(), checks.begin(), checks.end());
    };
    if (wanted("oracle")) run("oracle", suite_oracle(prm.dim, out));
    if (cfg.suite != "oracle") {
        const CriticalResult crit = find_critical(prm, cfg.critical_options());
        out["critical"] = to_json(crit);
        if (wanted("pohozaev")) run("pohozaev", suite_pohozaev(crit, out));
        if (wanted("bounds")) run("bounds", suite_bounds(crit, out));
        if (wanted("energy")) run("energy", suite_energy(crit, cfg.eps_list, out));
        if (wanted("theorem1")) run("theorem1", suite_theorem1(crit, cfg.eps_list, out));
        if (!cfg.baseline.empty()) {
            Json cur = to_json(crit);
            cur["E_star"] = energy_star(crit).value;
            run("baseline", compare_baseline(cfg.baseline, prm, cur));
        }
    }
    out["checks"] = to_json(all);
    out["passed"] = all_passed(all);
    if (!cfg.out_json.empty()) write_json(cfg.out_json, out);
    std::size_t failed = 0;
    for (const auto& c : all) failed += c.passed ? 0 : 1;
    std::cout << (failed == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failed)) << " (" << all.size() << " checks)\n";
    return failed == 0 ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical exponents and ball solutions for the radial Pucci problem -M(D^2 u) = u^p"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    RunConfig cfg;
    app.add_option("--lambda", cfg.lambda, "Smaller ellipticity constant")->capture_default_str();
    app.add_option("--Lambda", cfg.Lambda, "Larger ellipticity constant")->capture_default_str();
    app.add_option("--dim", cfg.dim, "Space dimension N >= 3");
    app.add_option("--op", cfg.op, "Extremal operator")->check(CLI::IsMember({"plus", "minus"}))->capture_default_str();
    app.add_option("--p", cfg.p, "Exponent");
    app.add_option("--eps", cfg.eps, "Distance below the critical exponent");
    app.add_option("--eps-list", cfg.eps_list, "Sweep values of eps")->delimiter(',')->capture_default_str();
    app.add_option("--ratios", cfg.ratios, "Grid of Lambda/lambda ratios for sweep")->delimiter(',');
    app.add_option("--p-tol", cfg.p_tol, "Bisection tolerance on p*")->capture_default_str();
    app.add_option("--t-max", cfg.t_max, "Initial log-radius horizon of the classifier")->capture_default_str();
    app.add_option("--rel-tol", cfg.rel_tol, "Integrator relative tolerance")->capture_default_str();
    app.add_flag("--force-bisection", cfg.force_bisection, "Bisect even when lambda = Lambda");
    app.add_option("--out-json", cfg.out_json, "JSON result path (stdout when empty)");
    app.add_option("--out-profile", cfg.out_profile, "Profile or phase-trajectory CSV path");
    app.add_option("--out-csv", cfg.out_csv, "Sweep table CSV path (stdout when empty)");
    app.add_option("--baseline", cfg.baseline, "Regression JSON to compare against");
    app.add_option("--suite", cfg.suite, "oracle|pohozaev|bounds|energy|theorem1|all")->capture_default_str();

    auto* critical = app.add_subcommand("critical", "Critical exponent and fast-decay profile U");
    auto* ball = app.add_subcommand("ball", "Dirichlet solution in the unit ball");
    auto* sweep = app.add_subcommand("sweep", "Critical data over a grid of Lambda/lambda ratios");
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    auto* phase = app.add_subcommand("phase", "Emden-Fowler phase trajectory of one shot");
    for (auto* s : {critical, ball, sweep, verify, phase}) s->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*critical) return cmd_critical(cfg);
        if (*ball) return cmd_ball(cfg);
        if (*sweep) return cmd_sweep(cfg);
        if (*verify) return cmd_verify(cfg);
        if (*phase) return cmd_phase(cfg);
    } catch (const BracketViolation& e) {
        std::cerr << "bracket violated: " << e.what() << '\n';
        return kNoSolution;
    } catch (const Supercritical& e) {
        std::cerr << e.what() << '\n';
        return kNoSolution;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}
