#pragma once

// JSON and CSV export of results. JSON numbers use the shortest representation that
// round-trips; CSV cells use 17 significant digits.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "pucci/ball.hpp"
#include "pucci/check.hpp"
#include "pucci/critical.hpp"
#include "pucci/diagnostics.hpp"
#include "pucci/emden_fowler.hpp"
#include "pucci/integrator.hpp"

namespace pucci {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// NaN and infinities become null, everything else a JSON number.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const Params& prm) {
    return {{"lambda", prm.lambda}, {"Lambda", prm.Lambda}, {"dim", prm.dim}, {"op", std::string(to_string(prm.op))}};
}

inline Json to_json(const ExponentBracket& b) {
    Json j{{"lo", b.lo}, {"hi", b.hi}};
    j["exact"] = b.exact ? Json(*b.exact) : Json(nullptr);
    return j;
}

inline Json to_json(const ProfileEvents& e) {
    Json j;
    j["first_zero"] = e.first_zero ? Json(*e.first_zero) : Json(nullptr);
    j["inflection"] = e.inflection ? Json(*e.inflection) : Json(nullptr);
    j["inflection_count"] = e.inflection_count;
    j["derivative_zero_count"] = e.derivative_zero_count;
    return j;
}

inline Json profile_metadata(const RadialProfile& prof) {
    return {{"params", to_json(prof.params)},
            {"p", prof.p},
            {"u0", prof.u0},
            {"events", to_json(prof.events)},
            {"termination", to_string(prof.termination)},
            {"tolerances", {{"rtol", prof.rtol}, {"atol", prof.atol}}},
            {"nodes", prof.nodes.size()}};
}

inline Json to_json(const CriticalResult& c) {
    Json hist = Json::array();
    for (const auto& h : c.history) hist.push_back({{"p", h.p}, {"outcome", outcome_name(h.outcome)}, {"t_max", h.t_max}});
    return {{"params", to_json(c.params)},
            {"op_sign", c.params.op == Operator::Plus ? 1 : -1},
            {"dimension_like", c.dimension_like()},
            {"p_star", c.p_star},
            {"p_tolerance", c.p_tolerance},
            {"exact_mode", c.exact_mode},
            {"budget_exhausted", c.budget_exhausted},
            {"c1", c.c1},
            {"c1_err", c.c1_err},
            {"R0", c.R0},
            {"U_R0", c.U_R0},
            {"bracket", to_json(c.bracket)},
            {"iterations", c.iterations},
            {"t_max_used", c.t_max_used},
            {"match_radius", num(c.match_radius)},
            {"match_defect", num(c.match_defect)},
            {"history", hist}};
}

inline Json to_json(const BallSolution& b) {
    return {{"params", to_json(b.params)}, {"p", b.p},          {"eps", num(b.eps)},
            {"M", b.M},                    {"R", b.R},          {"r0", b.r0},
            {"r0_tilde", b.r0_tilde()},    {"du_at_1", b.du_at_1}, {"residual", b.residual},
            {"shot_u0", b.shot.u0}};
}

inline Json to_json(const Check& c) {
    return {{"name", c.name}, {"passed", c.passed}, {"measured", num(c.measured)},
            {"threshold", num(c.threshold)}, {"detail", c.detail}};
}

inline Json to_json(const std::vector<Check>& checks) {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back(to_json(c));
    return a;
}

inline Json to_json(const Theorem1Report& rep) {
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"eps", r.eps},
                        {"p_eps", r.p_eps},
                        {"M_eps", r.M},
                        {"R", r.R},
                        {"r0_eps", r.r0},
                        {"r0_tilde", r.r0_tilde},
                        {"u_r0_over_M", r.u_r0_over_M},
                        {"du_at_1", r.du_at_1},
                        {"scaled_derivative", r.scaled_derivative},
                        {"sup_outside", r.sup_outside},
                        {"sup_profile_gap", r.sup_profile_gap},
                        {"sup_far_field_gap", r.sup_far_field_gap},
                        {"invariance_gap", r.invariance_gap},
                        {"conv_infinite", r.conv_infinite},
                        {"conv_half", r.conv_half},
                        {"estib_max", r.estib_max},
                        {"phsp_u", r.phsp_u},
                        {"phsp_du", r.phsp_du},
                        {"eqd_violations", r.eqd_violations},
                        {"residual", r.residual}});
    }
    return {{"params", to_json(rep.params)}, {"p_star", rep.p_star},   {"c1", rep.c1},
            {"R0", rep.R0},                  {"U_R0", rep.U_R0},       {"r1_list", rep.r1_list},
            {"K_list", rep.K_list},          {"rows", rows},           {"excluded_eps", rep.excluded_eps},
            {"checks", to_json(rep.checks)}};
}

inline Json to_json(const DerivativeLimitReport& rep) {
    return {{"eps", rep.eps},
            {"scaled_derivative", rep.scaled_derivative},
            {"cauchy", rep.cauchy},
            {"extrapolated", num(rep.extrapolated)},
            {"exact_limit", rep.exact_limit},
            {"integrated_identity", rep.integrated_identity},
            {"alt_limit", rep.alt_limit},
            {"checks", to_json(rep.checks)}};
}

inline Json to_json(const EnergySweep& s) {
    return {{"E_star", s.sigma},     {"eps", s.eps},         {"E_eps", s.energy},
            {"E_eps_rescaled", s.energy_rescaled}, {"gap", s.gap}, {"observed_order", s.rate},
            {"richardson", num(s.extrapolated)},   {"observed_order_extrapolation", num(s.aitken)}};
}

inline void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

/// One row per stored node: r,u,du,ddu.
inline void write_profile_csv(std::ostream& out, const RadialProfile& prof) {
    out << "r,u,du,ddu\n";
    for (const auto& n : prof.nodes)
        out << fmt17(n.r) << ',' << fmt17(n.u) << ',' << fmt17(n.du) << ',' << fmt17(n.ddu) << '\n';
}

/// Nodes of the ball solution on [0, 1], mapped through the scaling of the stored shot.
inline void write_profile_csv(std::ostream& out, const BallSolution& b) {
    out << "r,u,du,ddu\n";
    const double rw = b.shot_zero(), s = b.shot_scale();
    for (const auto& n : b.shot.nodes) {
        if (n.r > rw) break;
        out << fmt17(n.r / rw) << ',' << fmt17(s * n.u) << ',' << fmt17(s * rw * n.du) << ','
            << fmt17(s * rw * rw * n.ddu) << '\n';
    }
}

inline void write_phase_csv(std::ostream& out, const PhaseTrajectory& tr) {
    out << "t,x,dx\n";
    for (const auto& pt : tr.points) out << fmt17(pt.t) << ',' << fmt17(pt.x) << ',' << fmt17(pt.dx) << '\n';
}

inline void write_pohozaev_csv(std::ostream& out, const PohozaevCurve& c) {
    out << "r,H,dH_analytic,dH_numeric\n";
    for (const auto& s : c.samples)
        out << fmt17(s.r) << ',' << fmt17(s.H) << ',' << fmt17(s.dH_analytic) << ',' << fmt17(s.dH_numeric) << '\n';
}

inline void write_energy_csv(std::ostream& out, const EnergySweep& s) {
    out << "eps,E_eps,E_eps_rescaled,gap\n";
    for (std::size_t i = 0; i < s.eps.size(); ++i)
        out << fmt17(s.eps[i]) << ',' << fmt17(s.energy[i]) << ',' << fmt17(s.energy_rescaled[i]) << ','
            << fmt17(s.gap[i]) << '\n';
}

inline void write_theorem1_csv(std::ostream& out, const Theorem1Report& rep) {
    out << "eps,p_eps,M_eps,r0_eps,du_at_1,sup_u_r_ge_0.25,sup_gap_U_0_5,far_field_gap\n";
    for (const auto& r : rep.rows)
        out << fmt17(r.eps) << ',' << fmt17(r.p_eps) << ',' << fmt17(r.M) << ',' << fmt17(r.r0) << ','
            << fmt17(r.du_at_1) << ',' << fmt17(r.sup_outside.at(1)) << ',' << fmt17(r.sup_profile_gap.at(1)) << ','
            << fmt17(r.sup_far_field_gap) << '\n';
}

template <class Writer, class T>
void write_file(const std::string& path, Writer&& w, const T& value) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    w(out, value);
}

}  // namespace pucci
