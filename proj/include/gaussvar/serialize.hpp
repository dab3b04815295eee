#pragma once

// JSON records for specs, measures, families, expansions, and reports, plus
// fixed-format columnar text tables. Table cells print through one shared
// twelve-digit scientific formatter so identical inputs always produce
// byte-identical files; JSON objects serialize with sorted keys for the same
// reason. Config parsing tolerates missing fields (defaults apply) and
// rejects unknown registry references up front.

#include <json.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gaussvar/conditions.hpp"
#include "gaussvar/exponent.hpp"
#include "gaussvar/gauss_measure.hpp"
#include "gaussvar/grid.hpp"
#include "gaussvar/hermite.hpp"
#include "gaussvar/kernel.hpp"
#include "gaussvar/maximal.hpp"
#include "gaussvar/registry.hpp"

namespace gaussvar {

using nlohmann::json;

// --- enum names ------------------------------------------------------------

inline const char* to_string(MeasureKind k) {
    return k == MeasureKind::gaussian ? "gaussian" : "lebesgue";
}

inline MeasureKind measure_kind_from(const std::string& s) {
    if (s == "gaussian") return MeasureKind::gaussian;
    if (s == "lebesgue") return MeasureKind::lebesgue;
    throw std::invalid_argument("measure kind must be 'gaussian' or 'lebesgue', got '" + s + "'");
}

inline ExponentKind exponent_kind_from(const std::string& s) {
    if (s == "constant") return ExponentKind::constant;
    if (s == "p_inf_plus_inverse_square") return ExponentKind::p_inf_plus_inverse_square;
    if (s == "p_inf_plus_inverse_log") return ExponentKind::p_inf_plus_inverse_log;
    if (s == "radial_table") return ExponentKind::radial_table;
    if (s == "step_jump") return ExponentKind::step_jump;
    throw std::invalid_argument("unknown exponent kind '" + s + "'");
}

inline const char* to_string(EndpointMap m) {
    return m == EndpointMap::none ? "none" : "double_exponential";
}

inline EndpointMap endpoint_map_from(const std::string& s) {
    if (s == "none") return EndpointMap::none;
    if (s == "double_exponential") return EndpointMap::double_exponential;
    throw std::invalid_argument("unknown endpoint map '" + s + "'");
}

// --- json records ----------------------------------------------------------

inline void to_json(json& j, const MeasureHandle& mu) {
    j = json{{"kind", to_string(mu.kind)}, {"dim", mu.dim}};
}

inline void from_json(const json& j, MeasureHandle& mu) {
    mu.kind = measure_kind_from(j.value("kind", std::string("gaussian")));
    mu.dim = j.value("dim", 1);
}

inline void to_json(json& j, const RadialTable& t) {
    j = json{{"r", t.r}, {"p", t.p}, {"p_inf", t.p_inf}, {"tail_power", t.tail_power}};
}

inline void from_json(const json& j, RadialTable& t) {
    t.r = j.value("r", std::vector<double>{});
    t.p = j.value("p", std::vector<double>{});
    t.p_inf = j.value("p_inf", 2.0);
    t.tail_power = j.value("tail_power", 1.0);
}

inline void to_json(json& j, const ExponentSpec& s) {
    j = json{{"kind", to_string(s.kind)},
             {"dim", s.dim},
             {"clip_lo", s.clip_lo},
             {"clip_hi", s.clip_hi},
             {"conjugated", s.conjugated},
             {"name", s.name}};
    switch (s.kind) {
        case ExponentKind::constant: j["value"] = s.value; break;
        case ExponentKind::p_inf_plus_inverse_square:
        case ExponentKind::p_inf_plus_inverse_log:
            j["p_inf"] = s.p_inf;
            j["coeff"] = s.coeff;
            break;
        case ExponentKind::radial_table: j["table"] = s.table; break;
        case ExponentKind::step_jump:
            j["jump_lo"] = s.jump_lo;
            j["jump_hi"] = s.jump_hi;
            j["jump_normal"] = s.jump_normal;
            j["jump_offset"] = s.jump_offset;
            break;
    }
}

inline void from_json(const json& j, ExponentSpec& s) {
    s = ExponentSpec{};
    s.kind = exponent_kind_from(j.value("kind", std::string("constant")));
    s.dim = j.value("dim", 1);
    s.clip_lo = j.value("clip_lo", 1.0);
    s.clip_hi = j.value("clip_hi", 64.0);
    s.conjugated = j.value("conjugated", false);
    s.name = j.value("name", std::string{});
    s.value = j.value("value", 2.0);
    s.p_inf = j.value("p_inf", 2.0);
    s.coeff = j.value("coeff", 1.0);
    if (j.contains("table")) s.table = j.at("table").get<RadialTable>();
    s.jump_lo = j.value("jump_lo", 2.0);
    s.jump_hi = j.value("jump_hi", 3.0);
    s.jump_normal = j.value("jump_normal", Point{});
    s.jump_offset = j.value("jump_offset", 0.0);
    if (s.kind == ExponentKind::step_jump && s.jump_normal.empty())
        s.jump_normal = [&] {
            Point e(s.dim, 0.0);
            e[0] = 1.0;
            return e;
        }();
    validate(s);
}

inline void to_json(json& j, const QuadratureConfig& q) {
    j = json{{"t_panels", q.t_panels},
             {"endpoint_map", to_string(q.endpoint_map)},
             {"pv_radii", q.pv_radii},
             {"domain_truncation_radius", q.domain_truncation_radius},
             {"tol", q.tol},
             {"pv_tol", q.pv_tol},
             {"singular_floor", q.singular_floor},
             {"n_theta", q.n_theta}};
}

inline void from_json(const json& j, QuadratureConfig& q) {
    QuadratureConfig d;
    q.t_panels = j.value("t_panels", d.t_panels);
    q.endpoint_map = endpoint_map_from(j.value("endpoint_map", std::string("double_exponential")));
    q.pv_radii = j.value("pv_radii", d.pv_radii);
    q.domain_truncation_radius = j.value("domain_truncation_radius", d.domain_truncation_radius);
    q.tol = j.value("tol", d.tol);
    q.pv_tol = j.value("pv_tol", d.pv_tol);
    q.singular_floor = j.value("singular_floor", d.singular_floor);
    q.n_theta = j.value("n_theta", d.n_theta);
}

inline void to_json(json& j, const Ball& b) {
    j = json{{"center", b.center}, {"radius", b.radius}};
}

inline void from_json(const json& j, Ball& b) {
    b.center = j.at("center").get<Point>();
    b.radius = j.at("radius").get<double>();
}

inline void to_json(json& j, const BallFamily& fam) {
    j = json{{"balls", fam.balls}, {"dilates", fam.dilates}};
}

inline void from_json(const json& j, BallFamily& fam) {
    fam.balls = j.at("balls").get<std::vector<Ball>>();
    if (j.contains("dilates"))
        fam.dilates = j.at("dilates").get<std::vector<Ball>>();
    else
        fam = ball_family(std::move(fam.balls));
    if (fam.dilates.size() != fam.balls.size())
        throw std::invalid_argument("BallFamily: balls and dilates must be parallel");
}

inline void to_json(json& j, const MultiIndex& a) { j = a.k; }

inline void from_json(const json& j, MultiIndex& a) {
    a = MultiIndex(j.get<std::vector<int>>());
}

inline void to_json(json& j, const HermiteExpansion& e) {
    json terms = json::array();
    for (const auto& [a, c] : e.coeffs) terms.push_back(json{{"alpha", a}, {"c", c}});
    j = json{{"dim", e.dim}, {"max_order", e.max_order()}, {"terms", std::move(terms)}};
}

inline void from_json(const json& j, HermiteExpansion& e) {
    e = HermiteExpansion{};
    e.dim = j.value("dim", 1);
    for (const auto& t : j.value("terms", json::array()))
        e.add(t.at("alpha").get<MultiIndex>(), t.at("c").get<double>());
}

inline void to_json(json& j, const Witness& w) {
    j = json{{"value", w.value}};
    if (w.is_pair) {
        j["x"] = w.x;
        j["y"] = w.y;
    } else {
        j["ball"] = w.ball;
    }
}

inline void to_json(json& j, const ConditionReport& r) {
    j = json{{"condition", to_string(r.condition)},
             {"exponent", r.exponent_name},
             {"fitted_constant", r.fitted_constant},
             {"coarse_constant", r.coarse_constant},
             {"stability_delta", r.stability_delta},
             {"stability_threshold", r.stability_threshold},
             {"finite", r.finite},
             {"pass", r.pass},
             {"n_samples", r.n_samples},
             {"seed", r.seed},
             {"p_inf_candidate", r.p_inf_candidate},
             {"p_inf_fitted", r.p_inf_fitted},
             {"witnesses", r.witnesses},
             {"notes", r.notes}};
}

inline void to_json(json& j, const GrowthReport& r) {
    j = json{{"c_value", r.c_value}, {"c_gradient", r.c_gradient}, {"n_samples", r.n_samples}};
}

inline void to_json(json& j, const KernelCheckReport& r) {
    j = json{{"check", r.check},           {"sample", r.sample},
             {"n_samples", r.n_samples},   {"fitted_constant", r.fitted_constant},
             {"stability_delta", r.stability_delta}, {"pass", r.pass},
             {"notes", r.notes}};
}

inline void to_json(json& j, const GlobalBoundReport& r) {
    j = json{{"eps", r.eps},           {"alpha_inf", r.alpha_inf}, {"fitted_c", r.fitted_c},
             {"d_sup", r.d_sup},       {"n_samples", r.n_samples}, {"pass", r.pass}};
}

inline void to_json(json& j, const BoundsExpReport& r) {
    j = json{{"eps", r.eps},
             {"c_eps_bneg", r.c_eps_bneg},
             {"c_eps_bpos", r.c_eps_bpos},
             {"delta_bneg", r.delta_bneg},
             {"delta_bpos", r.delta_bpos},
             {"n_bneg", r.n_bneg},
             {"n_bpos", r.n_bpos},
             {"pass", r.pass}};
}

inline void to_json(json& j, const InequalityReport& r) {
    j = json{{"name", r.name},
             {"n_samples", r.n_samples},
             {"violations", r.violations},
             {"worst_margin", r.worst_margin},
             {"worst_lhs", r.worst_lhs},
             {"worst_rhs", r.worst_rhs},
             {"seed", r.seed},
             {"pass", r.pass}};
}

inline void to_json(json& j, const RatioRow& r) {
    j = json{{"name", r.name}, {"norm_f", r.norm_f}, {"norm_mf", r.norm_mf}, {"ratio", r.ratio}};
}

inline void to_json(json& j, const RatioTable& t) {
    j = json{{"rows", t.rows}, {"empirical_k", t.empirical_k}, {"finite", t.finite}};
}

// --- columnar text tables --------------------------------------------------

inline std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

namespace detail {

inline void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += "  ";
        out += cells[i];
    }
    out += '\n';
}

}  // namespace detail

// one row per ball: index, center coordinates, radius, dilate radius
inline std::string ball_family_table(const BallFamily& fam) {
    std::string out = "# index";
    for (int i = 0; i < fam.dim(); ++i) out += "  center_" + std::to_string(i);
    out += "  radius  dilate_radius\n";
    for (std::size_t k = 0; k < fam.size(); ++k) {
        std::vector<std::string> cells{std::to_string(k)};
        for (double c : fam.balls[k].center) cells.push_back(format_sci(c));
        cells.push_back(format_sci(fam.balls[k].radius));
        cells.push_back(format_sci(fam.dilates[k].radius));
        detail::append_row(out, cells);
    }
    return out;
}

// one row per grid node: point coordinates, value, weight
inline std::string grid_function_table(const GridFunction& g, std::size_t max_rows = 0) {
    validate_grid(g);
    std::string out = "#";
    for (int i = 0; i < g.dim(); ++i) out += " x_" + std::to_string(i);
    out += "  value  weight\n";
    std::size_t n = g.size();
    if (max_rows > 0) n = std::min(n, max_rows);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<std::string> cells;
        for (double c : g.points[k]) cells.push_back(format_sci(c));
        cells.push_back(format_sci(g.values[k]));
        cells.push_back(format_sci(g.weights[k]));
        detail::append_row(out, cells);
    }
    return out;
}

inline std::string condition_report_row(const ConditionReport& r) {
    std::string out;
    detail::append_row(out, {r.exponent_name, to_string(r.condition),
                             format_sci(r.fitted_constant), format_sci(r.stability_delta),
                             r.pass ? "pass" : "fail"});
    return out;
}

inline std::string condition_table(const std::vector<ConditionReport>& rows) {
    std::string out = "# exponent  condition  constant  stability_delta  verdict\n";
    for (const auto& r : rows) out += condition_report_row(r);
    return out;
}

inline std::string inequality_table(const std::vector<InequalityReport>& rows) {
    std::string out = "# check  n_samples  violations  worst_margin  verdict\n";
    for (const auto& r : rows)
        detail::append_row(out, {r.name, std::to_string(r.n_samples),
                                 std::to_string(r.violations), format_sci(r.worst_margin),
                                 r.pass ? "pass" : "fail"});
    return out;
}

inline std::string ratio_table_text(const RatioTable& t) {
    std::string out = "# function  norm_f  norm_Mf  ratio\n";
    for (const auto& r : t.rows)
        detail::append_row(out, {r.name, format_sci(r.norm_f), format_sci(r.norm_mf),
                                 format_sci(r.ratio)});
    out += "empirical K = " + format_sci(t.empirical_k) + "\n";
    return out;
}

// --- run configs -----------------------------------------------------------

struct RunConfig {
    std::string command;
    std::string spec_name;                   // registry reference, may be empty
    std::optional<ExponentSpec> spec_inline;  // full record, overrides the name
    MeasureHandle measure;
    QuadratureConfig quadrature;
    std::uint64_t seed = 1;
    std::string out_path;
    std::map<std::string, double> tolerances;
    json extra;  // subcommand-specific block, defaults applied by the consumer
};

inline RunConfig parse_run_config(const json& j) {
    RunConfig c;
    c.command = j.value("command", std::string{});
    if (j.contains("spec")) {
        if (j.at("spec").is_string()) {
            c.spec_name = j.at("spec").get<std::string>();
            find_exponent(c.spec_name);  // unknown references fail here, not mid-run
        } else {
            c.spec_inline = j.at("spec").get<ExponentSpec>();
        }
    }
    if (j.contains("measure")) c.measure = j.at("measure").get<MeasureHandle>();
    if (j.contains("quadrature")) c.quadrature = j.at("quadrature").get<QuadratureConfig>();
    c.seed = j.value("seed", std::uint64_t{1});
    c.out_path = j.value("out", std::string{});
    if (j.contains("tolerances"))
        c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
    c.extra = j.value("params", json::object());
    return c;
}

inline ExponentSpec resolve_spec(const RunConfig& c) {
    if (c.spec_inline) return *c.spec_inline;
    if (!c.spec_name.empty()) return find_exponent(c.spec_name);
    throw std::invalid_argument("config references no exponent spec");
}

}  // namespace gaussvar
