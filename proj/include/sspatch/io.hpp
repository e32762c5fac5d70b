#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sspatch/diagnostics.hpp"
#include "sspatch/inversion.hpp"
#include "sspatch/march.hpp"
#include "sspatch/oracle.hpp"
#include "sspatch/verify.hpp"

namespace sspatch {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Node table: one row per mesh node plus the sonic row; the corner entry
/// carries char_id -1.
inline std::string nodes_csv(const HodographSolution& sol, const PhysicalPatch& patch,
                             const std::string& config_hash) {
    std::string out = "# config_hash=" + config_hash + "\n";
    out += "char_id,t,r,u_bar,v_bar,w_bar,x,y,theta,varpi,jacobian\n";
    const CharMesh& mesh = sol.mesh;
    auto row = [&](long id, double t, double r, double u, double v, double w, double x, double y,
                   double theta, double varpi, double jac) {
        out += std::to_string(id) + ',' + detail::fmt(t) + ',' + detail::fmt(r) + ',' +
               detail::fmt(u) + ',' + detail::fmt(v) + ',' + detail::fmt(w) + ',' +
               detail::fmt(x) + ',' + detail::fmt(y) + ',' + detail::fmt(theta) + ',' +
               detail::fmt(varpi) + ',' + detail::fmt(jac) + '\n';
    };
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < mesh.t_levels.size(); ++k) {
            const std::size_t idx = k - first;
            row(static_cast<long>(j), mesh.t_levels[k], mesh.node_r(j, k), sol.value_u(j, k),
                sol.value_v(j, k), sol.w_quot[j][idx], patch.x[j][idx], patch.y[j][idx],
                patch.theta_at(j, k), patch.varpi_at(k), patch.jac[j][idx]);
        }
    }
    for (std::size_t i = 0; i < sol.sonic_r.size(); ++i) {
        const long id = (i == 0) ? -1 : static_cast<long>(sol.sonic_char(i));
        row(id, 0.0, sol.sonic_r[i], sol.sonic_value[i], sol.sonic_value[i], sol.sonic_w[i],
            patch.sonic_x[i], patch.sonic_y[i], patch.theta1 - sol.sonic_r[i], 1.0, 0.0);
    }
    return out;
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts, const std::string& config_hash,
                             bool with_tangent) {
    std::string out = "# config_hash=" + config_hash + "\n";
    out += with_tangent ? "x,y,theta,varpi,tangent_x,tangent_y\n" : "x,y,theta,varpi\n";
    for (const auto& p : pts) {
        out += detail::fmt(p.x) + ',' + detail::fmt(p.y) + ',' + detail::fmt(p.theta) + ',' +
               detail::fmt(p.varpi);
        if (with_tangent) out += ',' + detail::fmt(p.tan_x) + ',' + detail::fmt(p.tan_y);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json holder_json(const HolderFit& fit) {
    return {{"ok", fit.ok},
            {"exponent", fit.exponent},
            {"n_scales", fit.n_scales},
            {"rms_residual", fit.rms_residual},
            {"message", fit.message}};
}

inline nlohmann::ordered_json diagnostics_json(const DiagnosticsReport& rep,
                                               const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["constants"] = {{"m_bar0", rep.m_bar0}, {"M_bar0", rep.M_bar0},         {"k0", rep.k0},
                      {"eps0", rep.eps0},     {"M_gradient", rep.M_gradient}, {"bound_lo", rep.bound_lo},
                      {"bound_hi", rep.bound_hi}};
    j["fields"] = {{"u_min", rep.u_min}, {"u_max", rep.u_max}, {"v_min", rep.v_min},
                   {"v_max", rep.v_max}};
    j["violations"] = {{"bound", rep.bound_violations}, {"positivity", rep.positivity_violations}};
    j["gradient_bound"] = {{"max_inner", rep.max_rs_inner}, {"ok", rep.rs_bound_ok}};
    j["coalescence"] = {{"max_w", rep.max_w},
                        {"C", rep.coalescence_C},
                        {"max_ratio", rep.max_coalescence_ratio},
                        {"ok", rep.coalescence_ok},
                        {"closure_defect_tmin", rep.closure_defect_tmin},
                        {"closure_defect_all", rep.closure_defect_all},
                        {"max_sonic_discrepancy", rep.max_sonic_discrepancy},
                        {"max_sonic_w", rep.max_sonic_w},
                        {"max_w_boundary", rep.max_w_bnd}};
    j["holder"] = {{"u0", holder_json(rep.holder_u0)},
                   {"v0", holder_json(rep.holder_v0)},
                   {"w0", holder_json(rep.holder_w0)}};
    j["warnings"] = rep.warnings;
    return j;
}

inline nlohmann::ordered_json residual_json(const ResidualReport& rr) {
    return {{"closed_plus_max", rr.closed_plus_max},
            {"closed_minus_max", rr.closed_minus_max},
            {"discrete_plus_max", rr.discrete_plus_max},
            {"discrete_minus_max", rr.discrete_minus_max},
            {"gradient_check_max", rr.gradient_check_max},
            {"n_discrete", rr.n_discrete}};
}

inline nlohmann::ordered_json convergence_json(const ConvergenceTable& table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"dt", r.dt},
                        {"residual_max", r.residual_max},
                        {"de_defect", r.de_defect},
                        {"pe_error", r.pe_error},
                        {"closure_defect", r.closure_defect}});
    }
    return {{"rows", rows},
            {"order_residual", table.order_residual},
            {"order_de", table.order_de},
            {"order_closure", table.order_closure},
            {"max_pe_error", table.max_pe_error},
            {"monotone", table.monotone},
            {"pass", table.pass}};
}

inline nlohmann::ordered_json admissibility_json(const AdmissibilityReport& rep) {
    return {{"pass", rep.pass},
            {"first_failure", rep.first_failure},
            {"sonic_start_error", rep.sonic_start_error},
            {"min_phi_p", rep.min_phi_p},
            {"max_phi_pp", rep.max_phi_pp},
            {"max_varpi_p", rep.max_varpi_p},
            {"max_sign_condition", rep.max_sign_condition},
            {"min_spacelike_margin", rep.min_spacelike_margin},
            {"samples",
             {{"x", rep.xs},
              {"sign_condition", rep.sign_condition},
              {"spacelike_margin", rep.spacelike_margin}}}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
}

} // namespace sspatch
