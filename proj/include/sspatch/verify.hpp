#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/holder.hpp"
#include "sspatch/inversion.hpp"
#include "sspatch/march.hpp"
#include "sspatch/mesh.hpp"

namespace sspatch {

/// Smooth manufactured fields with coalescing families at t = 0, plus the
/// sources that make them exact solutions of the marching kernel.
struct ManufacturedCase {
    double base = 2.0;
    double u_t = 0.4, u_tr = 0.8;
    double v_t = -0.3, v_tr = 0.2;
    double r2 = 1.5;

    static ManufacturedCase constant(double value) {
        ManufacturedCase c;
        c.base = value;
        c.u_t = c.u_tr = c.v_t = c.v_tr = c.r2 = 0.0;
        return c;
    }

    double u_star(double t, double r) const { return base + u_t * t + u_tr * t * r + r2 * r * r; }
    double v_star(double t, double r) const { return base + v_t * t + v_tr * t * r + r2 * r * r; }

    double source_u(double t, double r, const GasParams& gas) const {
        const double dudt = u_t + u_tr * r;
        const double dudr = u_tr * t + 2.0 * r2 * r;
        return dudt + char_slope(t, gas) * dudr -
               march_rhs_u(t, u_star(t, r), v_star(t, r), gas);
    }
    double source_v(double t, double r, const GasParams& gas) const {
        const double dvdt = v_t + v_tr * r;
        const double dvdr = v_tr * t + 2.0 * r2 * r;
        return dvdt - char_slope(t, gas) * dvdr -
               march_rhs_v(t, u_star(t, r), v_star(t, r), gas);
    }

    /// Hooks that impose the manufactured boundary data and sources.
    /// source_scale = -1 flips the source sign for sensitivity checks.
    MarchHooks hooks(const GasParams& gas, double source_scale = 1.0) const {
        MarchHooks h;
        h.source_u = [this, gas, source_scale](double t, double r) {
            return source_scale * source_u(t, r, gas);
        };
        h.source_v = [this, gas, source_scale](double t, double r) {
            return source_scale * source_v(t, r, gas);
        };
        h.boundary_values = [this](double t, double r) {
            return std::pair<double, double>{u_star(t, r), v_star(t, r)};
        };
        return h;
    }
};

struct ManufacturedResult {
    double max_error = 0.0;
    std::size_t n_nodes = 0;
};

/// March the manufactured problem on the given region and measure the
/// max-norm error against the exact fields.
inline ManufacturedResult run_manufactured(const BoundaryTrace& trace, const RegionGeometry& geom,
                                           const SolverParams& params, const GasParams& gas,
                                           const ManufacturedCase& mc, double source_scale = 1.0) {
    const CharMesh mesh = build_mesh(trace, geom, params);
    const HodographSolution sol = march(mesh, trace, gas, params, mc.hooks(gas, source_scale));
    ManufacturedResult res;
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        for (std::size_t k = mesh.chars[j].first_level; k < mesh.t_levels.size(); ++k) {
            const double r = mesh.node_r(j, k);
            const double t = mesh.t_levels[k];
            res.max_error = std::max(res.max_error,
                                     std::abs(sol.value_u(j, k) - mc.u_star(t, r)));
            res.max_error = std::max(res.max_error,
                                     std::abs(sol.value_v(j, k) - mc.v_star(t, r)));
            ++res.n_nodes;
        }
    }
    return res;
}

/// One refinement level of the end-to-end convergence study.
struct ConvergenceRow {
    double dt = 0.0;
    double residual_max = 0.0;   ///< discrete angle-system residual
    double de_defect = 0.0;      ///< closing-characteristic slope defect
    double pe_error = 0.0;       ///< wall-foot reproduction error
    double closure_defect = 0.0; ///< transported-vs-quotient defect at t_min
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double order_residual = 0.0;
    double order_de = 0.0;
    double order_closure = 0.0;
    double max_pe_error = 0.0;
    bool monotone = true;
    bool pass = false;
};

/// Run the full pipeline at n_levels halvings of dt (with t_min tied to dt)
/// and fit observed convergence orders.
inline ConvergenceTable convergence_study(const BoundarySpec& spec, const GasParams& gas,
                                          const SolverParams& base, int n_levels) {
    if (n_levels < 3) throw SolverError("convergence_study: need at least three levels");
    const BoundaryTrace trace = compute_trace(spec, gas);
    const RegionGeometry geom = region_corners(trace, gas);

    ConvergenceTable table;
    for (int i = 0; i < n_levels; ++i) {
        SolverParams params = base;
        params.dt = base.dt / std::pow(2.0, i);
        params.t_min = params.dt;
        params.n_characteristics = 0; // foot spacing tied to dt

        const CharMesh mesh = build_mesh(trace, geom, params);
        HodographSolution sol = march(mesh, trace, gas, params);
        sol = close_sonic_line(std::move(sol), trace, gas);
        PhysicalPatch patch = reconstruct(sol, trace, gas);
        physical_gradients(sol, patch, gas);
        extract_curves(sol, trace, patch);
        const ResidualReport rr = residual_euler(patch, sol, gas);
        const InvariantReport inv = check_invariants(patch, sol, trace);

        ConvergenceRow row;
        row.dt = params.dt;
        row.residual_max = std::max(rr.discrete_plus_max, rr.discrete_minus_max);
        row.de_defect = de_slope_defect(patch);
        row.pe_error = inv.max_pe_error;
        row.closure_defect = sol.closure_defect_tmin;
        table.rows.push_back(row);
    }

    auto order_of = [&](auto&& get) {
        std::vector<double> xs, ys;
        for (const auto& row : table.rows) {
            const double e = get(row);
            if (e <= 0.0) return 2.0; // error at rounding level; treat as resolved
            xs.push_back(std::log(row.dt));
            ys.push_back(std::log(e));
        }
        return fit_line(xs, ys).slope;
    };
    table.order_residual = order_of([](const ConvergenceRow& r) { return r.residual_max; });
    table.order_de = order_of([](const ConvergenceRow& r) { return r.de_defect; });
    table.order_closure = order_of([](const ConvergenceRow& r) { return r.closure_defect; });
    for (const auto& row : table.rows) table.max_pe_error = std::max(table.max_pe_error, row.pe_error);
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        if (table.rows[i + 1].residual_max > table.rows[i].residual_max ||
            table.rows[i + 1].de_defect > table.rows[i].de_defect) {
            table.monotone = false;
        }
    }
    table.pass = table.order_residual >= 1.0 && table.order_de >= 1.0 &&
                 table.order_closure >= 1.0 && table.max_pe_error < 1e-12 && table.monotone;
    return table;
}

} // namespace sspatch
