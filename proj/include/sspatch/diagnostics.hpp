#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/holder.hpp"
#include "sspatch/march.hpp"

namespace sspatch {

/// A-posteriori constants, bound checks, and regularity fits for one run.
struct DiagnosticsReport {
    // constants derived from the boundary data and region
    double m_bar0 = 0.0, M_bar0 = 0.0;
    double k0 = 0.0;       ///< exponential weight of the upper bound
    double eps0 = 0.0;     ///< split level for the derivative bound
    double M_gradient = 0.0; ///< 1 + 2 max(|R|,|S|) over the outer region and boundary

    // observed extrema vs the proven interval
    double bound_lo = 0.0, bound_hi = 0.0;
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
    int bound_violations = 0;
    int positivity_violations = 0;

    // derivative bound in the inner region
    double max_rs_inner = 0.0;
    bool rs_bound_ok = false;

    // coalescence
    double max_w = 0.0;              ///< over quotient, transported, and boundary seeds
    double coalescence_C = 0.0;       ///< 1.5 * max_w
    double max_coalescence_ratio = 0.0; ///< max over levels of max|u-v| / (C t)
    bool coalescence_ok = false;
    double closure_defect_tmin = 0.0;
    double closure_defect_all = 0.0;
    double max_sonic_discrepancy = 0.0;
    double max_sonic_w = 0.0;
    double max_w_bnd = 0.0;

    // Holder fits along the degenerate line
    HolderFit holder_u0, holder_v0, holder_w0;

    std::vector<std::string> warnings;
};

/// Assemble the report from a closed solution.
inline DiagnosticsReport diagnostics(const HodographSolution& sol, const BoundaryTrace& trace,
                                     const GasParams& gas) {
    DiagnosticsReport rep;
    const CharMesh& mesh = sol.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    rep.m_bar0 = trace.m_bar0;
    rep.M_bar0 = trace.M_bar0;
    rep.k0 = (gas.kappa + 2.0) / (gas.kappa * (1.0 - mesh.geom.t0 * mesh.geom.t0));
    rep.eps0 = std::min(mesh.geom.t0, 1.0 / (4.0 * rep.k0));
    rep.bound_lo = 0.5 * rep.m_bar0;
    rep.bound_hi = 2.0 * std::exp(rep.k0) * rep.M_bar0;

    rep.u_min = rep.v_min = std::numeric_limits<double>::infinity();
    rep.u_max = rep.v_max = 0.0;
    double max_rs_outer = 0.0;
    rep.max_rs_inner = 0.0;
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < n_levels; ++k) {
            const double u = sol.value_u(j, k);
            const double v = sol.value_v(j, k);
            rep.u_min = std::min(rep.u_min, u);
            rep.u_max = std::max(rep.u_max, u);
            rep.v_min = std::min(rep.v_min, v);
            rep.v_max = std::max(rep.v_max, v);
            if (u <= 0.0 || v <= 0.0) ++rep.positivity_violations;
            if (u < rep.bound_lo || v < rep.bound_lo || u > rep.bound_hi || v > rep.bound_hi) {
                ++rep.bound_violations;
            }
            const double rs = std::max(std::abs(sol.r_fd[j][k - first]),
                                       std::abs(sol.s_fd[j][k - first]));
            if (mesh.t_levels[k] >= rep.eps0) max_rs_outer = std::max(max_rs_outer, rs);
            else rep.max_rs_inner = std::max(rep.max_rs_inner, rs);
        }
    }
    double max_rs_bnd = 0.0;
    for (std::size_t k = 0; k < n_levels; ++k) {
        max_rs_bnd = std::max({max_rs_bnd, std::abs(sol.bnd_r_fd[k]), std::abs(sol.bnd_s_fd[k])});
    }
    rep.M_gradient = 1.0 + 2.0 * std::max(max_rs_outer, max_rs_bnd);
    rep.rs_bound_ok = rep.max_rs_inner < rep.M_gradient;

    // coalescence scale and per-level check |u - v| <= C t
    rep.max_w = 0.0;
    for (std::size_t j = 0; j < n_chars; ++j) {
        for (double w : sol.w_quot[j]) rep.max_w = std::max(rep.max_w, std::abs(w));
        if (sol.closed) {
            for (double w : sol.w_trans[j]) rep.max_w = std::max(rep.max_w, std::abs(w));
        }
    }
    for (double w : trace.w_bnd) {
        rep.max_w_bnd = std::max(rep.max_w_bnd, std::abs(w));
        rep.max_w = std::max(rep.max_w, std::abs(w));
    }
    rep.coalescence_C = 1.5 * rep.max_w;
    rep.max_coalescence_ratio = 0.0;
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < n_levels; ++k) {
            const double ratio = std::abs(sol.value_u(j, k) - sol.value_v(j, k)) /
                                 (rep.coalescence_C * mesh.t_levels[k]);
            rep.max_coalescence_ratio = std::max(rep.max_coalescence_ratio, ratio);
        }
    }
    rep.coalescence_ok = rep.max_coalescence_ratio <= 1.0;
    rep.closure_defect_tmin = sol.closure_defect_tmin;
    rep.closure_defect_all = sol.closure_defect_all;

    if (sol.closed) {
        for (double d : sol.sonic_discrepancy) {
            rep.max_sonic_discrepancy = std::max(rep.max_sonic_discrepancy, d);
        }
        for (double w : sol.sonic_w) rep.max_sonic_w = std::max(rep.max_sonic_w, std::abs(w));

        if (sol.sonic_r.size() >= 16) {
            // fit the per-family extrapolants as well as the common value:
            // reconstruct u/v at the line from value +- discrepancy/2
            std::vector<double> u0(sol.sonic_r.size()), v0(sol.sonic_r.size());
            for (std::size_t i = 0; i < sol.sonic_r.size(); ++i) {
                u0[i] = sol.sonic_value[i] + 0.5 * sol.sonic_discrepancy[i];
                v0[i] = sol.sonic_value[i] - 0.5 * sol.sonic_discrepancy[i];
            }
            rep.holder_u0 = holder_fit(sol.sonic_r, u0);
            rep.holder_v0 = holder_fit(sol.sonic_r, v0);
            rep.holder_w0 = holder_fit(sol.sonic_r, sol.sonic_w);
        } else {
            rep.holder_u0.message = rep.holder_v0.message = rep.holder_w0.message =
                "too few sonic samples for a Holder fit";
        }
    }

    rep.warnings = sol.warnings;
    if (rep.bound_violations > 0) {
        rep.warnings.push_back("diagnostics: " + std::to_string(rep.bound_violations) +
                               " nodes outside the a-priori interval");
    }
    if (rep.positivity_violations > 0) {
        rep.warnings.push_back("diagnostics: positivity violated at " +
                               std::to_string(rep.positivity_violations) + " nodes");
    }
    if (!rep.rs_bound_ok) {
        rep.warnings.push_back("diagnostics: inner-region derivative bound exceeded");
    }
    if (!rep.coalescence_ok) {
        rep.warnings.push_back("diagnostics: coalescence ratio above 1 at some level");
    }
    return rep;
}

} // namespace sspatch
