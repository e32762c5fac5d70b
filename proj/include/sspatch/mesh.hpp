#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/gas.hpp"

namespace sspatch {

/// Thrown on mesh-construction rejections and marching failures.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discretization controls for the characteristic march.
struct SolverParams {
    double dt = 1e-3;          ///< level spacing in t
    double t_min = 1e-3;       ///< last marched level before sonic extrapolation
    int corrector_iters = 2;   ///< Heun corrector sweeps
    int interp_order = 3;      ///< 1 = linear, 3 = monotone cubic
    int n_characteristics = 0; ///< 0 = auto (foot spacing of three levels)

    void validate(double t0) const {
        if (!(dt > 0.0)) throw SolverError("SolverParams: dt must be positive");
        if (!(t_min > 0.0 && t_min < t0)) {
            throw SolverError("SolverParams: t_min must lie in (0, t0)");
        }
        if (!(dt <= t_min * (1.0 + 1e-12))) {
            throw SolverError("SolverParams: dt must not exceed t_min");
        }
        if (corrector_iters < 1) throw SolverError("SolverParams: corrector_iters must be >= 1");
        if (interp_order != 1 && interp_order != 3) {
            throw SolverError("SolverParams: interp_order must be 1 or 3");
        }
        if (n_characteristics < 0) throw SolverError("SolverParams: n_characteristics must be >= 0");
    }
};

/// One plus-family characteristic, labelled by its invariant xi = r - s(t).
struct Characteristic {
    double t_foot = 0.0;
    double xi = 0.0;
    std::size_t first_level = 0; ///< index of the first marched level at/below the foot
    bool foot_on_level = false;  ///< foot coincides with t_levels[first_level]
    BoundaryPoint foot;
};

/// Characteristic-aligned mesh of the hodograph region.
///
/// Levels run from t0 down to t_min; characteristics are seeded on the
/// boundary image with the far corner first, so node ordinates at level k are
/// xi_j + s(t_k) and descend with increasing j.
struct CharMesh {
    GasParams gas{1.4, 0.2, 6.0, 1.0};
    RegionGeometry geom;
    SolverParams params;
    std::vector<double> t_levels;
    std::vector<double> s_levels;           ///< s(t_k), cumulative characteristic shift
    std::vector<BoundaryPoint> bnd_levels;  ///< boundary-image point at each level
    std::vector<Characteristic> chars;      ///< sorted by descending xi (far corner first)

    std::size_t n_levels() const { return t_levels.size(); }

    double node_r(std::size_t j, std::size_t k) const { return chars[j].xi + s_levels[k]; }

    /// Number of active characteristics at level k.
    std::size_t active_at(std::size_t k) const {
        std::size_t m = 0;
        while (m < chars.size() && chars[m].first_level <= k) ++m;
        return m;
    }

    std::size_t n_nodes() const {
        std::size_t total = 0;
        for (const auto& c : chars) total += t_levels.size() - c.first_level;
        return total;
    }
};

/// Build the mesh: uniform levels from t0 to t_min and characteristic feet
/// spaced along the boundary image.
inline CharMesh build_mesh(const BoundaryTrace& trace, const RegionGeometry& geom,
                           const SolverParams& params) {
    params.validate(geom.t0);
    CharMesh mesh;
    mesh.gas = trace.gas;
    mesh.geom = geom;
    mesh.params = params;

    const double span = geom.t0 - params.t_min;
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(span / params.dt - 1e-12));
    if (n_steps < 2) throw SolverError("build_mesh: fewer than two marching steps; reduce dt");
    const double h = span / static_cast<double>(n_steps);

    mesh.t_levels.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        mesh.t_levels[k] = geom.t0 - h * static_cast<double>(k);
    }
    mesh.t_levels.back() = params.t_min;

    mesh.s_levels.resize(n_steps + 1);
    mesh.s_levels[0] = char_shift(geom.t0, mesh.gas);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double seg = integrate(
            [&](double t) { return char_slope(t, mesh.gas); }, mesh.t_levels[k + 1],
            mesh.t_levels[k], 1e-14);
        mesh.s_levels[k + 1] = mesh.s_levels[k] - seg;
    }

    mesh.bnd_levels.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        mesh.bnd_levels[k] = trace.lookup_by_t(mesh.t_levels[k]);
    }

    // characteristic feet: far corner exactly, then uniform in t down to one
    // level above t_min (each characteristic needs two marched levels for the
    // sonic extrapolation)
    const double t_lowest = params.t_min + h * (1.0 + 1e-9);
    double foot_spacing;
    if (params.n_characteristics == 0) {
        foot_spacing = 3.0 * h;
    } else {
        foot_spacing = (geom.t0 - t_lowest) / static_cast<double>(params.n_characteristics - 1);
        if (foot_spacing < 3.0 * h * (1.0 - 1e-12)) {
            throw SolverError("build_mesh: dt too large to resolve the requested characteristic "
                              "spacing (need at least three levels between adjacent feet)");
        }
    }

    std::vector<double> feet;
    for (double tf = geom.t0; tf >= t_lowest; tf -= foot_spacing) feet.push_back(tf);
    if (feet.size() < 2) throw SolverError("build_mesh: region too shallow for the foot spacing");

    mesh.chars.reserve(feet.size());
    for (std::size_t i = 0; i < feet.size(); ++i) {
        Characteristic c;
        c.t_foot = feet[i];
        c.foot = (i == 0) ? trace.lookup_by_r(trace.r0) : trace.lookup_by_t(feet[i]);
        std::size_t k = 0;
        while (k < mesh.t_levels.size() && mesh.t_levels[k] - c.t_foot > 1e-13) ++k;
        c.first_level = k;
        c.foot_on_level = std::abs(mesh.t_levels[k] - c.t_foot) <= 1e-13;
        if (c.foot_on_level) {
            c.t_foot = mesh.t_levels[k];
            c.xi = c.foot.r - mesh.s_levels[k];
        } else {
            // shift relative to the tabulated level so node ordinates stay
            // consistent with s_levels to rounding
            const double seg = integrate(
                [&](double t) { return char_slope(t, mesh.gas); }, mesh.t_levels[k], c.t_foot,
                1e-14);
            c.xi = c.foot.r - (mesh.s_levels[k] + seg);
        }
        mesh.chars.push_back(c);
    }

    // xi must strictly decrease with birth order (space-like boundary image)
    for (std::size_t j = 0; j + 1 < mesh.chars.size(); ++j) {
        if (!(mesh.chars[j + 1].xi < mesh.chars[j].xi)) {
            throw SolverError("build_mesh: characteristic labels not ordered; boundary image is "
                              "not space-like at foot " + std::to_string(j + 1));
        }
    }

    // membership: every node must sit between the boundary image and the
    // closing characteristic
    const double tol = 1e-12 * (1.0 + geom.r0);
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        for (std::size_t k = mesh.chars[j].first_level; k < mesh.t_levels.size(); ++k) {
            const double r = mesh.node_r(j, k);
            if (r < mesh.bnd_levels[k].r - tol || r > mesh.chars[0].xi + mesh.s_levels[k] + tol) {
                throw SolverError("build_mesh: node outside the region at characteristic " +
                                  std::to_string(j) + ", level " + std::to_string(k));
            }
        }
    }
    return mesh;
}

} // namespace sspatch
