#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/gas.hpp"
#include "sspatch/mesh.hpp"

namespace sspatch {

/// Right-hand side of the plus-family transport equation.
inline double march_rhs_u(double t, double u_bar, double v_bar, const GasParams& gas) {
    const double f = coefficient_f(t, gas);
    const double diff = u_bar - v_bar;
    return 0.5 * diff / t + (gas.kappa + 2.0 - t * t) * t / (2.0 * f) * diff -
           (gas.kappa + 2.0 - 2.0 * t * t) * t / f * u_bar;
}

/// Right-hand side of the minus-family transport equation.
inline double march_rhs_v(double t, double u_bar, double v_bar, const GasParams& gas) {
    const double f = coefficient_f(t, gas);
    const double diff = u_bar - v_bar;
    return -0.5 * diff / t - (gas.kappa + 2.0 - t * t) * t / (2.0 * f) * diff -
           (gas.kappa + 2.0 - 2.0 * t * t) * t / f * v_bar;
}

/// Test hooks: manufactured sources and boundary-data overrides.
struct MarchHooks {
    std::function<double(double, double)> source_u; ///< additive source, arguments (t, r)
    std::function<double(double, double)> source_v;
    /// replaces the boundary pair (u_bar, v_bar) wherever boundary data is read
    std::function<std::pair<double, double>(double, double)> boundary_values; ///< (t, r)
};

/// Marched solution on the characteristic mesh plus sonic-line closure.
struct HodographSolution {
    CharMesh mesh;

    // level-aligned per characteristic; index [j][k - first_level]
    std::vector<std::vector<double>> u_bar;
    std::vector<std::vector<double>> v_bar;
    std::vector<std::vector<double>> w_quot;  ///< (u_bar - v_bar)/t at nodes
    std::vector<std::vector<double>> w_trans; ///< transported coalescence quantity
    std::vector<std::vector<double>> r_fd;    ///< R = t * d(u_bar)/dr by level differencing
    std::vector<std::vector<double>> s_fd;    ///< S = t * d(v_bar)/dr

    std::vector<double> bnd_r_fd; ///< R at the per-level boundary knot
    std::vector<double> bnd_s_fd;

    // sonic trace (t = 0), ordered from the sonic corner outwards:
    // entry 0 is the corner itself with boundary data, entry i > 0 maps to
    // characteristic chars[n - i]
    std::vector<double> sonic_r;
    std::vector<double> sonic_value; ///< common extrapolant of u_bar and v_bar
    std::vector<double> sonic_w;
    std::vector<double> sonic_discrepancy; ///< |u_extrap - v_extrap| per entry
    bool closed = false;

    // marching diagnostics
    int bound_violations = 0;
    double worst_low = std::numeric_limits<double>::infinity();
    double worst_high = 0.0;
    double bound_lo = 0.0, bound_hi = 0.0;
    double closure_defect_tmin = 0.0; ///< max |w_quot - w_trans| at the last marched level
    double closure_defect_all = 0.0;  ///< max over all marched nodes
    std::vector<std::string> warnings;

    double value_u(std::size_t j, std::size_t k) const { return u_bar[j][k - mesh.chars[j].first_level]; }
    double value_v(std::size_t j, std::size_t k) const { return v_bar[j][k - mesh.chars[j].first_level]; }

    /// Map sonic-trace index to characteristic index (entry 0 is the corner).
    std::size_t sonic_char(std::size_t i) const { return mesh.chars.size() - i; }
};

namespace detail {

/// Piecewise interpolant of one marched level, knots ascending in r with the
/// boundary image point first.
class LevelInterp {
public:
    LevelInterp(std::vector<double> rs, std::vector<double> us, std::vector<double> vs, int order)
        : rs_(std::move(rs)), us_(std::move(us)), vs_(std::move(vs)) {
        if (order == 3 && rs_.size() >= 3) {
            cubic_u_ = CubicHermite::monotone(rs_, us_);
            cubic_v_ = CubicHermite::monotone(rs_, vs_);
            use_cubic_ = true;
        }
    }

    std::pair<double, double> operator()(double r) const {
        if (use_cubic_) return {cubic_u_.eval(r), cubic_v_.eval(r)};
        if (rs_.size() == 1) return {us_[0], vs_[0]};
        const auto it = std::upper_bound(rs_.begin(), rs_.end(), r);
        std::size_t i = static_cast<std::size_t>(std::distance(rs_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, rs_.size() - 1) - 1;
        const double w = (r - rs_[i]) / (rs_[i + 1] - rs_[i]);
        return {us_[i] + w * (us_[i + 1] - us_[i]), vs_[i] + w * (vs_[i + 1] - vs_[i])};
    }

    double r_min() const { return rs_.front(); }
    double r_max() const { return rs_.back(); }

private:
    std::vector<double> rs_, us_, vs_;
    CubicHermite cubic_u_, cubic_v_;
    bool use_cubic_ = false;
};

inline double hook_source(const std::function<double(double, double)>& src, double t, double r) {
    return src ? src(t, r) : 0.0;
}

inline std::pair<double, double> boundary_pair(const MarchHooks& hooks, const BoundaryPoint& p) {
    if (hooks.boundary_values) return hooks.boundary_values(p.t, p.r);
    return {p.a_bar, p.b_bar};
}

/// Three-point derivative on a nonuniform stencil, one-sided at the ends.
inline double stencil_derivative(const std::vector<double>& xs, const std::vector<double>& ys,
                                 std::size_t i) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    if (n == 2) return (ys[1] - ys[0]) / (xs[1] - xs[0]);
    std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
    const double h1 = xs[c] - xs[c - 1];
    const double h2 = xs[c + 1] - xs[c];
    const double d1 = (ys[c] - ys[c - 1]) / h1;
    const double d2 = (ys[c + 1] - ys[c]) / h2;
    if (i == c) return (h2 * d1 + h1 * d2) / (h1 + h2);
    // quadratic through the three interior-most points, evaluated at xs[i]
    const double x0 = xs[c - 1], x1 = xs[c], x2 = xs[c + 1];
    const double y0 = ys[c - 1], y1 = ys[c], y2 = ys[c + 1];
    const double xq = xs[i];
    return y0 * (2.0 * xq - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           y1 * (2.0 * xq - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           y2 * (2.0 * xq - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

} // namespace detail

/// March the linear degenerate system from the boundary image down to t_min.
///
/// The plus-family update rides each characteristic exactly (no interpolation);
/// the minus-family foot is traced back one level and interpolated, or clipped
/// to the boundary image with boundary data when it exits the region.
inline HodographSolution march(const CharMesh& mesh, const BoundaryTrace& trace,
                               const GasParams& gas, const SolverParams& params,
                               const MarchHooks& hooks = {}) {
    HodographSolution sol;
    sol.mesh = mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    sol.u_bar.resize(n_chars);
    sol.v_bar.resize(n_chars);
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t len = n_levels - mesh.chars[j].first_level;
        sol.u_bar[j].assign(len, 0.0);
        sol.v_bar[j].assign(len, 0.0);
    }

    const double k0 = (gas.kappa + 2.0) / (gas.kappa * (1.0 - mesh.geom.t0 * mesh.geom.t0));
    sol.bound_lo = 0.5 * trace.m_bar0;
    sol.bound_hi = 2.0 * std::exp(k0) * trace.M_bar0;

    // far-corner characteristic starts with exact boundary data
    {
        const auto [u0, v0] = detail::boundary_pair(hooks, mesh.chars[0].foot);
        sol.u_bar[0][0] = u0;
        sol.v_bar[0][0] = v0;
    }

    auto set_node = [&](std::size_t j, std::size_t k, double u, double v) {
        if (!std::isfinite(u) || !std::isfinite(v)) {
            throw SolverError("march: non-finite value at characteristic " + std::to_string(j) +
                              ", level " + std::to_string(k));
        }
        sol.u_bar[j][k - mesh.chars[j].first_level] = u;
        sol.v_bar[j][k - mesh.chars[j].first_level] = v;
        if (u < sol.bound_lo || v < sol.bound_lo || u > sol.bound_hi || v > sol.bound_hi) {
            ++sol.bound_violations;
        }
        sol.worst_low = std::min({sol.worst_low, u, v});
        sol.worst_high = std::max({sol.worst_high, u, v});
    };
    sol.worst_low = std::min(sol.u_bar[0][0], sol.v_bar[0][0]);
    sol.worst_high = std::max(sol.u_bar[0][0], sol.v_bar[0][0]);

    for (std::size_t k = 0; k + 1 < n_levels; ++k) {
        const double t_hi = mesh.t_levels[k];
        const double t_new = mesh.t_levels[k + 1];
        const double s_hi = mesh.s_levels[k];
        const double s_new = mesh.s_levels[k + 1];

        // interpolant over the current level: boundary knot plus active nodes
        const std::size_t active = mesh.active_at(k);
        std::vector<double> rs, us, vs;
        rs.reserve(active + 1);
        us.reserve(active + 1);
        vs.reserve(active + 1);
        {
            const auto [ub, vb] = detail::boundary_pair(hooks, mesh.bnd_levels[k]);
            rs.push_back(mesh.bnd_levels[k].r);
            us.push_back(ub);
            vs.push_back(vb);
        }
        for (std::size_t j = active; j-- > 0;) {
            const double r = mesh.node_r(j, k);
            if (r <= rs.back() + 1e-14) continue; // foot node coincides with the boundary knot
            rs.push_back(r);
            us.push_back(sol.value_u(j, k));
            vs.push_back(sol.value_v(j, k));
        }
        const detail::LevelInterp level(std::move(rs), std::move(us), std::move(vs),
                                        params.interp_order);

        const std::size_t active_next = mesh.active_at(k + 1);
        for (std::size_t j = 0; j < active_next; ++j) {
            const Characteristic& ch = mesh.chars[j];
            const double r_new = ch.xi + s_new;

            // a foot sitting exactly on this level carries boundary data
            if (ch.first_level == k + 1 && ch.foot_on_level) {
                const auto [ub, vb] = detail::boundary_pair(hooks, ch.foot);
                set_node(j, k + 1, ub, vb);
                continue;
            }

            // plus-family foot: own node at level k, or the boundary foot for
            // a characteristic born between levels
            double t_a, r_a, u_a, v_a;
            if (ch.first_level == k + 1) {
                t_a = ch.t_foot;
                r_a = ch.foot.r;
                const auto [ub, vb] = detail::boundary_pair(hooks, ch.foot);
                u_a = ub;
                v_a = vb;
            } else {
                t_a = t_hi;
                r_a = ch.xi + s_hi;
                u_a = sol.value_u(j, k);
                v_a = sol.value_v(j, k);
            }
            const double h_plus = t_a - t_new;

            // minus-family foot: traced back to level k, clipped to the
            // boundary image if it exits first
            double t_b, r_b, u_b, v_b;
            const double r_back = r_new - (s_hi - s_new);
            if (r_back >= mesh.bnd_levels[k].r) {
                t_b = t_hi;
                r_b = r_back;
                if (r_b > level.r_max() + 1e-12) {
                    throw SolverError("march: minus-family foot beyond the closing characteristic "
                                      "at level " + std::to_string(k));
                }
                const auto [ub, vb] = level(std::min(r_b, level.r_max()));
                u_b = ub;
                v_b = vb;
            } else {
                auto cross = [&](double t) {
                    const double s_t = s_new + integrate(
                        [&](double tt) { return char_slope(tt, gas); }, t_new, t, 1e-14);
                    return (r_new - (s_t - s_new)) - trace.r_of_t(t);
                };
                double t_star;
                if (cross(t_new) <= 0.0) {
                    t_star = t_new; // node effectively on the boundary image
                } else {
                    t_star = find_root(cross, t_new, t_hi, 1e-13);
                }
                const BoundaryPoint bp = trace.lookup_by_t(t_star);
                const auto [ub, vb] = detail::boundary_pair(hooks, bp);
                t_b = t_star;
                r_b = bp.r;
                u_b = ub;
                v_b = vb;
            }
            const double h_minus = t_b - t_new;

            // Heun: Euler predictor, trapezoidal corrector sweeps
            const double fu_a = march_rhs_u(t_a, u_a, v_a, gas) +
                                detail::hook_source(hooks.source_u, t_a, r_a);
            const double fv_b = march_rhs_v(t_b, u_b, v_b, gas) +
                                detail::hook_source(hooks.source_v, t_b, r_b);
            double u_n = u_a - h_plus * fu_a;
            double v_n = v_b - h_minus * fv_b;
            for (int it = 0; it < params.corrector_iters; ++it) {
                const double fu_n = march_rhs_u(t_new, u_n, v_n, gas) +
                                    detail::hook_source(hooks.source_u, t_new, r_new);
                const double fv_n = march_rhs_v(t_new, u_n, v_n, gas) +
                                    detail::hook_source(hooks.source_v, t_new, r_new);
                const double u_next = u_a - 0.5 * h_plus * (fu_a + fu_n);
                const double v_next = v_b - 0.5 * h_minus * (fv_b + fv_n);
                u_n = u_next;
                v_n = v_next;
            }
            set_node(j, k + 1, u_n, v_n);
        }
    }

    if (sol.bound_violations > 0) {
        sol.warnings.push_back("march: " + std::to_string(sol.bound_violations) +
                               " nodes left the a-priori bound interval [" +
                               std::to_string(sol.bound_lo) + ", " + std::to_string(sol.bound_hi) +
                               "]");
    }

    // coalescence quotient at marched nodes
    sol.w_quot.resize(n_chars);
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        sol.w_quot[j].resize(sol.u_bar[j].size());
        for (std::size_t k = first; k < n_levels; ++k) {
            sol.w_quot[j][k - first] =
                (sol.value_u(j, k) - sol.value_v(j, k)) / mesh.t_levels[k];
        }
    }

    // level-wise R = t u_r and S = t v_r by cross-characteristic differencing
    sol.r_fd.resize(n_chars);
    sol.s_fd.resize(n_chars);
    for (std::size_t j = 0; j < n_chars; ++j) {
        sol.r_fd[j].assign(sol.u_bar[j].size(), 0.0);
        sol.s_fd[j].assign(sol.v_bar[j].size(), 0.0);
    }
    sol.bnd_r_fd.assign(n_levels, 0.0);
    sol.bnd_s_fd.assign(n_levels, 0.0);
    for (std::size_t k = 0; k < n_levels; ++k) {
        const std::size_t active = mesh.active_at(k);
        std::vector<double> rs, us, vs;
        std::vector<std::size_t> owner;
        std::size_t coincident = n_chars; // node sharing the boundary knot, if any
        const auto [ub, vb] = detail::boundary_pair(hooks, mesh.bnd_levels[k]);
        rs.push_back(mesh.bnd_levels[k].r);
        us.push_back(ub);
        vs.push_back(vb);
        owner.push_back(n_chars); // sentinel for the boundary knot
        for (std::size_t j = active; j-- > 0;) {
            const double r = mesh.node_r(j, k);
            if (r <= rs.back() + 1e-14) {
                coincident = j;
                continue;
            }
            rs.push_back(r);
            us.push_back(sol.value_u(j, k));
            vs.push_back(sol.value_v(j, k));
            owner.push_back(j);
        }
        const double t = mesh.t_levels[k];
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const double du = detail::stencil_derivative(rs, us, i);
            const double dv = detail::stencil_derivative(rs, vs, i);
            if (owner[i] == n_chars) {
                sol.bnd_r_fd[k] = t * du;
                sol.bnd_s_fd[k] = t * dv;
            } else {
                const std::size_t j = owner[i];
                sol.r_fd[j][k - mesh.chars[j].first_level] = t * du;
                sol.s_fd[j][k - mesh.chars[j].first_level] = t * dv;
            }
        }
        if (coincident < n_chars) {
            sol.r_fd[coincident][k - mesh.chars[coincident].first_level] = sol.bnd_r_fd[k];
            sol.s_fd[coincident][k - mesh.chars[coincident].first_level] = sol.bnd_s_fd[k];
        }
    }
    return sol;
}

/// Close the solution onto the degenerate line: extrapolate the common value,
/// transport the coalescence quantity along each characteristic, and record
/// the agreement diagnostics.
inline HodographSolution close_sonic_line(HodographSolution sol, const BoundaryTrace& trace,
                                          const GasParams& gas) {
    const CharMesh& mesh = sol.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();
    const std::size_t last = n_levels - 1;

    // transported coalescence quantity along each characteristic
    sol.w_trans.resize(n_chars);
    sol.closure_defect_all = 0.0;
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        const std::size_t len = n_levels - first;
        sol.w_trans[j].assign(len, 0.0);
        auto integrand = [&](std::size_t k) {
            const double t = mesh.t_levels[k];
            const double f = coefficient_f(t, gas);
            return t * t / f * (sol.value_u(j, k) - sol.value_v(j, k)) -
                   2.0 * std::sqrt(1.0 - t * t) / f * sol.s_fd[j][k - first];
        };
        double w = sol.mesh.chars[j].foot.w_bnd;
        if (!mesh.chars[j].foot_on_level) {
            // partial first segment; cross-characteristic S is unknown at the
            // foot, so the first-node integrand stands in for it
            w -= (mesh.chars[j].t_foot - mesh.t_levels[first]) * integrand(first);
        }
        sol.w_trans[j][0] = w;
        double t_prev = mesh.t_levels[first];
        double g_prev = integrand(first);
        for (std::size_t k = first + 1; k < n_levels; ++k) {
            const double g_k = integrand(k);
            w -= 0.5 * (t_prev - mesh.t_levels[k]) * (g_prev + g_k);
            sol.w_trans[j][k - first] = w;
            t_prev = mesh.t_levels[k];
            g_prev = g_k;
        }
        for (std::size_t k = first; k < n_levels; ++k) {
            const double defect = std::abs(sol.w_trans[j][k - first] - sol.w_quot[j][k - first]);
            sol.closure_defect_all = std::max(sol.closure_defect_all, defect);
            if (k == last) sol.closure_defect_tmin = std::max(sol.closure_defect_tmin, defect);
        }
    }

    // sonic trace: corner first, then characteristics from youngest to the
    // far corner (ascending r)
    sol.sonic_r.assign(n_chars + 1, 0.0);
    sol.sonic_value.assign(n_chars + 1, 0.0);
    sol.sonic_w.assign(n_chars + 1, 0.0);
    sol.sonic_discrepancy.assign(n_chars + 1, 0.0);
    {
        const BoundaryPoint corner = trace.lookup_by_r(0.0);
        sol.sonic_r[0] = 0.0;
        sol.sonic_value[0] = 0.5 * (corner.a_bar + corner.b_bar);
        sol.sonic_w[0] = corner.w_bnd;
        sol.sonic_discrepancy[0] = std::abs(corner.a_bar - corner.b_bar);
    }
    const double t_last = mesh.t_levels[last];
    const double t_prev = mesh.t_levels[last - 1];
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t i = n_chars - j; // ascending r
        const std::size_t first = mesh.chars[j].first_level;
        auto extrap = [&](const std::vector<double>& a) {
            const double f_last = a[last - first];
            const double f_prev = a[last - 1 - first];
            return f_last - t_last * (f_prev - f_last) / (t_prev - t_last);
        };
        const double u0 = extrap(sol.u_bar[j]);
        const double v0 = extrap(sol.v_bar[j]);
        sol.sonic_r[i] = mesh.chars[j].xi; // r at t = 0
        sol.sonic_value[i] = 0.5 * (u0 + v0);
        sol.sonic_discrepancy[i] = std::abs(u0 - v0);

        // final transport segment onto the line; the first term vanishes at
        // t = 0 and S is extrapolated linearly
        const double s_last = sol.s_fd[j][last - first];
        const double s_prev2 = sol.s_fd[j][last - 1 - first];
        const double s0 = s_last - t_last * (s_prev2 - s_last) / (t_prev - t_last);
        const double f_last = coefficient_f(t_last, gas);
        const double g_last = t_last * t_last / f_last *
                                  (sol.value_u(j, last) - sol.value_v(j, last)) -
                              2.0 * std::sqrt(1.0 - t_last * t_last) / f_last *
                                  sol.s_fd[j][last - first];
        const double g_zero = -2.0 / coefficient_f(0.0, gas) * s0;
        sol.sonic_w[i] = sol.w_trans[j][last - first] - 0.5 * t_last * (g_last + g_zero);
    }

    // flag suspicious coalescence
    double max_w = 0.0;
    for (std::size_t j = 0; j < n_chars; ++j) {
        for (double w : sol.w_quot[j]) max_w = std::max(max_w, std::abs(w));
        for (double w : sol.w_trans[j]) max_w = std::max(max_w, std::abs(w));
    }
    const double tol = 10.0 * max_w * t_last;
    for (std::size_t i = 0; i < sol.sonic_discrepancy.size(); ++i) {
        if (sol.sonic_discrepancy[i] > tol) {
            sol.warnings.push_back("close_sonic_line: coalescence discrepancy " +
                                   std::to_string(sol.sonic_discrepancy[i]) +
                                   " exceeds tolerance at sonic sample " + std::to_string(i));
        }
    }
    sol.closed = true;
    return sol;
}

} // namespace sspatch
