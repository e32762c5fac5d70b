#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sspatch/boundary.hpp"
#include "sspatch/march.hpp"

namespace sspatch {

/// Trigonometric coefficient quadruple of the inverse map.
struct FCoeffs {
    double f1, f2, f3, f4;
};

/// The four combinations are sin/cos of the characteristic inclinations:
/// (f1, f2, f3, f4) = (sin beta, sin alpha, cos beta, cos alpha) with
/// alpha/beta = theta +- omega expressed through t and r.
inline FCoeffs f_coefficients(double t, double r, double theta1) {
    if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("f_coefficients: t must lie in [0, 1)");
    const double root = std::sqrt(1.0 - t * t);
    const double s = std::sin(theta1 - r);
    const double c = std::cos(theta1 - r);
    return FCoeffs{t * s - root * c, t * s + root * c, t * c + root * s, t * c - root * s};
}

/// Integrand of the characteristic reconstruction integrals, d(x,y)/dt along
/// a mesh (plus-family hodograph) characteristic.
///
/// The image of a hodograph plus-family characteristic is a physical
/// minus-family characteristic, so the displacement carries the minus-family
/// inclination (f3, f1) and the minus-family quantity v_bar. The slope of
/// the image curve is f1/f3 = tan(theta - omega).
inline std::pair<double, double> inversion_integrand(double t, double r, double v_bar,
                                                     double theta1, const GasParams& gas) {
    if (t == 0.0) return {0.0, 0.0};
    const FCoeffs f = f_coefficients(t, r, theta1);
    const double scale = v_bar * t / (2.0 * coefficient_f(t, gas));
    return {f.f3 * scale, f.f1 * scale};
}

/// One vertex of an output polyline.
struct CurvePoint {
    double x = 0.0, y = 0.0;
    double theta = 0.0, varpi = 0.0;
    double tan_x = 0.0, tan_y = 0.0; ///< unit tangent (sonic curve only)
};

/// Reconstructed physical-plane patch on the characteristic mesh.
struct PhysicalPatch {
    CharMesh mesh;
    double theta1 = 0.0;
    GasParams gas{1.4, 0.2, 6.0, 1.0};

    // level-aligned per characteristic, index [j][k - first_level]
    std::vector<std::vector<double>> x, y;
    std::vector<std::vector<double>> jac;
    std::vector<std::vector<double>> theta_x, theta_y, varpi_x, varpi_y;
    std::vector<std::vector<double>> inner_product; ///< grad(theta) . rot(grad(varpi))

    // sonic row, aligned with HodographSolution::sonic_* (corner first)
    std::vector<double> sonic_x, sonic_y;
    std::vector<double> sonic_theta_x, sonic_theta_y, sonic_varpi_x, sonic_varpi_y;
    std::vector<double> sonic_inner_product;

    std::vector<CurvePoint> pe, pd, de;
    double corner_d_x = 0.0, corner_d_y = 0.0;

    bool has_gradients = false;

    double theta_at(std::size_t j, std::size_t k) const {
        return theta1 - (mesh.chars[j].xi + mesh.s_levels[k]);
    }
    double varpi_at(std::size_t k) const {
        const double t = mesh.t_levels[k];
        return std::sqrt(1.0 - t * t);
    }
};

/// Integrate the characteristic reconstruction from each boundary foot down
/// to the degenerate line.
inline PhysicalPatch reconstruct(const HodographSolution& sol, const BoundaryTrace& trace,
                                 const GasParams& gas) {
    if (!sol.closed) throw SolverError("reconstruct: solution must be closed onto the sonic line");
    const CharMesh& mesh = sol.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    PhysicalPatch patch;
    patch.mesh = mesh;
    patch.gas = gas;
    patch.theta1 = trace.theta1;
    patch.x.resize(n_chars);
    patch.y.resize(n_chars);
    patch.jac.resize(n_chars);
    patch.sonic_x.assign(n_chars + 1, 0.0);
    patch.sonic_y.assign(n_chars + 1, 0.0);

    for (std::size_t j = 0; j < n_chars; ++j) {
        const Characteristic& ch = mesh.chars[j];
        const std::size_t first = ch.first_level;
        const std::size_t len = n_levels - first;
        patch.x[j].assign(len, 0.0);
        patch.y[j].assign(len, 0.0);
        patch.jac[j].assign(len, 0.0);

        const double x_foot = ch.foot.x;
        const double y_foot = trace.spec.phi(x_foot);

        auto node_integrand = [&](std::size_t k) {
            return inversion_integrand(mesh.t_levels[k], mesh.node_r(j, k), sol.value_v(j, k),
                                       trace.theta1, gas);
        };

        double xx = x_foot, yy = y_foot;
        if (ch.foot_on_level) {
            patch.x[j][0] = xx;
            patch.y[j][0] = yy;
        } else {
            const auto [gx_f, gy_f] =
                inversion_integrand(ch.t_foot, ch.foot.r, ch.foot.b_bar, trace.theta1, gas);
            const auto [gx_0, gy_0] = node_integrand(first);
            const double h = ch.t_foot - mesh.t_levels[first];
            xx -= 0.5 * h * (gx_f + gx_0);
            yy -= 0.5 * h * (gy_f + gy_0);
            patch.x[j][0] = xx;
            patch.y[j][0] = yy;
        }
        auto [gx_prev, gy_prev] = node_integrand(first);
        for (std::size_t k = first + 1; k < n_levels; ++k) {
            const auto [gx, gy] = node_integrand(k);
            const double h = mesh.t_levels[k - 1] - mesh.t_levels[k];
            xx -= 0.5 * h * (gx_prev + gx);
            yy -= 0.5 * h * (gy_prev + gy);
            patch.x[j][k - first] = xx;
            patch.y[j][k - first] = yy;
            gx_prev = gx;
            gy_prev = gy;
        }

        // final segment onto the sonic line: the integrand vanishes at t = 0
        const std::size_t i = n_chars - j; // sonic-trace index
        {
            const double t_last = mesh.t_levels[n_levels - 1];
            const auto [gx, gy] = node_integrand(n_levels - 1);
            patch.sonic_x[i] = xx - 0.5 * t_last * gx;
            patch.sonic_y[i] = yy - 0.5 * t_last * gy;
        }

        for (std::size_t k = first; k < n_levels; ++k) {
            const double t = mesh.t_levels[k];
            patch.jac[j][k - first] = t * sol.value_u(j, k) * sol.value_v(j, k) /
                                      (4.0 * coefficient_f(t, gas));
        }
    }

    // sonic corner of the wall
    patch.sonic_x[0] = trace.spec.x1;
    patch.sonic_y[0] = trace.spec.phi(trace.spec.x1);
    return patch;
}

/// Fill the closed-form gradient fields (and the monotonicity inner product)
/// at every node, including the sonic row.
inline void physical_gradients(const HodographSolution& sol, PhysicalPatch& patch,
                               const GasParams& gas) {
    const CharMesh& mesh = patch.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    auto fill = [&](double t, double r, double u, double v, double w, double& tx, double& ty,
                    double& wx, double& wy, double& ip) {
        const FCoeffs f = f_coefficients(t, r, patch.theta1);
        const double uv = u * v;
        tx = (f.f1 * v - f.f2 * u) / uv;
        ty = (f.f4 * u - f.f3 * v) / uv;
        const double kk = gas.kappa + 1.0 - t * t;
        const double root = std::sqrt(1.0 - t * t);
        const double s = std::sin(patch.theta1 - r);
        const double c = std::cos(patch.theta1 - r);
        wx = -kk / uv * (s * (u + v) + root * c * w);
        wy = kk / uv * (c * (u + v) - root * s * w);
        ip = tx * wy - ty * wx;
    };

    patch.theta_x.resize(n_chars);
    patch.theta_y.resize(n_chars);
    patch.varpi_x.resize(n_chars);
    patch.varpi_y.resize(n_chars);
    patch.inner_product.resize(n_chars);
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        const std::size_t len = n_levels - first;
        patch.theta_x[j].assign(len, 0.0);
        patch.theta_y[j].assign(len, 0.0);
        patch.varpi_x[j].assign(len, 0.0);
        patch.varpi_y[j].assign(len, 0.0);
        patch.inner_product[j].assign(len, 0.0);
        for (std::size_t k = first; k < n_levels; ++k) {
            fill(mesh.t_levels[k], mesh.node_r(j, k), sol.value_u(j, k), sol.value_v(j, k),
                 sol.w_quot[j][k - first], patch.theta_x[j][k - first],
                 patch.theta_y[j][k - first], patch.varpi_x[j][k - first],
                 patch.varpi_y[j][k - first], patch.inner_product[j][k - first]);
        }
    }

    const std::size_t n_sonic = sol.sonic_r.size();
    patch.sonic_theta_x.assign(n_sonic, 0.0);
    patch.sonic_theta_y.assign(n_sonic, 0.0);
    patch.sonic_varpi_x.assign(n_sonic, 0.0);
    patch.sonic_varpi_y.assign(n_sonic, 0.0);
    patch.sonic_inner_product.assign(n_sonic, 0.0);
    for (std::size_t i = 0; i < n_sonic; ++i) {
        fill(0.0, sol.sonic_r[i], sol.sonic_value[i], sol.sonic_value[i], sol.sonic_w[i],
             patch.sonic_theta_x[i], patch.sonic_theta_y[i], patch.sonic_varpi_x[i],
             patch.sonic_varpi_y[i], patch.sonic_inner_product[i]);
    }
    patch.has_gradients = true;
}

/// Assemble the three bounding polylines and the interior corner.
inline void extract_curves(const HodographSolution& sol, const BoundaryTrace& trace,
                           PhysicalPatch& patch) {
    const CharMesh& mesh = patch.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    // wall arc: sonic corner plus characteristic feet ordered towards E
    patch.pe.clear();
    {
        CurvePoint p;
        p.x = trace.spec.x1;
        p.y = trace.spec.phi(trace.spec.x1);
        p.theta = trace.theta1;
        p.varpi = 1.0;
        patch.pe.push_back(p);
    }
    for (std::size_t j = n_chars; j-- > 0;) {
        const BoundaryPoint& f = mesh.chars[j].foot;
        CurvePoint p;
        p.x = f.x;
        p.y = trace.spec.phi(f.x);
        p.theta = f.theta;
        p.varpi = f.varpi;
        patch.pe.push_back(p);
    }

    // sonic curve from the corner to D, tangents from the gradient normal
    patch.pd.clear();
    for (std::size_t i = 0; i < sol.sonic_r.size(); ++i) {
        CurvePoint p;
        p.x = patch.sonic_x[i];
        p.y = patch.sonic_y[i];
        p.theta = patch.theta1 - sol.sonic_r[i];
        p.varpi = 1.0;
        if (patch.has_gradients) {
            const double gx = patch.sonic_varpi_x[i];
            const double gy = patch.sonic_varpi_y[i];
            const double norm = std::hypot(gx, gy);
            if (norm > 0.0) {
                p.tan_x = gy / norm;
                p.tan_y = -gx / norm;
            }
        }
        patch.pd.push_back(p);
    }
    // orient tangents along the traversal direction
    for (std::size_t i = 0; i + 1 < patch.pd.size(); ++i) {
        const double dx = patch.pd[i + 1].x - patch.pd[i].x;
        const double dy = patch.pd[i + 1].y - patch.pd[i].y;
        if (patch.pd[i].tan_x * dx + patch.pd[i].tan_y * dy < 0.0) {
            patch.pd[i].tan_x = -patch.pd[i].tan_x;
            patch.pd[i].tan_y = -patch.pd[i].tan_y;
        }
    }
    if (patch.pd.size() >= 2) {
        auto& last = patch.pd.back();
        const auto& prev = patch.pd[patch.pd.size() - 2];
        const double dx = last.x - prev.x, dy = last.y - prev.y;
        if (last.tan_x * dx + last.tan_y * dy < 0.0) {
            last.tan_x = -last.tan_x;
            last.tan_y = -last.tan_y;
        }
    }

    patch.corner_d_x = patch.sonic_x.back();
    patch.corner_d_y = patch.sonic_y.back();

    // closing characteristic from D up to E (nodes of the far-corner
    // characteristic in ascending t)
    patch.de.clear();
    {
        CurvePoint p;
        p.x = patch.sonic_x.back();
        p.y = patch.sonic_y.back();
        p.theta = patch.theta1 - sol.sonic_r.back();
        p.varpi = 1.0;
        patch.de.push_back(p);
    }
    for (std::size_t k = n_levels; k-- > 0;) {
        CurvePoint p;
        p.x = patch.x[0][k];
        p.y = patch.y[0][k];
        p.theta = patch.theta_at(0, k);
        p.varpi = patch.varpi_at(k);
        patch.de.push_back(p);
    }
}

/// Post-solve invariant checks (the exit-code-4 gate of the pipeline).
struct InvariantReport {
    bool ok = true;
    std::vector<std::string> failures;
    double min_jacobian = std::numeric_limits<double>::infinity();
    double max_inner_product = -std::numeric_limits<double>::infinity();
    double max_pe_error = 0.0;

    void fail(const std::string& what) {
        ok = false;
        failures.push_back(what);
    }
};

inline InvariantReport check_invariants(const PhysicalPatch& patch, const HodographSolution& sol,
                                        const BoundaryTrace& trace) {
    InvariantReport rep;
    const CharMesh& mesh = patch.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();

    for (std::size_t j = 0; j < n_chars; ++j) {
        for (double v : patch.jac[j]) rep.min_jacobian = std::min(rep.min_jacobian, v);
    }
    if (!(rep.min_jacobian > 0.0)) rep.fail("Jacobian not positive at a marched node");

    if (patch.has_gradients) {
        for (std::size_t j = 0; j < n_chars; ++j) {
            for (double v : patch.inner_product[j]) {
                rep.max_inner_product = std::max(rep.max_inner_product, v);
            }
        }
        for (double v : patch.sonic_inner_product) {
            rep.max_inner_product = std::max(rep.max_inner_product, v);
        }
        if (!(rep.max_inner_product < 0.0)) {
            rep.fail("level-curve monotonicity inner product not strictly negative");
        }
    }

    for (std::size_t i = 0; i + 1 < patch.pd.size(); ++i) {
        if (!(patch.pd[i + 1].theta < patch.pd[i].theta)) {
            rep.fail("flow angle not strictly decreasing along the sonic curve at vertex " +
                     std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < patch.de.size(); ++i) {
        if (!(patch.de[i + 1].theta < patch.de[i].theta)) {
            rep.fail("flow angle not strictly decreasing along the closing characteristic at "
                     "vertex " + std::to_string(i));
            break;
        }
    }

    // fold-over proxy: level curves are regular arcs with the flow angle
    // strictly monotone along them, so adjacent segment directions must not
    // reverse (x alone is not monotone; the arcs bend back in x)
    for (std::size_t k = 0; k < n_levels && rep.ok; ++k) {
        const std::size_t active = mesh.active_at(k);
        if (active < 3) continue;
        double px = 0.0, py = 0.0;
        bool have_prev = false;
        for (std::size_t j = active - 1; j-- > 0;) {
            const std::size_t a = j + 1;
            const double sx = patch.x[j][k - mesh.chars[j].first_level] -
                              patch.x[a][k - mesh.chars[a].first_level];
            const double sy = patch.y[j][k - mesh.chars[j].first_level] -
                              patch.y[a][k - mesh.chars[a].first_level];
            if (have_prev && px * sx + py * sy <= 0.0) {
                rep.fail("fold-over: level " + std::to_string(k) +
                         " reverses direction between characteristics");
                break;
            }
            px = sx;
            py = sy;
            have_prev = true;
        }
    }

    // wall reproduction at the characteristic feet
    for (std::size_t j = 0; j < n_chars; ++j) {
        const Characteristic& ch = mesh.chars[j];
        if (!ch.foot_on_level) continue;
        const double ex = std::abs(patch.x[j][0] - ch.foot.x);
        const double ey = std::abs(patch.y[j][0] - trace.spec.phi(ch.foot.x));
        rep.max_pe_error = std::max({rep.max_pe_error, ex, ey});
    }
    if (!(rep.max_pe_error < 1e-12)) rep.fail("wall arc not reproduced at characteristic feet");

    if (!sol.closed) rep.fail("solution was not closed onto the sonic line");
    return rep;
}

/// Discrete gradient estimates over the reconstructed mesh: a two-direction
/// secant solve per interior node.
struct DiscreteGradients {
    // index [j][k - first_level]; valid flag per node
    std::vector<std::vector<double>> theta_x, theta_y, varpi_x, varpi_y;
    std::vector<std::vector<bool>> valid;
};

inline DiscreteGradients discrete_gradients(const PhysicalPatch& patch) {
    const CharMesh& mesh = patch.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();
    DiscreteGradients dg;
    dg.theta_x.resize(n_chars);
    dg.theta_y.resize(n_chars);
    dg.varpi_x.resize(n_chars);
    dg.varpi_y.resize(n_chars);
    dg.valid.resize(n_chars);
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t len = n_levels - mesh.chars[j].first_level;
        dg.theta_x[j].assign(len, 0.0);
        dg.theta_y[j].assign(len, 0.0);
        dg.varpi_x[j].assign(len, 0.0);
        dg.varpi_y[j].assign(len, 0.0);
        dg.valid[j].assign(len, false);
    }

    auto node_x = [&](std::size_t j, std::size_t k) {
        return patch.x[j][k - mesh.chars[j].first_level];
    };
    auto node_y = [&](std::size_t j, std::size_t k) {
        return patch.y[j][k - mesh.chars[j].first_level];
    };

    for (std::size_t j = 0; j + 1 < n_chars; ++j) {
        if (j == 0) continue;
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first + 1; k + 1 < n_levels; ++k) {
            // need both level neighbours and both along-characteristic
            // neighbours
            if (mesh.chars[j + 1].first_level > k) continue;
            if (k - 1 < first) continue;

            // direction 1: centered along the characteristic
            const double d1x = node_x(j, k - 1) - node_x(j, k + 1);
            const double d1y = node_y(j, k - 1) - node_y(j, k + 1);
            const double dth1 = patch.theta_at(j, k - 1) - patch.theta_at(j, k + 1);
            const double dvp1 = patch.varpi_at(k - 1) - patch.varpi_at(k + 1);

            // direction 2: centered across characteristics at fixed level
            // (j-1 is the larger-r neighbour)
            const double d2x = node_x(j - 1, k) - node_x(j + 1, k);
            const double d2y = node_y(j - 1, k) - node_y(j + 1, k);
            const double dth2 = patch.theta_at(j - 1, k) - patch.theta_at(j + 1, k);
            // varpi is a function of t only: no cross-level variation
            const double dvp2 = 0.0;

            const double det = d1x * d2y - d1y * d2x;
            const double scale = (d1x * d1x + d1y * d1y) + (d2x * d2x + d2y * d2y);
            if (std::abs(det) < 1e-10 * scale) continue;

            const std::size_t idx = k - first;
            dg.theta_x[j][idx] = (dth1 * d2y - dth2 * d1y) / det;
            dg.theta_y[j][idx] = (dth2 * d1x - dth1 * d2x) / det;
            dg.varpi_x[j][idx] = (dvp1 * d2y - dvp2 * d1y) / det;
            dg.varpi_y[j][idx] = (dvp2 * d1x - dvp1 * d2x) / det;
            dg.valid[j][idx] = true;
        }
    }
    return dg;
}

/// Residuals of the angle-variable system on the reconstructed patch.
struct ResidualReport {
    double closed_plus_max = 0.0;   ///< assembled from the closed-form gradients
    double closed_minus_max = 0.0;
    double discrete_plus_max = 0.0; ///< assembled from mesh finite differences
    double discrete_minus_max = 0.0;
    double gradient_check_max = 0.0; ///< discrete vs closed-form gradient defect
    std::size_t n_discrete = 0;
};

inline ResidualReport residual_euler(const PhysicalPatch& patch, const HodographSolution& sol,
                                     const GasParams& gas) {
    if (!patch.has_gradients) {
        throw SolverError("residual_euler: gradients must be filled first");
    }
    const CharMesh& mesh = patch.mesh;
    const std::size_t n_chars = mesh.chars.size();
    const std::size_t n_levels = mesh.t_levels.size();
    ResidualReport rep;

    auto assemble = [&](double t, double r, double tx, double ty, double wx, double wy,
                        double& plus, double& minus) {
        const double omega = std::acos(std::clamp(t, 0.0, 1.0));
        const double theta = patch.theta1 - r;
        const double alpha = theta + omega;
        const double beta = theta - omega;
        const double coeff = t / (gas.kappa + 1.0 - t * t); // cos(omega)/(kappa + varpi^2)
        plus = std::cos(alpha) * tx + std::sin(alpha) * ty +
               coeff * (std::cos(alpha) * wx + std::sin(alpha) * wy);
        minus = std::cos(beta) * tx + std::sin(beta) * ty -
                coeff * (std::cos(beta) * wx + std::sin(beta) * wy);
    };

    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < n_levels; ++k) {
            const std::size_t idx = k - first;
            double plus, minus;
            assemble(mesh.t_levels[k], mesh.node_r(j, k), patch.theta_x[j][idx],
                     patch.theta_y[j][idx], patch.varpi_x[j][idx], patch.varpi_y[j][idx], plus,
                     minus);
            rep.closed_plus_max = std::max(rep.closed_plus_max, std::abs(plus));
            rep.closed_minus_max = std::max(rep.closed_minus_max, std::abs(minus));
        }
    }
    for (std::size_t i = 0; i < sol.sonic_r.size(); ++i) {
        double plus, minus;
        assemble(0.0, sol.sonic_r[i], patch.sonic_theta_x[i], patch.sonic_theta_y[i],
                 patch.sonic_varpi_x[i], patch.sonic_varpi_y[i], plus, minus);
        rep.closed_plus_max = std::max(rep.closed_plus_max, std::abs(plus));
        rep.closed_minus_max = std::max(rep.closed_minus_max, std::abs(minus));
    }

    const DiscreteGradients dg = discrete_gradients(patch);
    for (std::size_t j = 0; j < n_chars; ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < n_levels; ++k) {
            const std::size_t idx = k - first;
            if (!dg.valid[j][idx]) continue;
            double plus, minus;
            assemble(mesh.t_levels[k], mesh.node_r(j, k), dg.theta_x[j][idx], dg.theta_y[j][idx],
                     dg.varpi_x[j][idx], dg.varpi_y[j][idx], plus, minus);
            rep.discrete_plus_max = std::max(rep.discrete_plus_max, std::abs(plus));
            rep.discrete_minus_max = std::max(rep.discrete_minus_max, std::abs(minus));
            const double gx = std::abs(dg.theta_x[j][idx] - patch.theta_x[j][idx]);
            const double gy = std::abs(dg.theta_y[j][idx] - patch.theta_y[j][idx]);
            const double hx = std::abs(dg.varpi_x[j][idx] - patch.varpi_x[j][idx]);
            const double hy = std::abs(dg.varpi_y[j][idx] - patch.varpi_y[j][idx]);
            rep.gradient_check_max = std::max({rep.gradient_check_max, gx, gy, hx, hy});
            ++rep.n_discrete;
        }
    }
    return rep;
}

/// Secant-slope defect of the closing characteristic against the minus-family
/// eigenvalue, max over strictly supersonic segments (t above the floor;
/// segments inside the sonic extrapolation tail carry an O(t) slope error by
/// construction and are excluded).
inline double de_slope_defect(const PhysicalPatch& patch, double t_floor = 0.05) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < patch.de.size(); ++i) {
        const auto& a = patch.de[i];
        const auto& b = patch.de[i + 1];
        const double t_a = std::sqrt(std::max(0.0, 1.0 - a.varpi * a.varpi));
        if (t_a < t_floor) continue;
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        if (std::abs(dx) < 1e-14) continue;
        const double theta_m = 0.5 * (a.theta + b.theta);
        const double varpi_m = 0.5 * (a.varpi + b.varpi);
        const double beta = theta_m - std::asin(std::min(1.0, varpi_m));
        if (std::abs(std::cos(beta)) < 1e-3) continue; // vertical family, skip
        worst = std::max(worst, std::abs(dy / dx - std::tan(beta)));
    }
    return worst;
}

} // namespace sspatch
