#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sspatch/gas.hpp"
#include "sspatch/numerics.hpp"

namespace sspatch {

/// One sample of an exact flow with analytic first derivatives.
struct OracleSample {
    double x = 0.0, y = 0.0;
    double u = 0.0, v = 0.0, c = 0.0;
    double u_x = 0.0, u_y = 0.0, v_x = 0.0, v_y = 0.0, c_x = 0.0, c_y = 0.0;
};

/// Sampled exact flow used as a verification field.
struct OracleField {
    GasParams gas{1.4, 0.2, 6.0, 1.0};
    std::string family;
    std::vector<OracleSample> samples;
};

/// Classical transonic hodograph solution on nested stream tubes.
///
/// Normalization: stagnation sound speed 1 (B0 = 1/kappa) and unit critical
/// density scale (A = 1/gamma), with gamma = 1.4. Samples are generated in
/// the (speed, streamline) parameter plane; positions and derivatives follow
/// from the closed-form map and its Jacobian.
class RinglebFlow {
public:
    RinglebFlow() : gas_(GasParams::create(1.4, 5.0, 1.0 / 1.4)) {}

    const GasParams& gas() const { return gas_; }

    OracleSample at(double q, double k) const {
        if (!(q > 0.0 && q < k)) throw std::domain_error("RinglebFlow: need 0 < q < k");
        const double c2 = 1.0 - 0.2 * q * q;
        if (!(c2 > 0.0)) throw std::domain_error("RinglebFlow: speed beyond the vacuum limit");
        const double c = std::sqrt(c2);
        const double rho = c2 * c2 * c; // c^5
        const double jj = 1.0 / c + 1.0 / (3.0 * c * c2) + 1.0 / (5.0 * c * c2 * c2) -
                          0.5 * std::log((1.0 + c) / (1.0 - c));

        OracleSample s;
        s.x = 0.5 / rho * (1.0 / (q * q) - 2.0 / (k * k)) + 0.5 * jj;
        const double root = std::sqrt(k * k - q * q);
        s.y = root / (k * rho * q);

        const double sinth = q / k;
        const double costh = root / k;
        s.u = q * costh;
        s.v = q * sinth;
        s.c = c;

        // Jacobian of the parameter map
        const double c7 = rho * c2; // c^7
        const double n = 5.0 * q * q * q * q - 6.0 * k * k * q * q + 5.0 * k * k;
        const double x_q = -n / (5.0 * k * k * q * q * q * c7);
        const double x_k = 2.0 / (rho * k * k * k);
        const double y_q = -n / (5.0 * k * k * q * q * c7 * root);
        const double y_k = (2.0 * q * q - k * k) / (rho * k * k * k * q * root);
        const double det = x_q * y_k - x_k * y_q;

        const double q_x = y_k / det;
        const double q_y = -x_k / det;
        const double k_x = -y_q / det;
        const double k_y = x_q / det;

        // u = q sqrt(k^2 - q^2)/k, v = q^2/k
        const double u_q = (k * k - 2.0 * q * q) / (k * root);
        const double u_k = q * q * q / (k * k * root);
        const double v_q = 2.0 * q / k;
        const double v_k = -q * q / (k * k);
        const double c_q = -0.2 * q / c;

        s.u_x = u_q * q_x + u_k * k_x;
        s.u_y = u_q * q_y + u_k * k_y;
        s.v_x = v_q * q_x + v_k * k_x;
        s.v_y = v_q * q_y + v_k * k_y;
        s.c_x = c_q * q_x;
        s.c_y = c_q * q_y;
        return s;
    }

    /// Supersonic samples on a box in the (speed, streamline) plane.
    OracleField sample_supersonic(std::size_t n, std::uint64_t seed) const {
        OracleField field;
        field.gas = gas_;
        field.family = "ringleb";
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> mach_d(1.05, 2.2);
        std::uniform_real_distribution<double> frac_d(0.05, 0.95);
        field.samples.reserve(n);
        while (field.samples.size() < n) {
            const double mach = mach_d(rng);
            // q from M: q^2 = M^2 c^2 = M^2 (1 - q^2/5)
            const double q = std::sqrt(mach * mach / (1.0 + 0.2 * mach * mach));
            // streamline parameter must exceed q; keep away from both limits
            const double k = q / std::sin(frac_d(rng) * 0.5 * M_PI * 0.9 + 0.05);
            if (!(k > q * 1.01)) continue;
            field.samples.push_back(at(q, k));
        }
        return field;
    }

private:
    GasParams gas_;
};

/// Purely radial supersonic source flow: rho q R = m on each ray.
///
/// Supports arbitrary gas parameters and point evaluation, which makes it the
/// field of choice for finite-difference studies.
class RadialSourceFlow {
public:
    RadialSourceFlow(const GasParams& gas, double sonic_radius = 1.0)
        : gas_(gas), sonic_radius_(sonic_radius) {
        const double q_star = gas.q_sonic();
        flux_ = density(q_star) * q_star * sonic_radius;
    }

    const GasParams& gas() const { return gas_; }

    double density(double q) const {
        const double c2 = gas_.kappa * (gas_.bernoulli - q * q);
        return std::pow(c2 / (gas_.entropy_const * gas_.gamma), 1.0 / (gas_.gamma - 1.0));
    }

    /// Supersonic speed at radius R > sonic_radius.
    double speed_at_radius(double radius) const {
        if (!(radius > sonic_radius_)) {
            throw std::domain_error("RadialSourceFlow: supersonic branch needs R > sonic radius");
        }
        const double target = flux_ / radius;
        auto g = [&](double q) { return density(q) * q - target; };
        const double lo = gas_.q_sonic() * (1.0 + 1e-13);
        const double hi = gas_.q_max() * (1.0 - 1e-13);
        return find_root(g, lo, hi, 1e-15);
    }

    OracleSample at(double x, double y) const {
        const double radius = std::hypot(x, y);
        const double q = speed_at_radius(radius);
        const double c2 = gas_.kappa * (gas_.bernoulli - q * q);
        const double c = std::sqrt(c2);
        const double mach2 = q * q / c2;
        // implicit differentiation of rho(q) q R = m
        const double dq_dr = q / (radius * (mach2 - 1.0));

        OracleSample s;
        s.x = x;
        s.y = y;
        s.c = c;
        const double ex = x / radius, ey = y / radius;
        s.u = q * ex;
        s.v = q * ey;
        const double r3 = radius * radius * radius;
        s.u_x = dq_dr * ex * ex + q * (radius * radius - x * x) / r3;
        s.u_y = dq_dr * ex * ey - q * x * y / r3;
        s.v_x = s.u_y;
        s.v_y = dq_dr * ey * ey + q * (radius * radius - y * y) / r3;
        const double dc_dq = -gas_.kappa * q / c;
        s.c_x = dc_dq * dq_dr * ex;
        s.c_y = dc_dq * dq_dr * ey;
        return s;
    }

    OracleField sample_supersonic(std::size_t n, std::uint64_t seed, double r_lo = 1.05,
                                  double r_hi = 4.0) const {
        OracleField field;
        field.gas = gas_;
        field.family = "radial-source";
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> rad_d(r_lo * sonic_radius_, r_hi * sonic_radius_);
        std::uniform_real_distribution<double> ang_d(0.0, 2.0 * M_PI);
        field.samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double radius = rad_d(rng);
            const double phi = ang_d(rng);
            field.samples.push_back(at(radius * std::cos(phi), radius * std::sin(phi)));
        }
        return field;
    }

private:
    GasParams gas_;
    double sonic_radius_;
    double flux_;
};

/// Self-consistency residuals of an oracle field: the quasilinear system,
/// the energy relation, and irrotationality.
struct OracleSelfCheck {
    double max_euler_residual = 0.0;     ///< scaled by c^2 |grad|
    double max_bernoulli_residual = 0.0; ///< relative
    double max_irrotational = 0.0;       ///< scaled
};

inline OracleSelfCheck oracle_self_check(const OracleField& field) {
    OracleSelfCheck chk;
    const GasParams& gas = field.gas;
    for (const auto& s : field.samples) {
        const double scale =
            s.c * s.c * (std::abs(s.u_x) + std::abs(s.u_y) + std::abs(s.v_y) + 1e-30);
        const double euler = (s.c * s.c - s.u * s.u) * s.u_x - s.u * s.v * (s.u_y + s.v_x) +
                             (s.c * s.c - s.v * s.v) * s.v_y;
        chk.max_euler_residual = std::max(chk.max_euler_residual, std::abs(euler) / scale);
        const double bern = s.u * s.u + s.v * s.v + 2.0 * s.c * s.c / (gas.gamma - 1.0);
        chk.max_bernoulli_residual =
            std::max(chk.max_bernoulli_residual, std::abs(bern - gas.bernoulli) / gas.bernoulli);
        const double rot_scale = std::abs(s.u_y) + std::abs(s.v_x) + 1e-30;
        chk.max_irrotational =
            std::max(chk.max_irrotational, std::abs(s.u_y - s.v_x) / rot_scale);
    }
    return chk;
}

/// Residuals of the characteristic angle-variable equations assembled from
/// analytic derivatives, in two algebraically equivalent routes.
struct AngleResiduals {
    double max_plus = 0.0;       ///< transport of theta vs the log primitive, plus family
    double max_minus = 0.0;
    double max_velocity_plus = 0.0;  ///< characteristic form in velocity variables
    double max_velocity_minus = 0.0;
    std::size_t used = 0;
    std::size_t skipped_subsonic = 0;
};

inline AngleResiduals angle_residuals(const OracleField& field, double mach_floor = 1.0 + 1e-9) {
    AngleResiduals res;
    const GasParams& gas = field.gas;
    for (const auto& s : field.samples) {
        const double q2 = s.u * s.u + s.v * s.v;
        const double q = std::sqrt(q2);
        if (!(q > mach_floor * s.c)) {
            ++res.skipped_subsonic;
            continue;
        }
        const double varpi = s.c / q;
        const double omega = std::asin(varpi);
        const double theta = std::atan2(s.v, s.u);
        const double alpha = theta + omega;
        const double beta = theta - omega;

        // chain rule: theta and varpi derivatives from (u, v, c)
        const double theta_x = (s.u * s.v_x - s.v * s.u_x) / q2;
        const double theta_y = (s.u * s.v_y - s.v * s.u_y) / q2;
        const double q_x = (s.u * s.u_x + s.v * s.v_x) / q;
        const double q_y = (s.u * s.u_y + s.v * s.v_y) / q;
        const double varpi_x = s.c_x / q - s.c * q_x / q2;
        const double varpi_y = s.c_y / q - s.c * q_y / q2;
        const double dxi = dxi_dvarpi(varpi, gas);
        const double xi_x = dxi * varpi_x;
        const double xi_y = dxi * varpi_y;

        auto dir = [&](double ang, double fx, double fy) {
            return std::cos(ang) * fx + std::sin(ang) * fy;
        };
        const double sin2w = std::sin(2.0 * omega);
        const double grad_scale = std::abs(theta_x) + std::abs(theta_y) + std::abs(xi_x) +
                                  std::abs(xi_y) + 1e-30;
        const double plus = dir(alpha, theta_x, theta_y) + sin2w * dir(alpha, xi_x, xi_y);
        const double minus = dir(beta, theta_x, theta_y) - sin2w * dir(beta, xi_x, xi_y);
        res.max_plus = std::max(res.max_plus, std::abs(plus) / grad_scale);
        res.max_minus = std::max(res.max_minus, std::abs(minus) / grad_scale);

        // characteristic form in velocity variables, skipping verticals
        const double denom = s.u * s.u - s.c * s.c;
        if (std::abs(denom) > 1e-6 * s.c * s.c) {
            const double root = s.c * std::sqrt(q2 - s.c * s.c);
            const double lam_p = (s.u * s.v + root) / denom;
            const double lam_m = (s.u * s.v - root) / denom;
            const double vel_scale = (1.0 + std::abs(lam_p) + std::abs(lam_m)) *
                                     (std::abs(s.u_x) + std::abs(s.u_y) + std::abs(s.v_x) +
                                      std::abs(s.v_y) + 1e-30);
            const double form_p = (s.u_x + lam_p * s.u_y) + lam_m * (s.v_x + lam_p * s.v_y);
            const double form_m = (s.u_x + lam_m * s.u_y) + lam_p * (s.v_x + lam_m * s.v_y);
            res.max_velocity_plus = std::max(res.max_velocity_plus, std::abs(form_p) / vel_scale);
            res.max_velocity_minus = std::max(res.max_velocity_minus, std::abs(form_m) / vel_scale);
        }
        ++res.used;
    }
    return res;
}

/// A scalar test function with an analytic gradient for the commutator check.
struct TestFunction {
    std::function<double(double, double)> fx;
    std::function<double(double, double)> fy;

    /// generic non-symmetric default: f = sin(x) y^2 + x
    static TestFunction generic() {
        TestFunction f;
        f.fx = [](double x, double y) { return std::cos(x) * y * y + 1.0; };
        f.fy = [](double x, double y) { return 2.0 * std::sin(x) * y; };
        return f;
    }
};

/// Commutator defect of the two characteristic directional derivatives
/// applied to a test function, evaluated by second-order finite differences
/// of analytic first derivatives. The relation is an operator identity, so
/// halving h should quarter the defect.
inline double commutator_residual(const RadialSourceFlow& flow, double x, double y, double h,
                                  const TestFunction& f = TestFunction::generic()) {
    struct Angles {
        double alpha, beta, omega;
    };
    auto angles_at = [&](double px, double py) {
        const OracleSample s = flow.at(px, py);
        const double q = std::hypot(s.u, s.v);
        const double omega = std::asin(s.c / q);
        const double theta = std::atan2(s.v, s.u);
        return Angles{theta + omega, theta - omega, omega};
    };
    auto dplus = [&](double px, double py) {
        const Angles a = angles_at(px, py);
        return std::cos(a.alpha) * f.fx(px, py) + std::sin(a.alpha) * f.fy(px, py);
    };
    auto dminus = [&](double px, double py) {
        const Angles a = angles_at(px, py);
        return std::cos(a.beta) * f.fx(px, py) + std::sin(a.beta) * f.fy(px, py);
    };

    const Angles a0 = angles_at(x, y);
    auto diff_along = [&](double ang, auto&& g) {
        const double cx = std::cos(ang), cy = std::sin(ang);
        return (g(x + h * cx, y + h * cy) - g(x - h * cx, y - h * cy)) / (2.0 * h);
    };
    const double lhs = diff_along(a0.beta, dplus) - diff_along(a0.alpha, dminus);

    auto alpha_of = [&](double px, double py) { return angles_at(px, py).alpha; };
    auto beta_of = [&](double px, double py) { return angles_at(px, py).beta; };
    const double dm_alpha = diff_along(a0.beta, alpha_of);
    const double dp_beta = diff_along(a0.alpha, beta_of);
    const double sin2w = std::sin(2.0 * a0.omega);
    const double cos2w = std::cos(2.0 * a0.omega);
    const double u_val = dplus(x, y);
    const double v_val = dminus(x, y);
    const double rhs = (cos2w * dm_alpha - dp_beta) / sin2w * u_val +
                       (cos2w * dp_beta - dm_alpha) / sin2w * v_val;
    return std::abs(lhs - rhs);
}

} // namespace sspatch
