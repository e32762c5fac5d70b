#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "sspatch/numerics.hpp"

namespace sspatch {

/// Polytropic gas constants for the steady isentropic system.
///
/// kappa is stored explicitly so that every formula reads the same value;
/// the entropy constant only matters when a density is requested.
struct GasParams {
    double gamma;         ///< adiabatic index, > 1
    double kappa;         ///< (gamma - 1)/2
    double bernoulli;     ///< total-enthalpy constant B0, units of velocity^2
    double entropy_const; ///< A in p = A rho^gamma

    static GasParams create(double gamma, double bernoulli, double entropy_const = 1.0) {
        if (!(gamma > 1.0)) throw std::domain_error("GasParams: gamma must exceed 1");
        if (!(bernoulli > 0.0)) throw std::domain_error("GasParams: Bernoulli constant must be positive");
        if (!(entropy_const > 0.0)) throw std::domain_error("GasParams: entropy constant must be positive");
        return GasParams{gamma, 0.5 * (gamma - 1.0), bernoulli, entropy_const};
    }

    /// Maximum attainable speed (vacuum limit).
    double q_max() const { return std::sqrt(bernoulli); }

    /// Critical (sonic) speed where q = c.
    double q_sonic() const { return std::sqrt(kappa * bernoulli / (kappa + 1.0)); }
};

/// Flow state in the angle representation.
struct AngleState {
    double theta; ///< flow angle, full-quadrant
    double omega; ///< Mach angle in (0, pi/2]
    double varpi; ///< sin(omega) = 1/M
    double mach;
    double alpha; ///< theta + omega
    double beta;  ///< theta - omega
    double xi;    ///< log-primitive of the Mach-angle variable

    bool sonic(double tol = 0.0) const { return varpi >= 1.0 - tol; }
};

/// Flow state in velocity variables.
struct VelocityState {
    double u;
    double v;
    double c; ///< sound speed
    double q; ///< speed
    double rho; ///< density from the entropy constant
};

/// Xi(varpi), the primitive whose gradient the characteristic quantities transport.
inline double xi_of_varpi(double varpi, const GasParams& gas) {
    if (!(varpi > 0.0)) throw std::domain_error("xi_of_varpi: varpi must be positive");
    if (varpi > 1.0 + 1e-14) throw std::domain_error("xi_of_varpi: varpi must not exceed 1");
    return std::log(varpi * varpi / (gas.kappa + varpi * varpi)) / (4.0 * gas.kappa);
}

inline double dxi_dvarpi(double varpi, const GasParams& gas) {
    if (!(varpi > 0.0)) throw std::domain_error("dxi_dvarpi: varpi must be positive");
    return 1.0 / (2.0 * varpi * (gas.kappa + varpi * varpi));
}

inline double density_from_sound_speed(double c, const GasParams& gas) {
    return std::pow(c * c / (gas.entropy_const * gas.gamma), 1.0 / (gas.gamma - 1.0));
}

/// Convert a velocity-plane state to angle variables.
///
/// Rejects subsonic and non-physical inputs; the sonic case maps to
/// omega = pi/2 exactly.
inline AngleState angles_from_velocity(double u, double v, const GasParams& gas) {
    const double q2 = u * u + v * v;
    const double q = std::sqrt(q2);
    if (!(q > 0.0)) throw std::domain_error("angles_from_velocity: zero speed");
    const double c2 = gas.kappa * (gas.bernoulli - q2);
    if (!(c2 > 0.0)) throw std::domain_error("angles_from_velocity: non-physical state (B0 <= q^2)");
    const double c = std::sqrt(c2);
    if (q < c * (1.0 - 1e-14)) throw std::domain_error("angles_from_velocity: subsonic state");
    AngleState s;
    s.theta = std::atan2(v, u);
    s.varpi = std::min(c / q, 1.0);
    s.omega = std::asin(s.varpi);
    s.mach = 1.0 / s.varpi;
    s.alpha = s.theta + s.omega;
    s.beta = s.theta - s.omega;
    s.xi = xi_of_varpi(s.varpi, gas);
    return s;
}

/// Convert (theta, varpi) back to the velocity plane.
///
/// The sound speed follows from eliminating q between the Bernoulli relation
/// and q = c/varpi: c^2 = kappa B0 varpi^2 / (kappa + varpi^2).
inline VelocityState velocity_from_angles(double theta, double varpi, const GasParams& gas) {
    if (!(varpi > 0.0) || varpi > 1.0 + 1e-14) {
        throw std::domain_error("velocity_from_angles: varpi must lie in (0, 1]");
    }
    varpi = std::min(varpi, 1.0);
    const double c2 = gas.kappa * gas.bernoulli * varpi * varpi / (gas.kappa + varpi * varpi);
    VelocityState s;
    s.c = std::sqrt(c2);
    s.q = s.c / varpi;
    s.u = s.q * std::cos(theta);
    s.v = s.q * std::sin(theta);
    s.rho = density_from_sound_speed(s.c, gas);
    return s;
}

inline AngleState angle_state(double theta, double varpi, const GasParams& gas) {
    if (!(varpi > 0.0) || varpi > 1.0 + 1e-14) {
        throw std::domain_error("angle_state: varpi must lie in (0, 1]");
    }
    AngleState s;
    s.theta = theta;
    s.varpi = std::min(varpi, 1.0);
    s.omega = std::asin(s.varpi);
    s.mach = 1.0 / s.varpi;
    s.alpha = theta + s.omega;
    s.beta = theta - s.omega;
    s.xi = xi_of_varpi(s.varpi, gas);
    return s;
}

/// Characteristic slopes with vertical directions reported as a tag instead of
/// an overflowing tangent.
struct CharSlopes {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    bool plus_vertical = false;
    bool minus_vertical = false;
};

inline constexpr double kVerticalCosTol = 1e-12;

/// Slopes tan(theta +- omega) of the two characteristic families.
inline CharSlopes characteristic_slopes(const AngleState& state) {
    CharSlopes s;
    const double ca = std::cos(state.alpha);
    const double cb = std::cos(state.beta);
    if (std::abs(ca) < kVerticalCosTol) {
        s.plus_vertical = true;
    } else {
        s.lambda_plus = std::tan(state.alpha);
    }
    if (std::abs(cb) < kVerticalCosTol) {
        s.minus_vertical = true;
    } else {
        s.lambda_minus = std::tan(state.beta);
    }
    return s;
}

/// Quotient form of the eigenvalues evaluated from velocity variables.
///
/// The denominator equals q^2 cos(theta+omega) cos(theta-omega), so the "+"
/// numerator always belongs to the theta+omega family. Near a vertical
/// configuration the quotient is 0/0 or overflowing for one family; both
/// slopes are then tagged so callers skip the comparison.
inline CharSlopes eigenvalues_from_velocity(const VelocityState& v) {
    CharSlopes s;
    const double q2 = v.q * v.q;
    const double disc = q2 - v.c * v.c;
    if (disc < 0.0) throw std::domain_error("eigenvalues_from_velocity: subsonic state");
    const double root = v.c * std::sqrt(disc);
    const double denom = v.u * v.u - v.c * v.c;
    if (std::abs(denom) < 1e-12 * q2) {
        s.plus_vertical = s.minus_vertical = true;
        return s;
    }
    s.lambda_plus = (v.u * v.v + root) / denom;
    s.lambda_minus = (v.u * v.v - root) / denom;
    return s;
}

/// F(t) = (1 - t^2)(kappa + 1 - t^2), the degenerate-system coefficient.
inline double coefficient_f(double t, const GasParams& gas) {
    if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("coefficient_f: t must lie in [0, 1)");
    const double one_mt2 = 1.0 - t * t;
    return one_mt2 * (gas.kappa + one_mt2);
}

/// Characteristic slope in the hodograph plane, dr/dt = lambda(t).
inline double char_slope(double t, const GasParams& gas) {
    if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("char_slope: t must lie in [0, 1)");
    return std::sqrt(1.0 - t * t) * t * t / coefficient_f(t, gas);
}

/// Integrated characteristic shift s(t) = int_0^t lambda.
inline double char_shift(double t, const GasParams& gas, double abs_tol = 1e-12) {
    if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("char_shift: t must lie in [0, 1)");
    if (t == 0.0) return 0.0;
    return integrate([&](double s) { return char_slope(s, gas); }, 0.0, t, abs_tol);
}

} // namespace sspatch
