#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sspatch/gas.hpp"
#include "sspatch/numerics.hpp"

namespace sspatch {

/// Thrown when boundary data is structurally unusable (as opposed to merely
/// inadmissible, which check_admissibility reports without throwing).
struct BoundaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wall streamline and Mach profile over [x1, x2].
///
/// Two backends: closed-form polynomial presets (phi' and Mach number as
/// polynomials in x) and sampled tables with C^2 interpolation. The closed
/// form supports machine-precision inverse lookups; tables fall back to
/// monotone interpolation.
struct BoundarySpec {
    double x1 = 0.0;
    double x2 = 0.0;
    double y1 = 0.0; ///< wall height at x1
    int n_samples = 257;
    bool closed_form = true;

    std::function<double(double)> phi;        ///< wall curve y = phi(x)
    std::function<double(double)> phi_p;      ///< phi'
    std::function<double(double)> phi_pp;     ///< phi''
    std::function<double(double)> varpi_hat;  ///< boundary 1/M profile
    std::function<double(double)> varpi_hat_p;

    /// Polynomial preset: phi' and Mach number given by ascending-power
    /// coefficient lists. The Mach profile is converted to varpi = 1/M.
    static BoundarySpec poly(std::vector<double> phi_prime_coeffs, std::vector<double> mach_coeffs,
                             double x1, double x2, double y1 = 0.0, int n_samples = 257) {
        if (!(x2 > x1)) throw BoundaryError("BoundarySpec: need x2 > x1");
        if (n_samples < 8) throw BoundaryError("BoundarySpec: need at least 8 samples");
        BoundarySpec s;
        s.x1 = x1;
        s.x2 = x2;
        s.y1 = y1;
        s.n_samples = n_samples;
        s.closed_form = true;
        auto dpp = poly_derivative(phi_prime_coeffs);
        auto ipp = poly_antiderivative(phi_prime_coeffs);
        const double phi_at_x1 = poly_eval(ipp, x1);
        auto dm = poly_derivative(mach_coeffs);
        s.phi = [ipp, phi_at_x1, y1](double x) { return poly_eval(ipp, x) - phi_at_x1 + y1; };
        s.phi_p = [c = std::move(phi_prime_coeffs)](double x) { return poly_eval(c, x); };
        s.phi_pp = [c = std::move(dpp)](double x) { return poly_eval(c, x); };
        s.varpi_hat = [mc = mach_coeffs](double x) { return 1.0 / poly_eval(mc, x); };
        s.varpi_hat_p = [mc = std::move(mach_coeffs), dc = std::move(dm)](double x) {
            const double m = poly_eval(mc, x);
            return -poly_eval(dc, x) / (m * m);
        };
        return s;
    }

    /// Reference problem used throughout the tests: concave wall with
    /// phi'(x) = 1 - 0.4 x and Mach profile M(x) = 1 + 0.5 x - 0.25 x^2.
    static BoundarySpec reference(int n_samples = 257) {
        return poly({1.0, -0.4}, {1.0, 0.5, -0.25}, 0.0, 0.4, 0.0, n_samples);
    }

    /// Flat wall: violates the concavity hypothesis; kept for failure tests.
    static BoundarySpec flat_wall(int n_samples = 257) {
        return poly({1.0}, {1.0, 0.5}, 0.0, 0.4, 0.0, n_samples);
    }

    /// Sampled tables: varpi file has rows "x varpi", wall file has rows
    /// "x phi' phi''"; both whitespace-delimited with strictly increasing x.
    static BoundarySpec from_tables(const std::string& varpi_path, const std::string& wall_path,
                                    double y1 = 0.0);
};

namespace detail {

inline std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t ncols) {
    std::ifstream in(path);
    if (!in) throw BoundaryError("cannot open table file: " + path);
    std::vector<std::vector<double>> cols(ncols);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (row.empty()) continue;
        if (row.size() != ncols) {
            throw BoundaryError(path + ": line " + std::to_string(lineno) + ": expected " +
                                std::to_string(ncols) + " columns");
        }
        for (std::size_t i = 0; i < ncols; ++i) cols[i].push_back(row[i]);
    }
    if (cols[0].size() < 4) throw BoundaryError(path + ": need at least 4 rows");
    for (std::size_t i = 0; i + 1 < cols[0].size(); ++i) {
        if (!(cols[0][i + 1] > cols[0][i])) {
            throw BoundaryError(path + ": x column must be strictly increasing");
        }
    }
    return cols;
}

} // namespace detail

inline BoundarySpec BoundarySpec::from_tables(const std::string& varpi_path,
                                              const std::string& wall_path, double y1) {
    auto vp = detail::read_columns(varpi_path, 2);
    auto wp = detail::read_columns(wall_path, 3);
    const double x1 = std::max(vp[0].front(), wp[0].front());
    const double x2 = std::min(vp[0].back(), wp[0].back());
    if (!(x2 > x1)) throw BoundaryError("tables do not overlap in x");

    auto varpi_sp = std::make_shared<CubicSpline>(vp[0], vp[1]);
    auto phi_p_h = std::make_shared<CubicHermite>(
        CubicHermite::with_derivatives(wp[0], wp[1], wp[2]));

    BoundarySpec s;
    s.x1 = x1;
    s.x2 = x2;
    s.y1 = y1;
    s.n_samples = static_cast<int>(std::max(vp[0].size(), wp[0].size()));
    s.closed_form = false;
    const double base = phi_p_h->integral(x1);
    s.phi = [phi_p_h, base, y1](double x) { return phi_p_h->integral(x) - base + y1; };
    s.phi_p = [phi_p_h](double x) { return phi_p_h->eval(x); };
    s.phi_pp = [phi_p_h](double x) { return phi_p_h->derivative(x); };
    s.varpi_hat = [varpi_sp](double x) { return varpi_sp->eval(x); };
    s.varpi_hat_p = [varpi_sp](double x) { return varpi_sp->derivative(x); };
    return s;
}

/// Derived boundary data at one station.
struct BoundaryPoint {
    double x = 0.0;
    double theta = 0.0;
    double varpi = 0.0;
    double t = 0.0;
    double r = 0.0;
    double a_hat = 0.0; ///< boundary value of the plus-family quantity
    double b_hat = 0.0; ///< boundary value of the minus-family quantity
    double d_hat = 0.0; ///< streamwise Xi derivative
    double a_bar = 0.0; ///< 1/a_hat
    double b_bar = 0.0; ///< -1/b_hat
    double w_bnd = 0.0; ///< boundary seed of the coalescence quantity
};

/// Admissibility margins for the boundary hypotheses, one entry per sample.
struct AdmissibilityReport {
    bool pass = false;
    std::string first_failure;
    double sonic_start_error = 0.0;      ///< |varpi(x1) - 1|
    double min_phi_p = 0.0;              ///< must stay positive
    double max_phi_pp = 0.0;             ///< must stay negative
    double max_varpi_p = 0.0;            ///< must stay negative
    double max_sign_condition = 0.0;     ///< concavity-vs-Mach condition, must stay negative
    double min_spacelike_margin = 0.0;   ///< dr/dt - lambda, interior samples only
    double max_interior_varpi = 0.0;     ///< must stay below 1 away from x1
    std::vector<double> xs;
    std::vector<double> sign_condition;
    std::vector<double> spacelike_margin;
};

/// Sampled trace of the boundary streamline and its hodograph image.
struct BoundaryTrace {
    BoundarySpec spec;
    GasParams gas{1.4, 0.2, 6.0, 1.0};
    double theta1 = 0.0; ///< flow angle at the sonic endpoint
    double t0 = 0.0;
    double r0 = 0.0;
    double m_hat0 = 0.0, M_hat0 = 0.0; ///< observed extrema of |a|,|b|,|d|
    double m_bar0 = 0.0, M_bar0 = 0.0; ///< observed extrema of a_bar, b_bar
    std::vector<double> x, theta, varpi, t, r;
    std::vector<double> a_hat, b_hat, d_hat, a_bar, b_bar, w_bnd;

    // table-backend interpolants over r (closed-form specs solve instead)
    CubicHermite x_of_r_interp;
    CubicHermite t_of_r_interp;

    /// Evaluate all derived boundary fields at a station x.
    BoundaryPoint eval_at_x(double xq) const {
        BoundaryPoint p;
        p.x = xq;
        const double pp = spec.phi_p(xq);
        const double ppp = spec.phi_pp(xq);
        const double w = spec.varpi_hat(xq);
        const double wp = spec.varpi_hat_p(xq);
        p.theta = std::atan(pp);
        p.varpi = w;
        p.t = std::sqrt(std::max(0.0, 1.0 - w * w));
        p.r = theta1 - p.theta;
        const double cth = std::cos(p.theta);
        const double kpw2 = gas.kappa + w * w;
        const double curv = ppp / (1.0 + pp * pp);
        const double mach_term = p.t / kpw2 * wp;
        p.a_hat = cth / (2.0 * w) * (mach_term - curv);
        p.b_hat = cth / (2.0 * w) * (mach_term + curv);
        p.d_hat = cth * wp / (2.0 * w * kpw2);
        p.a_bar = 1.0 / p.a_hat;
        p.b_bar = -1.0 / p.b_hat;
        p.w_bnd = 2.0 * p.d_hat / (p.a_hat * p.b_hat);
        return p;
    }

    /// Inverse parametrization x(r). Closed-form specs solve the monotone
    /// equation to machine precision; tables interpolate.
    double x_of_r(double rq) const {
        const double pad = 1e-12 * (1.0 + r0);
        if (rq < -pad || rq > r0 + pad) throw std::domain_error("x_of_r: r outside [0, r0]");
        rq = std::clamp(rq, 0.0, r0);
        if (!spec.closed_form) return x_of_r_interp.eval(rq);
        auto g = [&](double xq) { return (theta1 - std::atan(spec.phi_p(xq))) - rq; };
        auto dg = [&](double xq) {
            const double pp = spec.phi_p(xq);
            return -spec.phi_pp(xq) / (1.0 + pp * pp);
        };
        return newton_root(g, dg, x_of_r_interp.eval(rq), spec.x1, spec.x2);
    }

    /// Inverse parametrization x(t) of the hodograph image.
    double x_of_t(double tq) const {
        const double pad = 1e-12 * (1.0 + t0);
        if (tq < -pad || tq > t0 + pad) throw std::domain_error("x_of_t: t outside [0, t0]");
        tq = std::clamp(tq, 0.0, t0);
        if (tq == 0.0) return spec.x1;
        const double w_target = std::sqrt(1.0 - tq * tq);
        if (!spec.closed_form) {
            // reuse the r-interpolant: find r with t(r) = tq, then x(r)
            auto g = [&](double rq) { return t_of_r_interp.eval(rq) - tq; };
            const double rq = find_root(g, 0.0, r0);
            return x_of_r_interp.eval(rq);
        }
        auto g = [&](double xq) { return spec.varpi_hat(xq) - w_target; };
        auto dg = [&](double xq) { return spec.varpi_hat_p(xq); };
        return newton_root(g, dg, 0.5 * (spec.x1 + spec.x2), spec.x1, spec.x2);
    }

    /// Boundary image of the hodograph curve, r as a function of t.
    double r_of_t(double tq) const {
        const double xq = x_of_t(tq);
        return theta1 - std::atan(spec.phi_p(xq));
    }

    BoundaryPoint lookup_by_r(double rq) const { return eval_at_x(x_of_r(rq)); }
    BoundaryPoint lookup_by_t(double tq) const { return eval_at_x(x_of_t(tq)); }
};

/// Check the boundary hypotheses sample by sample. Failures populate the
/// report; nothing throws here.
inline AdmissibilityReport check_admissibility(const BoundarySpec& spec, const GasParams& gas) {
    AdmissibilityReport rep;
    const int n = spec.n_samples;
    rep.xs.resize(n);
    rep.sign_condition.resize(n);
    rep.spacelike_margin.assign(n, 0.0);

    rep.min_phi_p = std::numeric_limits<double>::infinity();
    rep.max_phi_pp = -std::numeric_limits<double>::infinity();
    rep.max_varpi_p = -std::numeric_limits<double>::infinity();
    rep.max_sign_condition = -std::numeric_limits<double>::infinity();
    rep.min_spacelike_margin = std::numeric_limits<double>::infinity();
    rep.max_interior_varpi = 0.0;

    rep.sonic_start_error = std::abs(spec.varpi_hat(spec.x1) - 1.0);

    for (int i = 0; i < n; ++i) {
        const double x = spec.x1 + (spec.x2 - spec.x1) * i / (n - 1.0);
        rep.xs[i] = x;
        const double pp = spec.phi_p(x);
        const double ppp = spec.phi_pp(x);
        const double w = spec.varpi_hat(x);
        const double wp = spec.varpi_hat_p(x);
        rep.min_phi_p = std::min(rep.min_phi_p, pp);
        rep.max_phi_pp = std::max(rep.max_phi_pp, ppp);
        rep.max_varpi_p = std::max(rep.max_varpi_p, wp);
        if (i > 0) rep.max_interior_varpi = std::max(rep.max_interior_varpi, w);
        const double sign_cond =
            ppp / (1.0 + pp * pp) - std::sqrt(std::max(0.0, 1.0 - w * w)) / (gas.kappa + w * w) * wp;
        rep.sign_condition[i] = sign_cond;
        rep.max_sign_condition = std::max(rep.max_sign_condition, sign_cond);
        if (i > 0 && w < 1.0 && w > 0.0) {
            const double t = std::sqrt(1.0 - w * w);
            const double drdx = -ppp / (1.0 + pp * pp);
            const double dtdx = -w * wp / t;
            const double margin = drdx / dtdx - char_slope(t, gas);
            rep.spacelike_margin[i] = margin;
            rep.min_spacelike_margin = std::min(rep.min_spacelike_margin, margin);
        }
    }

    rep.pass = true;
    auto fail = [&](const std::string& why) {
        if (rep.pass) rep.first_failure = why;
        rep.pass = false;
    };
    if (rep.sonic_start_error > 1e-10) fail("boundary does not start sonic (varpi(x1) != 1)");
    if (!(rep.min_phi_p > 0.0)) fail("wall slope must stay positive");
    if (!(rep.max_phi_pp < 0.0)) fail("wall concavity violated (phi'' must be negative)");
    if (!(rep.max_varpi_p < 0.0)) fail("Mach profile must strictly increase (varpi' < 0)");
    if (!(rep.max_interior_varpi < 1.0)) fail("interior samples must be strictly supersonic");
    if (!(rep.max_sign_condition < 0.0)) fail("concavity-vs-Mach sign condition violated");
    if (!(rep.min_spacelike_margin > 0.0)) fail("boundary image not space-like at an interior sample");
    return rep;
}

/// Build the sampled boundary trace and validate its structural invariants.
inline BoundaryTrace compute_trace(const BoundarySpec& spec, const GasParams& gas) {
    BoundaryTrace tr;
    tr.spec = spec;
    tr.gas = gas;
    tr.theta1 = std::atan(spec.phi_p(spec.x1));

    const int n = spec.n_samples;
    tr.x.resize(n);
    tr.theta.resize(n);
    tr.varpi.resize(n);
    tr.t.resize(n);
    tr.r.resize(n);
    tr.a_hat.resize(n);
    tr.b_hat.resize(n);
    tr.d_hat.resize(n);
    tr.a_bar.resize(n);
    tr.b_bar.resize(n);
    tr.w_bnd.resize(n);

    for (int i = 0; i < n; ++i) {
        const double x = spec.x1 + (spec.x2 - spec.x1) * i / (n - 1.0);
        const BoundaryPoint p = tr.eval_at_x(x);
        tr.x[i] = x;
        tr.theta[i] = p.theta;
        tr.varpi[i] = p.varpi;
        tr.t[i] = p.t;
        tr.r[i] = p.r;
        tr.a_hat[i] = p.a_hat;
        tr.b_hat[i] = p.b_hat;
        tr.d_hat[i] = p.d_hat;
        tr.a_bar[i] = p.a_bar;
        tr.b_bar[i] = p.b_bar;
        tr.w_bnd[i] = p.w_bnd;
    }

    for (int i = 0; i + 1 < n; ++i) {
        if (!(tr.r[i + 1] > tr.r[i])) {
            throw BoundaryError("compute_trace: r(x) not strictly increasing near x = " +
                                std::to_string(tr.x[i]));
        }
        if (!(tr.t[i + 1] > tr.t[i])) {
            throw BoundaryError("compute_trace: t(x) not strictly increasing near x = " +
                                std::to_string(tr.x[i]));
        }
    }
    tr.t0 = tr.t.back();
    tr.r0 = tr.r.back();

    tr.m_hat0 = std::numeric_limits<double>::infinity();
    tr.M_hat0 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = tr.a_hat[i], b = -tr.b_hat[i], d = -tr.d_hat[i];
        tr.m_hat0 = std::min({tr.m_hat0, a, b, d});
        tr.M_hat0 = std::max({tr.M_hat0, a, b, d});
    }
    tr.m_bar0 = std::numeric_limits<double>::infinity();
    tr.M_bar0 = 0.0;
    for (int i = 0; i < n; ++i) {
        tr.m_bar0 = std::min({tr.m_bar0, tr.a_bar[i], tr.b_bar[i]});
        tr.M_bar0 = std::max({tr.M_bar0, tr.a_bar[i], tr.b_bar[i]});
    }

    // inverse interpolant with exact knot derivatives via the chain rule;
    // t(r) has infinite slope at the sonic endpoint, so it gets the
    // shape-preserving estimate instead
    std::vector<double> dxdr(n);
    for (int i = 0; i < n; ++i) {
        const double pp = spec.phi_p(tr.x[i]);
        const double drdx = -spec.phi_pp(tr.x[i]) / (1.0 + pp * pp);
        dxdr[i] = 1.0 / drdx;
    }
    tr.x_of_r_interp = CubicHermite::with_derivatives(tr.r, tr.x, dxdr);
    tr.t_of_r_interp = CubicHermite::monotone(tr.r, tr.t);
    return tr;
}

/// Hodograph region corners and the closing characteristic.
struct RegionGeometry {
    double t0 = 0.0;
    double r0 = 0.0;
    double shift_t0 = 0.0; ///< s(t0)
    double r_star = 0.0;   ///< r0 - s(t0), the degenerate-line extent

    /// Closing characteristic r = check(t) through the far corner.
    double r_check(double t, const GasParams& gas) const {
        return r0 - (shift_t0 - char_shift(t, gas));
    }
};

inline RegionGeometry region_corners(const BoundaryTrace& trace, const GasParams& gas) {
    RegionGeometry g;
    g.t0 = trace.t0;
    g.r0 = trace.r0;
    g.shift_t0 = char_shift(trace.t0, gas);
    g.r_star = g.r0 - g.shift_t0;
    if (!(g.r_star > 0.0)) {
        throw BoundaryError("region_corners: closing characteristic exits through the sonic side "
                            "(r* <= 0); shorten the boundary arc");
    }
    return g;
}

/// Interpolated boundary values at hodograph ordinate r in [0, r0].
inline BoundaryPoint boundary_lookup(const BoundaryTrace& trace, double r) {
    return trace.lookup_by_r(r);
}

} // namespace sspatch
