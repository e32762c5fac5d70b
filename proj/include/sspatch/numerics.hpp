#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sspatch {

/// Thrown when an internal numerical routine fails to converge.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        throw NumericsError("adaptive quadrature: recursion limit reached near t=" +
                            std::to_string(m));
    }
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with an absolute error target.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 60);
}

/// Bisection refined by regula falsi; requires a sign change on [a, b].
template <class F>
double find_root(F&& f, double a, double b, double tol = 1e-14, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NumericsError("find_root: no sign change on bracket");
    }
    for (int i = 0; i < max_iter; ++i) {
        // secant candidate, clipped to the bracket interior
        double m = b - fb * (b - a) / (fb - fa);
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (!(m > lo && m < hi)) m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0 || std::abs(b - a) < tol * (1.0 + std::abs(m))) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

/// Newton iteration with a guaranteed bracket fallback.
template <class F, class DF>
double newton_root(F&& f, DF&& df, double x0, double lo, double hi, double tol = 1e-14,
                   int max_iter = 100) {
    double x = std::clamp(x0, lo, hi);
    for (int i = 0; i < max_iter; ++i) {
        const double fx = f(x);
        const double d = df(x);
        if (d == 0.0) break;
        const double step = fx / d;
        const double xn = x - step;
        if (!(xn >= lo && xn <= hi)) break;
        if (std::abs(step) <= tol * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    return find_root(f, lo, hi, tol);
}

/// Ordinary least-squares line fit.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw NumericsError("fit_line: need at least two samples");
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericsError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

/// Evaluate a polynomial given coefficients in ascending-power order.
inline double poly_eval(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

inline std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    std::vector<double> d;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(coeffs[i] * static_cast<double>(i));
    if (d.empty()) d.push_back(0.0);
    return d;
}

inline std::vector<double> poly_antiderivative(const std::vector<double>& coeffs) {
    std::vector<double> a(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) a[i + 1] = coeffs[i] / static_cast<double>(i + 1);
    return a;
}

/// Piecewise cubic Hermite interpolant on a strictly increasing grid.
///
/// Knot derivatives come either from the caller (exact values) or from
/// shape-preserving three-point estimates (Fritsch-Carlson limiting), so the
/// interpolant of monotone data stays monotone.
class CubicHermite {
public:
    CubicHermite() = default;

    static CubicHermite with_derivatives(std::vector<double> xs, std::vector<double> ys,
                                         std::vector<double> ds) {
        CubicHermite h;
        h.init(std::move(xs), std::move(ys), std::move(ds));
        return h;
    }

    static CubicHermite monotone(std::vector<double> xs, std::vector<double> ys) {
        const std::size_t n = xs.size();
        if (n < 2 || ys.size() != n) throw NumericsError("CubicHermite: need >= 2 knots");
        std::vector<double> d(n, 0.0);
        std::vector<double> slope(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if (n == 2) {
            d[0] = d[1] = slope[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (slope[i - 1] * slope[i] <= 0.0) {
                    d[i] = 0.0;
                } else {
                    // weighted harmonic mean (Fritsch-Butland)
                    const double h0 = xs[i] - xs[i - 1];
                    const double h1 = xs[i + 1] - xs[i];
                    const double w0 = 2.0 * h1 + h0;
                    const double w1 = h1 + 2.0 * h0;
                    d[i] = (w0 + w1) / (w0 / slope[i - 1] + w1 / slope[i]);
                }
            }
            d[0] = end_slope(xs[0], xs[1], xs[2], slope[0], slope[1]);
            d[n - 1] = end_slope(xs[n - 1], xs[n - 2], xs[n - 3], slope[n - 2], slope[n - 3]);
        }
        CubicHermite h;
        h.init(std::move(xs), std::move(ys), std::move(d));
        return h;
    }

    double operator()(double x) const { return eval(x); }

    double eval(double x) const {
        const auto [i, u, h] = locate(x);
        const double u2 = u * u, u3 = u2 * u;
        return ys_[i] * (2 * u3 - 3 * u2 + 1) + h * ds_[i] * (u3 - 2 * u2 + u) +
               ys_[i + 1] * (-2 * u3 + 3 * u2) + h * ds_[i + 1] * (u3 - u2);
    }

    double derivative(double x) const {
        const auto [i, u, h] = locate(x);
        const double u2 = u * u;
        return (ys_[i] * (6 * u2 - 6 * u) + h * ds_[i] * (3 * u2 - 4 * u + 1) +
                ys_[i + 1] * (-6 * u2 + 6 * u) + h * ds_[i + 1] * (3 * u2 - 2 * u)) /
               h;
    }

    /// Integral of the interpolant from the first knot to x.
    double integral(double x) const {
        const auto [idx, u, h] = locate(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < idx; ++i) acc += segment_integral(i, 1.0);
        return acc + segment_integral(idx, u);
    }

    double front_x() const { return xs_.front(); }
    double back_x() const { return xs_.back(); }
    const std::vector<double>& knots() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }

private:
    static double end_slope(double x0, double x1, double x2, double s0, double s1) {
        const double h0 = x1 - x0, h1 = x2 - x1;
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) d = 0.0;
        else if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0)) d = 3.0 * s0;
        return d;
    }

    void init(std::vector<double> xs, std::vector<double> ys, std::vector<double> ds) {
        if (xs.size() < 2 || xs.size() != ys.size() || xs.size() != ds.size()) {
            throw NumericsError("CubicHermite: inconsistent knot arrays");
        }
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            if (!(xs[i + 1] > xs[i])) throw NumericsError("CubicHermite: knots must increase");
        }
        xs_ = std::move(xs);
        ys_ = std::move(ys);
        ds_ = std::move(ds);
    }

    std::tuple<std::size_t, double, double> locate(double x) const {
        const double lo = xs_.front(), hi = xs_.back();
        const double pad = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
        if (x < lo - pad || x > hi + pad) {
            throw std::domain_error("CubicHermite: query outside knot range");
        }
        x = std::clamp(x, lo, hi);
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(xs_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, xs_.size() - 1) - 1;
        const double h = xs_[i + 1] - xs_[i];
        return {i, (x - xs_[i]) / h, h};
    }

    double segment_integral(std::size_t i, double u) const {
        const double h = xs_[i + 1] - xs_[i];
        const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
        const double a = ys_[i] * (0.5 * u4 - u3 + u);
        const double b = ds_[i] * h * (0.25 * u4 - 2.0 * u3 / 3.0 + 0.5 * u2);
        const double c = ys_[i + 1] * (-0.5 * u4 + u3);
        const double d = ds_[i + 1] * h * (0.25 * u4 - u3 / 3.0);
        return h * (a + b + c + d);
    }

    std::vector<double> xs_, ys_, ds_;
};

/// Natural cubic spline (C^2) for table-driven boundary profiles.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
        const std::size_t n = xs_.size();
        if (n < 3 || ys_.size() != n) throw NumericsError("CubicSpline: need >= 3 knots");
        std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), z(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = xs_[i + 1] - xs_[i];
            if (!(h[i] > 0.0)) throw NumericsError("CubicSpline: knots must increase");
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            alpha[i] = 3.0 * ((ys_[i + 1] - ys_[i]) / h[i] - (ys_[i] - ys_[i - 1]) / h[i - 1]);
        }
        l[0] = 1.0;
        mu[0] = z[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (xs_[i + 1] - xs_[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
        }
        c_.assign(n, 0.0);
        b_.assign(n - 1, 0.0);
        d_.assign(n - 1, 0.0);
        for (std::size_t j = n - 1; j-- > 0;) {
            c_[j] = z[j] - mu[j] * c_[j + 1];
            b_[j] = (ys_[j + 1] - ys_[j]) / h[j] - h[j] * (c_[j + 1] + 2.0 * c_[j]) / 3.0;
            d_[j] = (c_[j + 1] - c_[j]) / (3.0 * h[j]);
        }
    }

    double eval(double x) const {
        const auto [i, dx] = locate(x);
        return ys_[i] + dx * (b_[i] + dx * (c_[i] + dx * d_[i]));
    }

    double derivative(double x) const {
        const auto [i, dx] = locate(x);
        return b_[i] + dx * (2.0 * c_[i] + 3.0 * dx * d_[i]);
    }

private:
    std::pair<std::size_t, double> locate(double x) const {
        const double lo = xs_.front(), hi = xs_.back();
        const double pad = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
        if (x < lo - pad || x > hi + pad) throw std::domain_error("CubicSpline: query outside knots");
        x = std::clamp(x, lo, hi);
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(std::distance(xs_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, xs_.size() - 1) - 1;
        return {i, x - xs_[i]};
    }

    std::vector<double> xs_, ys_, b_, c_, d_;
};

} // namespace sspatch
