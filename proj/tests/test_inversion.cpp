#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sspatch/boundary.hpp"
#include "sspatch/inversion.hpp"
#include "sspatch/march.hpp"
#include "sspatch/verify.hpp"

using namespace sspatch;

namespace {

const GasParams kAir = GasParams::create(1.4, 6.0);

struct Solved {
    BoundaryTrace trace;
    RegionGeometry geom;
    HodographSolution sol;
    PhysicalPatch patch;

    explicit Solved(double dt) : trace(compute_trace(BoundarySpec::reference(), kAir)),
                                 geom(region_corners(trace, kAir)) {
        SolverParams params;
        params.dt = dt;
        params.t_min = dt;
        const CharMesh mesh = build_mesh(trace, geom, params);
        sol = march(mesh, trace, kAir, params);
        sol = close_sonic_line(std::move(sol), trace, kAir);
        patch = reconstruct(sol, trace, kAir);
        physical_gradients(sol, patch, kAir);
        extract_curves(sol, trace, patch);
    }
};

const Solved& solved_coarse() {
    static const Solved s(4e-3);
    return s;
}

const Solved& solved_fine() {
    static const Solved s(2e-3);
    return s;
}

double simpson_refined(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-12) {
    auto composite = [&](int n) {
        const double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    double prev = composite(4);
    for (int n = 8; n <= (1 << 20); n *= 2) {
        const double cur = composite(n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

TEST_CASE("trigonometric coefficients at the degenerate line") {
    const double theta1 = 0.9, r = 0.2;
    const FCoeffs f = f_coefficients(0.0, r, theta1);
    CHECK(f.f1 == Catch::Approx(-std::cos(theta1 - r)).epsilon(1e-15));
    CHECK(f.f2 == Catch::Approx(std::cos(theta1 - r)).epsilon(1e-15));
    CHECK(f.f3 == Catch::Approx(std::sin(theta1 - r)).epsilon(1e-15));
    CHECK(f.f4 == Catch::Approx(-std::sin(theta1 - r)).epsilon(1e-15));
    CHECK_THROWS_AS(f_coefficients(1.0, r, theta1), std::domain_error);
}

TEST_CASE("trigonometric coefficient identities") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t_d(0.0, 0.999);
    std::uniform_real_distribution<double> r_d(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double t = t_d(rng);
        const double r = r_d(rng);
        const FCoeffs f = f_coefficients(t, r, 0.785);
        CHECK(std::abs(f.f1 * f.f1 + f.f3 * f.f3 - 1.0) < 1e-14);
        CHECK(std::abs(f.f2 * f.f2 + f.f4 * f.f4 - 1.0) < 1e-14);
        CHECK(std::abs(f.f2 * f.f3 - f.f1 * f.f4 - 2.0 * t * std::sqrt(1.0 - t * t)) < 1e-14);
    }
}

TEST_CASE("reconstruction integrand vanishes at the sonic line") {
    const auto [gx, gy] = inversion_integrand(0.0, 0.1, 5.0, 0.785, kAir);
    CHECK(gx == 0.0);
    CHECK(gy == 0.0);
    // linear decay in t near the line
    const auto [gx1, gy1] = inversion_integrand(1e-4, 0.1, 5.0, 0.785, kAir);
    CHECK(std::abs(gx1) < 5e-4 * 5.0);
    CHECK(std::abs(gy1) < 5e-4 * 5.0);
}

TEST_CASE("one-segment trapezoid against refined quadrature") {
    // constant-coefficient segment: v_bar = 1, theta fixed at pi/4
    const double theta1 = M_PI / 4.0, r = 0.0;
    auto g = [&](double t) { return inversion_integrand(t, r, 1.0, theta1, kAir).first; };
    const double h = 0.1;
    const double trap = 0.5 * h * (g(0.5) + g(0.4));
    const double quad = simpson_refined(g, 0.4, 0.5);
    // truncation bound h^3/12 max|g''| with the second derivative sampled
    double max_g2 = 0.0;
    for (double t = 0.4; t <= 0.5; t += 0.005) {
        const double d = 1e-4;
        max_g2 = std::max(max_g2, std::abs(g(t + d) - 2.0 * g(t) + g(t - d)) / (d * d));
    }
    CHECK(std::abs(trap - quad) < 1.2 * h * h * h / 12.0 * max_g2);
    CHECK(std::abs(trap - quad) > 1e-12); // genuinely a trapezoid, not exact
}

TEST_CASE("characteristic feet reproduce the wall exactly") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        const Characteristic& ch = mesh.chars[j];
        if (!ch.foot_on_level) continue;
        const double x_direct = s.trace.x_of_r(ch.foot.r);
        CHECK(s.patch.x[j][0] == Catch::Approx(x_direct).margin(1e-12));
        CHECK(s.patch.y[j][0] ==
              Catch::Approx(s.trace.spec.phi(x_direct)).margin(1e-12));
    }
}

TEST_CASE("gradient magnitude identity holds at every node") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    double worst = 0.0;
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < mesh.t_levels.size(); ++k) {
            const std::size_t idx = k - first;
            const double t = mesh.t_levels[k];
            const double u = s.sol.value_u(j, k);
            const double v = s.sol.value_v(j, k);
            const double w = s.sol.w_quot[j][idx];
            const double lhs = s.patch.varpi_x[j][idx] * s.patch.varpi_x[j][idx] +
                               s.patch.varpi_y[j][idx] * s.patch.varpi_y[j][idx];
            const double kk = kAir.kappa + 1.0 - t * t;
            const double rhs = kk * kk / (u * u * v * v) *
                               ((u + v) * (u + v) + (1.0 - t * t) * w * w);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("gradient magnitude stays bounded away from zero and infinity") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        for (std::size_t idx = 0; idx < s.patch.varpi_x[j].size(); ++idx) {
            const double m2 = s.patch.varpi_x[j][idx] * s.patch.varpi_x[j][idx] +
                              s.patch.varpi_y[j][idx] * s.patch.varpi_y[j][idx];
            lo = std::min(lo, m2);
            hi = std::max(hi, m2);
        }
    }
    CHECK(lo > 1e-6);
    CHECK(hi < 1e6);
}

TEST_CASE("level-curve monotonicity quantity is negative and matches its closed form") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    for (std::size_t j = 0; j < mesh.chars.size(); j += 5) {
        const std::size_t first = mesh.chars[j].first_level;
        for (std::size_t k = first; k < mesh.t_levels.size(); k += 16) {
            const std::size_t idx = k - first;
            const double t = mesh.t_levels[k];
            const double u = s.sol.value_u(j, k);
            const double v = s.sol.value_v(j, k);
            const double ip = s.patch.inner_product[j][idx];
            const double closed = -4.0 * std::sqrt(1.0 - t * t) *
                                  (kAir.kappa + 1.0 - t * t) / (u * v);
            CHECK(ip < 0.0);
            CHECK(ip == Catch::Approx(closed).epsilon(1e-11));
        }
    }
    for (double ip : s.patch.sonic_inner_product) CHECK(ip < 0.0);
}

TEST_CASE("closed-form residual of the angle system is at rounding level") {
    const auto& s = solved_coarse();
    const ResidualReport rr = residual_euler(s.patch, s.sol, kAir);
    CHECK(rr.closed_plus_max < 1e-10);
    CHECK(rr.closed_minus_max < 1e-10);
}

TEST_CASE("discrete gradients agree with the closed form at first order") {
    const ResidualReport coarse = residual_euler(solved_coarse().patch, solved_coarse().sol, kAir);
    const ResidualReport fine = residual_euler(solved_fine().patch, solved_fine().sol, kAir);
    CHECK(coarse.gradient_check_max < 1e-2);
    CHECK(fine.gradient_check_max < coarse.gradient_check_max / 1.7);
    CHECK(fine.n_discrete > 0);
}

TEST_CASE("discrete angle-system residual converges") {
    const ResidualReport coarse = residual_euler(solved_coarse().patch, solved_coarse().sol, kAir);
    const ResidualReport fine = residual_euler(solved_fine().patch, solved_fine().sol, kAir);
    const double rc = std::max(coarse.discrete_plus_max, coarse.discrete_minus_max);
    const double rf = std::max(fine.discrete_plus_max, fine.discrete_minus_max);
    CHECK(rc < 1e-3);
    CHECK(rf < rc / 1.7);
}

TEST_CASE("sonic curve: unit Mach, decreasing flow angle, shared corner") {
    const auto& s = solved_coarse();
    REQUIRE(s.patch.pd.size() >= 16);
    CHECK(s.patch.pd.front().x == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.patch.pd.front().y == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.patch.pd.front().theta == Catch::Approx(M_PI / 4.0).epsilon(1e-12));
    for (std::size_t i = 0; i < s.patch.pd.size(); ++i) {
        CHECK(s.patch.pd[i].varpi == 1.0);
        if (i > 0) CHECK(s.patch.pd[i].theta < s.patch.pd[i - 1].theta);
        const double norm = std::hypot(s.patch.pd[i].tan_x, s.patch.pd[i].tan_y);
        CHECK(norm == Catch::Approx(1.0).epsilon(1e-12));
    }
    CHECK(s.patch.corner_d_x == Catch::Approx(s.patch.pd.back().x));
    CHECK(s.patch.corner_d_y == Catch::Approx(s.patch.pd.back().y));
}

TEST_CASE("interior nodes are strictly supersonic") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    for (std::size_t k = 0; k < mesh.t_levels.size(); ++k) {
        CHECK(s.patch.varpi_at(k) < 1.0);
    }
}

TEST_CASE("closing characteristic matches the minus-family slope") {
    const double coarse = de_slope_defect(solved_coarse().patch);
    const double fine = de_slope_defect(solved_fine().patch);
    CHECK(coarse < 5e-3);
    CHECK(fine < coarse / 1.7);
    // flow angle decreases from D to E along the curve
    const auto& de = solved_coarse().patch.de;
    for (std::size_t i = 1; i < de.size(); ++i) CHECK(de[i].theta < de[i - 1].theta);
}

TEST_CASE("Jacobian is positive and decays linearly towards the sonic line") {
    const auto& s = solved_coarse();
    const CharMesh& mesh = s.patch.mesh;
    for (std::size_t j = 0; j < mesh.chars.size(); ++j) {
        for (double v : s.patch.jac[j]) CHECK(v > 0.0);
    }
    // along the far-corner characteristic, j/t approaches a positive limit
    const std::size_t last = mesh.t_levels.size() - 1;
    const double ratio_last = s.patch.jac[0][last] / mesh.t_levels[last];
    const double ratio_mid = s.patch.jac[0][last / 2] / mesh.t_levels[last / 2];
    CHECK(ratio_last > 0.0);
    CHECK(ratio_last / ratio_mid > 0.25);
    CHECK(ratio_last / ratio_mid < 4.0);
}

TEST_CASE("invariant gate passes on the reference run") {
    const auto& s = solved_coarse();
    const InvariantReport rep = check_invariants(s.patch, s.sol, s.trace);
    CHECK(rep.ok);
    CHECK(rep.min_jacobian > 0.0);
    CHECK(rep.max_inner_product < 0.0);
    CHECK(rep.max_pe_error < 1e-12);
}

TEST_CASE("reconstruction requires a closed solution") {
    const auto& s = solved_coarse();
    SolverParams params;
    params.dt = 8e-3;
    params.t_min = 8e-3;
    const CharMesh mesh = build_mesh(s.trace, s.geom, params);
    const HodographSolution open_sol = march(mesh, s.trace, kAir, params);
    CHECK_THROWS_AS(reconstruct(open_sol, s.trace, kAir), SolverError);
}
