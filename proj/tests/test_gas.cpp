#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sspatch/gas.hpp"

using namespace sspatch;

namespace {

const GasParams kAir = GasParams::create(1.4, 6.0);

// composite Simpson refined until two successive halvings agree; independent
// of the adaptive routine under test
double simpson_refined(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-12) {
    auto composite = [&](int n) {
        const double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    double prev = composite(4);
    for (int n = 8; n <= (1 << 22); n *= 2) {
        const double cur = composite(n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

TEST_CASE("angle conversion handles the sonic state") {
    // q_sonic = sqrt(kappa B0 / (kappa+1)) = 1 for gamma=1.4, B0=6
    const auto s = angles_from_velocity(1.0, 0.0, kAir);
    CHECK(s.varpi == Catch::Approx(1.0).margin(1e-14));
    CHECK(s.mach == Catch::Approx(1.0).margin(1e-14));
    CHECK(s.omega == Catch::Approx(M_PI / 2).margin(1e-7));
}

TEST_CASE("angle conversion reproduces hand-evaluated supersonic state") {
    const auto s = angles_from_velocity(1.3, 0.0, kAir);
    const double c_expected = std::sqrt(0.2 * (6.0 - 1.69));
    CHECK(c_expected == Catch::Approx(0.928440).margin(5e-7));
    CHECK(s.mach == Catch::Approx(1.400197).margin(5e-7));
    CHECK(s.mach == Catch::Approx(1.3 / c_expected).epsilon(1e-13));
    CHECK(s.theta == 0.0);
}

TEST_CASE("angle conversion is mirror symmetric") {
    const auto a = angles_from_velocity(1.2, 0.4, kAir);
    const auto b = angles_from_velocity(1.2, -0.4, kAir);
    CHECK(b.theta == Catch::Approx(-a.theta).epsilon(1e-14));
    CHECK(b.omega == Catch::Approx(a.omega).epsilon(1e-14));
}

TEST_CASE("angle conversion rejects bad states") {
    CHECK_THROWS_AS(angles_from_velocity(0.9, 0.0, kAir), std::domain_error); // subsonic
    CHECK_THROWS_AS(angles_from_velocity(2.5, 0.3, kAir), std::domain_error); // beyond q_max
    CHECK_THROWS_AS(angles_from_velocity(0.0, 0.0, kAir), std::domain_error);
}

TEST_CASE("velocity reconstruction at the sonic state") {
    const auto v = velocity_from_angles(0.0, 1.0, kAir);
    CHECK(v.c == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(v.u == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(v.v == Catch::Approx(0.0).margin(1e-15));
    CHECK_THROWS_AS(velocity_from_angles(0.0, 0.0, kAir), std::domain_error);
    CHECK_THROWS_AS(velocity_from_angles(0.0, 1.5, kAir), std::domain_error);
}

TEST_CASE("velocity reconstruction inverts the hand-evaluated state") {
    const auto s = angles_from_velocity(1.3, 0.0, kAir);
    const auto v = velocity_from_angles(s.theta, s.varpi, kAir);
    CHECK(v.u == Catch::Approx(1.3).epsilon(1e-12));
    CHECK(std::abs(v.v) < 1e-13);
}

TEST_CASE("conversions round-trip and preserve the energy relation") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> theta_d(-3.0, 3.0);
    std::uniform_real_distribution<double> mach_d(1.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double theta = theta_d(rng);
        const double varpi = 1.0 / mach_d(rng);
        const auto v = velocity_from_angles(theta, varpi, kAir);
        const double energy = v.q * v.q + 2.0 * v.c * v.c / (kAir.gamma - 1.0);
        CHECK(energy == Catch::Approx(kAir.bernoulli).epsilon(1e-12));
        const auto s = angles_from_velocity(v.u, v.v, kAir);
        CHECK(s.varpi == Catch::Approx(varpi).epsilon(1e-12));
        const double dtheta = std::remainder(s.theta - theta, 2.0 * M_PI);
        CHECK(std::abs(dtheta) < 1e-12);
    }
}

TEST_CASE("characteristic slopes at a 45-degree Mach angle") {
    // M = sqrt(2) gives omega = pi/4
    const auto st = angle_state(0.0, 1.0 / std::sqrt(2.0), kAir);
    const auto sl = characteristic_slopes(st);
    CHECK(sl.lambda_plus == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(sl.lambda_minus == Catch::Approx(-1.0).epsilon(1e-12));

    const auto v = velocity_from_angles(0.0, 1.0 / std::sqrt(2.0), kAir);
    const auto ev = eigenvalues_from_velocity(v);
    CHECK(ev.lambda_plus == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(ev.lambda_minus == Catch::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("characteristic families coincide at the sonic state") {
    const auto st = angle_state(0.7, 1.0, kAir);
    const auto sl = characteristic_slopes(st);
    REQUIRE_FALSE(sl.plus_vertical);
    REQUIRE_FALSE(sl.minus_vertical);
    CHECK(sl.lambda_plus == Catch::Approx(sl.lambda_minus).epsilon(1e-12));
}

TEST_CASE("vertical characteristics are tagged, not overflowed") {
    // theta + omega = pi/2 exactly
    const double omega = 0.6;
    const auto st = angle_state(M_PI / 2 - omega, std::sin(omega), kAir);
    const auto sl = characteristic_slopes(st);
    CHECK(sl.plus_vertical);
    CHECK_FALSE(sl.minus_vertical);
}

TEST_CASE("tangent and quotient eigenvalue routes agree on random states") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> theta_d(-3.1, 3.1);
    std::uniform_real_distribution<double> mach_d(1.001, 3.0);
    std::uniform_real_distribution<double> gamma_d(1.1, 2.0);
    std::uniform_real_distribution<double> b0_d(2.0, 10.0);
    int tested = 0;
    while (tested < 1000) {
        const auto gas = GasParams::create(gamma_d(rng), b0_d(rng));
        const auto st = angle_state(theta_d(rng), 1.0 / mach_d(rng), gas);
        if (std::abs(std::cos(st.alpha)) < 3e-2 || std::abs(std::cos(st.beta)) < 3e-2) continue;
        const auto v = velocity_from_angles(st.theta, st.varpi, gas);
        const auto tan_route = characteristic_slopes(st);
        const auto quot_route = eigenvalues_from_velocity(v);
        REQUIRE_FALSE(quot_route.plus_vertical);
        const double dp = std::abs(tan_route.lambda_plus - quot_route.lambda_plus) /
                          (1.0 + std::abs(quot_route.lambda_plus));
        const double dm = std::abs(tan_route.lambda_minus - quot_route.lambda_minus) /
                          (1.0 + std::abs(quot_route.lambda_minus));
        CHECK(dp < 1e-10);
        CHECK(dm < 1e-10);
        ++tested;
    }
}

TEST_CASE("degenerate-system coefficient") {
    CHECK(coefficient_f(0.0, kAir) == Catch::Approx(kAir.kappa + 1.0).epsilon(1e-15));
    CHECK(coefficient_f(0.5, kAir) == Catch::Approx(0.7125).epsilon(1e-15));
    CHECK_THROWS_AS(coefficient_f(1.0, kAir), std::domain_error);
    CHECK_THROWS_AS(coefficient_f(-0.1, kAir), std::domain_error);
}

TEST_CASE("characteristic slope in the hodograph plane") {
    CHECK(char_slope(0.0, kAir) == 0.0);
    CHECK(char_slope(0.5, kAir) == Catch::Approx(0.303868).margin(1e-6));
    CHECK(char_slope(0.5, kAir) ==
          Catch::Approx(std::sqrt(0.75) * 0.25 / 0.7125).epsilon(1e-15));
    CHECK_THROWS_AS(char_slope(1.0, kAir), std::domain_error);
}

TEST_CASE("slope bracket lambda/t^2 within the region") {
    const double t0 = 0.5;
    const double lo = 1.0 / (kAir.kappa + 1.0);
    const double hi = 1.0 / (kAir.kappa * std::sqrt(1.0 - t0 * t0));
    const double ratio = char_slope(0.5, kAir) / 0.25;
    CHECK(ratio == Catch::Approx(1.21547).margin(1e-5));
    CHECK(ratio >= lo);
    CHECK(ratio <= hi);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> kappa_d(0.05, 1.0);
    std::uniform_real_distribution<double> t0_d(0.1, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double kappa = kappa_d(rng);
        const auto gas = GasParams::create(1.0 + 2.0 * kappa, 6.0);
        const double tt0 = t0_d(rng);
        std::uniform_real_distribution<double> t_d(1e-6, tt0);
        const double t = t_d(rng);
        const double r = char_slope(t, gas) / (t * t);
        CHECK(r >= 1.0 / (kappa + 1.0) - 1e-12);
        CHECK(r <= 1.0 / (kappa * std::sqrt(1.0 - tt0 * tt0)) + 1e-12);
    }
}

TEST_CASE("integrated characteristic shift") {
    CHECK(char_shift(0.0, kAir) == 0.0);

    auto lambda = [&](double t) { return char_slope(t, kAir); };
    // the four-panel Simpson value quoted for this integrand
    auto simpson4 = [&]() {
        const double h = 0.125;
        return h / 3.0 *
               (lambda(0.0) + 4 * lambda(0.125) + 2 * lambda(0.25) + 4 * lambda(0.375) +
                lambda(0.5));
    }();
    CHECK(simpson4 == Catch::Approx(0.0434718).margin(1e-6));

    const double refined = simpson_refined(lambda, 0.0, 0.5);
    CHECK(refined == Catch::Approx(0.0434026531).margin(1e-9));
    CHECK(char_shift(0.5, kAir) == Catch::Approx(refined).margin(1e-10));

    CHECK(char_shift(0.35, kAir) < char_shift(0.40, kAir));
    CHECK(char_shift(0.40, kAir) < char_shift(0.41, kAir));
}

TEST_CASE("log-primitive of the Mach-angle variable") {
    CHECK(xi_of_varpi(1.0, kAir) == Catch::Approx(1.25 * std::log(1.0 / 1.2)).epsilon(1e-15));
    CHECK(xi_of_varpi(1.0, kAir) == Catch::Approx(-0.227902).margin(1e-6));
    CHECK_THROWS_AS(xi_of_varpi(0.0, kAir), std::domain_error);
    CHECK_THROWS_AS(xi_of_varpi(-0.2, kAir), std::domain_error);

    // strictly increasing
    double prev = xi_of_varpi(0.05, kAir);
    for (double w = 0.1; w <= 1.0; w += 0.05) {
        const double cur = xi_of_varpi(w, kAir);
        CHECK(cur > prev);
        prev = cur;
    }

    // derivative against a centered difference of the raw formula
    auto raw_xi = [&](double w) {
        return std::log(w * w / (kAir.kappa + w * w)) / (4.0 * kAir.kappa);
    };
    const double h = 1e-6;
    const double fd = (raw_xi(1.0 + h) - raw_xi(1.0 - h)) / (2.0 * h);
    CHECK(dxi_dvarpi(1.0, kAir) == Catch::Approx(1.0 / 2.4).epsilon(1e-14));
    CHECK(dxi_dvarpi(1.0, kAir) == Catch::Approx(fd).margin(1e-6));
}

TEST_CASE("gas parameter validation") {
    CHECK_THROWS_AS(GasParams::create(1.0, 6.0), std::domain_error);
    CHECK_THROWS_AS(GasParams::create(1.4, -1.0), std::domain_error);
    const auto g = GasParams::create(1.4, 6.0);
    CHECK(g.kappa == Catch::Approx(0.2).epsilon(1e-15));
}
