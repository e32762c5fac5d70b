#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sspatch/holder.hpp"
#include "sspatch/oracle.hpp"
#include "sspatch/verify.hpp"

using namespace sspatch;

TEST_CASE("exact hodograph family satisfies the flow equations") {
    const RinglebFlow flow;
    const OracleField field = flow.sample_supersonic(1000, 4242);
    REQUIRE(field.samples.size() == 1000);
    const OracleSelfCheck chk = oracle_self_check(field);
    CHECK(chk.max_euler_residual < 1e-10);
    CHECK(chk.max_bernoulli_residual < 1e-10);
    CHECK(chk.max_irrotational < 1e-10);
}

TEST_CASE("radial source flow satisfies the flow equations") {
    const RadialSourceFlow flow(GasParams::create(1.4, 6.0));
    const OracleField field = flow.sample_supersonic(1000, 7);
    const OracleSelfCheck chk = oracle_self_check(field);
    CHECK(chk.max_euler_residual < 1e-10);
    CHECK(chk.max_bernoulli_residual < 1e-10);
    CHECK(chk.max_irrotational < 1e-10);

    // sonic locus maps to varpi = 1
    const double q_star = flow.gas().q_sonic();
    const double c_star = std::sqrt(flow.gas().kappa *
                                    (flow.gas().bernoulli - q_star * q_star));
    CHECK(c_star / q_star == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("angle-system residuals vanish on exact fields in both routes") {
    const RinglebFlow ringleb;
    const AngleResiduals ra = angle_residuals(ringleb.sample_supersonic(1000, 99));
    CHECK(ra.used == 1000);
    CHECK(ra.max_plus < 1e-8);
    CHECK(ra.max_minus < 1e-8);
    CHECK(ra.max_velocity_plus < 1e-8);
    CHECK(ra.max_velocity_minus < 1e-8);

    const RadialSourceFlow source(GasParams::create(1.4, 6.0));
    const AngleResiduals rs = angle_residuals(source.sample_supersonic(1000, 100));
    CHECK(rs.max_plus < 1e-8);
    CHECK(rs.max_minus < 1e-8);
    CHECK(rs.max_velocity_plus < 1e-8);
    CHECK(rs.max_velocity_minus < 1e-8);
}

TEST_CASE("subsonic oracle samples are skipped with a count") {
    const RadialSourceFlow flow(GasParams::create(1.4, 6.0));
    OracleField field = flow.sample_supersonic(64, 5);
    // splice in fake subsonic samples (q < c)
    for (int i = 0; i < 8; ++i) {
        OracleSample s;
        s.u = 0.3;
        s.v = 0.0;
        s.c = 1.0;
        field.samples.push_back(s);
    }
    const AngleResiduals res = angle_residuals(field);
    CHECK(res.used == 64);
    CHECK(res.skipped_subsonic == 8);
}

TEST_CASE("commutator defect shrinks at second order") {
    const RadialSourceFlow flow(GasParams::create(1.4, 6.0));
    const double d1 = commutator_residual(flow, 1.9, 1.1, 4e-3);
    const double d2 = commutator_residual(flow, 1.9, 1.1, 2e-3);
    const double d3 = commutator_residual(flow, 1.9, 1.1, 1e-3);
    CHECK(d1 / d2 == Catch::Approx(4.0).margin(0.8));
    CHECK(d2 / d3 == Catch::Approx(4.0).margin(0.8));
}

TEST_CASE("Holder fit recovers smooth data") {
    std::vector<double> pos, val;
    for (int i = 0; i <= 1024; ++i) {
        const double p = i / 1024.0;
        pos.push_back(p);
        val.push_back(0.7 + 2.5 * p);
    }
    const HolderFit fit = holder_fit(pos, val);
    REQUIRE(fit.ok);
    CHECK(fit.exponent == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("Holder fit recovers a cube-root modulus") {
    std::vector<double> pos, val;
    for (int i = 0; i <= 1024; ++i) {
        const double p = i / 1024.0;
        pos.push_back(p);
        val.push_back(std::cbrt(p));
    }
    const HolderFit fit = holder_fit(pos, val);
    REQUIRE(fit.ok);
    CHECK(fit.exponent == Catch::Approx(1.0 / 3.0).margin(0.01));
}

TEST_CASE("Holder fit reports degenerate input") {
    std::vector<double> pos, val;
    for (int i = 0; i < 32; ++i) {
        pos.push_back(i / 31.0);
        val.push_back(1.0);
    }
    const HolderFit fit = holder_fit(pos, val);
    CHECK_FALSE(fit.ok);
    CHECK_FALSE(fit.message.empty());

    // and too-few samples
    const HolderFit tiny = holder_fit({0.0, 1.0}, {0.0, 1.0});
    CHECK_FALSE(tiny.ok);
}

TEST_CASE("end-to-end convergence study passes on the reference problem") {
    SolverParams base;
    base.dt = 4e-3;
    base.t_min = 4e-3;
    const ConvergenceTable table =
        convergence_study(BoundarySpec::reference(), GasParams::create(1.4, 6.0), base, 3);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.order_residual >= 1.0);
    CHECK(table.order_de >= 1.0);
    CHECK(table.order_closure >= 1.0);
    CHECK(table.max_pe_error < 1e-12);
    CHECK(table.monotone);
    CHECK(table.pass);
}

TEST_CASE("convergence study rejects too few levels") {
    SolverParams base;
    CHECK_THROWS_AS(
        convergence_study(BoundarySpec::reference(), GasParams::create(1.4, 6.0), base, 2),
        SolverError);
}
