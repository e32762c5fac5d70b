#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sspatch/config.hpp"
#include "sspatch/diagnostics.hpp"
#include "sspatch/inversion.hpp"
#include "sspatch/io.hpp"
#include "sspatch/march.hpp"
#include "sspatch/oracle.hpp"
#include "sspatch/verify.hpp"

namespace sspatch {

/// Exit-code contract shared by the command handlers.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitAdmissibility = 2,
    kExitSolver = 3,
    kExitInvariant = 4,
};

struct PipelineResult {
    int exit_code = kExitOk;
    std::vector<std::string> log;

    void say(std::string line) { log.push_back(std::move(line)); }
};

/// In-memory artifacts of a solve, reused by verify/converge and the tests.
struct SolveArtifacts {
    BoundaryTrace trace;
    RegionGeometry geom;
    HodographSolution sol;
    PhysicalPatch patch;
    DiagnosticsReport diag;
    InvariantReport invariants;
    ResidualReport residuals;
};

/// check: admissibility report only.
inline PipelineResult run_check(const RunConfig& cfg) {
    PipelineResult res;
    const GasParams gas = cfg.gas_params();
    const BoundarySpec spec = cfg.boundary_spec();
    const AdmissibilityReport rep = check_admissibility(spec, gas);
    if (cfg.write_json) {
        write_text_file(std::filesystem::path(cfg.out_dir) / "admissibility.json",
                        admissibility_json(rep).dump(2) + "\n");
    }
    res.say(std::string("admissibility: ") + (rep.pass ? "pass" : ("fail (" + rep.first_failure + ")")));
    res.say("  sign-condition max = " + std::to_string(rep.max_sign_condition));
    res.say("  space-like margin min = " + std::to_string(rep.min_spacelike_margin));
    res.exit_code = rep.pass ? kExitOk : kExitAdmissibility;
    return res;
}

/// solve: full pipeline, artifacts returned and optionally serialized.
inline PipelineResult run_solve(const RunConfig& cfg, SolveArtifacts* out = nullptr) {
    PipelineResult res;
    const GasParams gas = cfg.gas_params();
    const BoundarySpec spec = cfg.boundary_spec();

    const AdmissibilityReport adm = check_admissibility(spec, gas);
    if (!adm.pass) {
        res.say("admissibility: fail (" + adm.first_failure + ")");
        res.exit_code = kExitAdmissibility;
        return res;
    }

    SolveArtifacts local;
    SolveArtifacts& art = out ? *out : local;
    try {
        art.trace = compute_trace(spec, gas);
        art.geom = region_corners(art.trace, gas);
        const CharMesh mesh = build_mesh(art.trace, art.geom, cfg.solver);
        art.sol = march(mesh, art.trace, gas, cfg.solver);
        art.sol = close_sonic_line(std::move(art.sol), art.trace, gas);
        art.patch = reconstruct(art.sol, art.trace, gas);
        physical_gradients(art.sol, art.patch, gas);
        extract_curves(art.sol, art.trace, art.patch);
    } catch (const BoundaryError& e) {
        res.say(std::string("solver: ") + e.what());
        res.exit_code = kExitSolver;
        return res;
    } catch (const SolverError& e) {
        res.say(std::string("solver: ") + e.what());
        res.exit_code = kExitSolver;
        return res;
    }

    if (cfg.inject_fault == "jacobian-sign") {
        // test hook: corrupt the Jacobian field so the invariant gate trips
        for (auto& column : art.patch.jac) {
            for (double& v : column) v = -v;
        }
    }

    art.diag = diagnostics(art.sol, art.trace, gas);
    art.invariants = check_invariants(art.patch, art.sol, art.trace);
    art.residuals = residual_euler(art.patch, art.sol, gas);

    const std::string hash = hash_hex(fnv1a64(cfg.canonical_string()));
    if (cfg.write_csv) {
        const std::filesystem::path dir(cfg.out_dir);
        write_text_file(dir / "nodes.csv", nodes_csv(art.sol, art.patch, hash));
        write_text_file(dir / "pe.csv", curve_csv(art.patch.pe, hash, false));
        write_text_file(dir / "pd.csv", curve_csv(art.patch.pd, hash, true));
        write_text_file(dir / "de.csv", curve_csv(art.patch.de, hash, false));
    }
    if (cfg.write_json) {
        nlohmann::ordered_json j = diagnostics_json(art.diag, hash);
        j["residuals"] = residual_json(art.residuals);
        j["invariants"] = {{"ok", art.invariants.ok},
                           {"failures", art.invariants.failures},
                           {"min_jacobian", art.invariants.min_jacobian},
                           {"max_inner_product", art.invariants.max_inner_product},
                           {"max_pe_error", art.invariants.max_pe_error}};
        j["corner_d"] = {{"x", art.patch.corner_d_x}, {"y", art.patch.corner_d_y}};
        write_text_file(std::filesystem::path(cfg.out_dir) / "diagnostics.json",
                        j.dump(2) + "\n");
    }

    res.say("solved: " + std::to_string(art.sol.mesh.n_nodes()) + " nodes, " +
            std::to_string(art.sol.mesh.chars.size()) + " characteristics");
    res.say("  corner D = (" + std::to_string(art.patch.corner_d_x) + ", " +
            std::to_string(art.patch.corner_d_y) + ")");
    res.say("  sonic samples = " + std::to_string(art.sol.sonic_r.size()));
    for (const auto& w : art.diag.warnings) res.say("  warning: " + w);
    if (!art.invariants.ok) {
        for (const auto& f : art.invariants.failures) res.say("  invariant: " + f);
        res.exit_code = kExitInvariant;
        return res;
    }
    res.exit_code = kExitOk;
    return res;
}

/// verify: oracle residuals, solver-independent checks, then a solve with
/// Holder and residual reports.
inline PipelineResult run_verify(const RunConfig& cfg) {
    PipelineResult res;
    bool ok = true;
    nlohmann::ordered_json report;
    const std::string hash = hash_hex(fnv1a64(cfg.canonical_string()));
    report["config_hash"] = hash;

    auto enabled = [&](const std::string& name) {
        for (const auto& c : cfg.checks) {
            if (c == name) return true;
        }
        return false;
    };

    if (enabled("oracle")) {
        const RinglebFlow ringleb;
        const OracleField rf = ringleb.sample_supersonic(1000, cfg.seed);
        const OracleSelfCheck rs = oracle_self_check(rf);
        const AngleResiduals ra = angle_residuals(rf);

        const RadialSourceFlow source(cfg.gas_params());
        const OracleField sf = source.sample_supersonic(1000, cfg.seed + 1);
        const OracleSelfCheck ss = oracle_self_check(sf);
        const AngleResiduals sa = angle_residuals(sf);

        const double c1 = commutator_residual(source, 1.9, 1.1, 2e-3);
        const double c2 = commutator_residual(source, 1.9, 1.1, 1e-3);

        const bool oracle_ok = rs.max_euler_residual < 1e-10 && rs.max_bernoulli_residual < 1e-10 &&
                               rs.max_irrotational < 1e-10 && ra.max_plus < 1e-8 &&
                               ra.max_minus < 1e-8 && ss.max_euler_residual < 1e-10 &&
                               sa.max_plus < 1e-8 && sa.max_minus < 1e-8 &&
                               c2 < 0.5 * c1 + 1e-14;
        ok = ok && oracle_ok;
        report["oracle"] = {
            {"ringleb",
             {{"euler", rs.max_euler_residual},
              {"bernoulli", rs.max_bernoulli_residual},
              {"irrotational", rs.max_irrotational},
              {"angle_plus", ra.max_plus},
              {"angle_minus", ra.max_minus},
              {"velocity_plus", ra.max_velocity_plus},
              {"velocity_minus", ra.max_velocity_minus},
              {"samples", ra.used}}},
            {"radial_source",
             {{"euler", ss.max_euler_residual},
              {"bernoulli", ss.max_bernoulli_residual},
              {"irrotational", ss.max_irrotational},
              {"angle_plus", sa.max_plus},
              {"angle_minus", sa.max_minus}}},
            {"commutator", {{"h_2e-3", c1}, {"h_1e-3", c2}}},
            {"pass", oracle_ok}};
        res.say(std::string("oracle checks: ") + (oracle_ok ? "pass" : "fail"));
    }

    if (enabled("residual") || enabled("holder")) {
        RunConfig solve_cfg = cfg;
        solve_cfg.write_csv = solve_cfg.write_json = false;
        SolveArtifacts art;
        PipelineResult solve_res = run_solve(solve_cfg, &art);
        for (auto& line : solve_res.log) res.say(line);
        if (solve_res.exit_code != kExitOk) {
            res.exit_code = solve_res.exit_code;
            return res;
        }

        if (enabled("residual")) {
            const bool resid_ok = art.residuals.closed_plus_max < 1e-10 &&
                                  art.residuals.closed_minus_max < 1e-10;
            ok = ok && resid_ok;
            report["residuals"] = residual_json(art.residuals);
            report["residuals"]["pass"] = resid_ok;
            res.say(std::string("closed-form residuals: ") + (resid_ok ? "pass" : "fail"));
        }

        if (enabled("holder")) {
            // hodograph trace along the degenerate line
            const HolderFit hodo = art.diag.holder_u0;
            // physical gradient trace across the sonic curve, sampled along
            // the far-corner characteristic against arc distance
            std::vector<double> dist, gval_tx, gval_wx;
            const auto& mesh = art.sol.mesh;
            const double x0 = art.patch.sonic_x.back();
            const double y0 = art.patch.sonic_y.back();
            for (std::size_t k = mesh.t_levels.size(); k-- > 0;) {
                dist.push_back(std::hypot(art.patch.x[0][k] - x0, art.patch.y[0][k] - y0));
                gval_tx.push_back(art.patch.theta_x[0][k]);
                gval_wx.push_back(art.patch.varpi_x[0][k]);
            }
            dist.push_back(0.0);
            gval_tx.push_back(art.patch.sonic_theta_x.back());
            gval_wx.push_back(art.patch.sonic_varpi_x.back());
            const HolderFit phys_tx = holder_fit(dist, gval_tx);
            const HolderFit phys_wx = holder_fit(dist, gval_wx);
            const bool holder_ok = hodo.ok && hodo.exponent >= 0.30 && phys_tx.ok &&
                                   phys_tx.exponent >= 0.11 && phys_wx.ok &&
                                   phys_wx.exponent >= 0.11;
            ok = ok && holder_ok;
            report["holder"] = {{"hodograph_u0", holder_json(hodo)},
                                {"hodograph_w0", holder_json(art.diag.holder_w0)},
                                {"physical_theta_x", holder_json(phys_tx)},
                                {"physical_varpi_x", holder_json(phys_wx)},
                                {"pass", holder_ok}};
            res.say(std::string("holder fits: ") + (holder_ok ? "pass" : "fail"));
        }
    }

    report["pass"] = ok;
    if (cfg.write_json) {
        write_text_file(std::filesystem::path(cfg.out_dir) / "verify_report.json",
                        report.dump(2) + "\n");
    }
    res.exit_code = ok ? kExitOk : kExitInvariant;
    return res;
}

/// converge: refinement study with fitted orders.
inline PipelineResult run_converge(const RunConfig& cfg) {
    PipelineResult res;
    const GasParams gas = cfg.gas_params();
    const BoundarySpec spec = cfg.boundary_spec();
    const AdmissibilityReport adm = check_admissibility(spec, gas);
    if (!adm.pass) {
        res.say("admissibility: fail (" + adm.first_failure + ")");
        res.exit_code = kExitAdmissibility;
        return res;
    }
    ConvergenceTable table;
    try {
        table = convergence_study(spec, gas, cfg.solver, cfg.refinement_levels);
    } catch (const SolverError& e) {
        res.say(std::string("solver: ") + e.what());
        res.exit_code = kExitSolver;
        return res;
    }
    const std::string hash = hash_hex(fnv1a64(cfg.canonical_string()));
    if (cfg.write_json) {
        nlohmann::ordered_json j = convergence_json(table);
        j["config_hash"] = hash;
        write_text_file(std::filesystem::path(cfg.out_dir) / "convergence.json",
                        j.dump(2) + "\n");
    }
    for (const auto& row : table.rows) {
        res.say("dt=" + std::to_string(row.dt) + "  residual=" + std::to_string(row.residual_max) +
                "  de_defect=" + std::to_string(row.de_defect) +
                "  closure=" + std::to_string(row.closure_defect));
    }
    res.say("orders: residual=" + std::to_string(table.order_residual) +
            " de=" + std::to_string(table.order_de) +
            " closure=" + std::to_string(table.order_closure));
    res.say(std::string("convergence: ") + (table.pass ? "pass" : "fail"));
    res.exit_code = table.pass ? kExitOk : kExitInvariant;
    return res;
}

} // namespace sspatch
