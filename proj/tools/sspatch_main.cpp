// Command-line front end: check | solve | verify | converge.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sspatch/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    double dt = -1.0;
    double t_min = -1.0;
    std::string out_dir;
    long long seed = -1;
    int refine = -1;
    std::string inject_fault;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "TOML config file (defaults apply when omitted)");
    cmd->add_option("--dt", opts.dt, "override solver level spacing");
    cmd->add_option("--t-min", opts.t_min, "override last marched level");
    cmd->add_option("--out", opts.out_dir, "override output directory");
    cmd->add_option("--seed", opts.seed, "override sampling seed");
    cmd->add_option("--refine", opts.refine, "override refinement levels (converge)");
    cmd->add_option("--inject-fault", opts.inject_fault, "test hook: none | jacobian-sign")
        ->group(""); // hidden
}

sspatch::RunConfig resolve(const CommonOpts& opts) {
    sspatch::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = sspatch::load_config(opts.config_path);
    if (opts.dt > 0.0) cfg.solver.dt = opts.dt;
    if (opts.t_min > 0.0) cfg.solver.t_min = opts.t_min;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.refine > 0) cfg.refinement_levels = opts.refine;
    if (!opts.inject_fault.empty() && opts.inject_fault != "none") {
        cfg.inject_fault = opts.inject_fault;
    }
    return cfg;
}

int emit(const sspatch::PipelineResult& res) {
    for (const auto& line : res.log) std::printf("%s\n", line.c_str());
    std::printf("exit: %d\n", res.exit_code);
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"supersonic-sonic patch solver"};
    app.require_subcommand(1);

    CommonOpts check_opts, solve_opts, verify_opts, converge_opts;
    CLI::App* cmd_check = app.add_subcommand("check", "boundary admissibility report");
    add_common(cmd_check, check_opts);
    CLI::App* cmd_solve = app.add_subcommand("solve", "march, invert, and serialize the patch");
    add_common(cmd_solve, solve_opts);
    CLI::App* cmd_verify = app.add_subcommand("verify", "oracle, residual, and regularity checks");
    add_common(cmd_verify, verify_opts);
    CLI::App* cmd_converge = app.add_subcommand("converge", "refinement study with fitted orders");
    add_common(cmd_converge, converge_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_check->parsed()) return emit(sspatch::run_check(resolve(check_opts)));
        if (cmd_solve->parsed()) return emit(sspatch::run_solve(resolve(solve_opts)));
        if (cmd_verify->parsed()) return emit(sspatch::run_verify(resolve(verify_opts)));
        if (cmd_converge->parsed()) return emit(sspatch::run_converge(resolve(converge_opts)));
    } catch (const sspatch::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return sspatch::kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return sspatch::kExitSolver;
    }
    return sspatch::kExitConfig;
}
