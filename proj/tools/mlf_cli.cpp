// mlf: coupled Biot / poroelastic-plate / Stokes simulator and verification
// driver. Subcommands: simulate, resolvent, infsup, coercivity, mms,
// vk-verify. Exit code 0 iff all enabled checks pass their tolerances.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "mlf/config.hpp"
#include "mlf/io.hpp"
#include "mlf/verification.hpp"

namespace fs = std::filesystem;
using namespace mlf;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int threads = 0;
    double dt = -1;
    int steps = -1;
    int n_plane = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file (JSON)");
    cmd->add_option("--out-dir", o.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", o.seed, "initial-condition seed (overrides config)");
    cmd->add_option("--threads", o.threads,
                    "0 = deterministic single-threaded (default); other values are accepted "
                    "and currently run the same deterministic path");
    cmd->add_option("--dt", o.dt, "time step (overrides config)");
    cmd->add_option("--steps", o.steps, "step count (overrides config)");
    cmd->add_option("--n-plane", o.n_plane, "in-plane cell count (overrides config)");
}

Config load_config(const CommonOpts& o) {
    Config c = o.config_path.empty() ? Config{} : parse_config(o.config_path);
    if (o.seed >= 0) c.ic.seed = static_cast<std::uint64_t>(o.seed);
    if (o.dt > 0) c.run.dt = o.dt;
    if (o.steps > 0) c.run.steps = o.steps;
    if (o.n_plane > 0) c.mesh.n_plane = o.n_plane;
    if (!o.out_dir.empty()) c.output.directory = o.out_dir;
    c.validate();
    return c;
}

bool wants_vtk(const Config& c) {
    for (const auto& f : c.output.formats)
        if (f == "vtk") return true;
    return false;
}

int report_checks(const std::vector<CheckResult>& checks, const std::string& json_path) {
    bool all = true;
    for (const auto& c : checks) {
        std::printf("%-36s value=%-14.6g tol=%-10.3g %s\n", c.name.c_str(), c.value,
                    c.tolerance, c.pass ? "PASS" : "FAIL");
        all = all && c.pass;
    }
    if (!json_path.empty()) write_checks_json(checks, json_path);
    return all ? 0 : 1;
}

int cmd_simulate(const CommonOpts& opts, bool nonlinear_flag) {
    Config cfg = load_config(opts);
    if (nonlinear_flag) cfg.run.nonlinear = true;
    fs::create_directories(cfg.output.directory);

    const MultilayerMesh mesh =
        build_mesh(cfg.mesh.n_plane, cfg.mesh.nz_b, cfg.mesh.nz_f, cfg.mesh.ns_p, cfg.mesh.h_p);
    const DofLayout layout = build_dof_layout(mesh);
    const Forms forms(mesh, layout, cfg.params);
    StateVector state = build_initial_state(forms, cfg.ic);

    std::vector<EnergyReport> reports;
    const bool vtk = wants_vtk(cfg);
    const int stride = cfg.output.snapshot_stride;
    const auto maybe_snapshot = [&](const StateVector& st, int step) {
        if (!vtk || stride <= 0 || step % stride != 0) return;
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%06d", step);
        write_vtk_snapshot(st, layout, (fs::path(cfg.output.directory) / name).string());
    };
    maybe_snapshot(state, 0);

    double e_prev = forms.energy(state.disp, state.vel);
    double max_rel = 0, max_constraint = 0;
    bool monotone = true;
    double pi_prev = 0;
    bool vk_monotone = true;

    if (cfg.run.nonlinear) {
        VkConfig vkc;
        vkc.picard_tol = cfg.run.picard_tol;
        vkc.picard_max_iter = cfg.run.picard_max_iter;
        NonlinearStepper stepper(forms, cfg.run.dt, vkc);
        pi_prev = stepper.vk().potential(stepper.vk().w_block(state), vkc);
        for (int k = 1; k <= cfg.run.steps; ++k) {
            auto [s1, rep] = stepper.step(state);
            max_rel = std::max(max_rel, rep.relative_residual(e_prev));
            max_constraint = std::max(max_constraint, rep.constraint_norm);
            if (rep.E + rep.Pi > e_prev + pi_prev + 1e-6) vk_monotone = false;
            e_prev = rep.E;
            pi_prev = rep.Pi;
            reports.push_back(rep);
            state = std::move(s1);
            maybe_snapshot(state, k);
        }
    } else {
        Stepper stepper(forms, cfg.run.dt);
        for (int k = 1; k <= cfg.run.steps; ++k) {
            auto [s1, rep] = stepper.step(state);
            max_rel = std::max(max_rel, rep.relative_residual(e_prev));
            max_constraint = std::max(max_constraint, rep.constraint_norm);
            if (rep.E > e_prev) monotone = false;
            e_prev = rep.E;
            reports.push_back(rep);
            state = std::move(s1);
            maybe_snapshot(state, k);
        }
    }

    const std::string csv = (fs::path(cfg.output.directory) / "energy.csv").string();
    write_energy_csv(reports, csv);
    std::printf("wrote %s (%zu steps)\n", csv.c_str(), reports.size());

    std::vector<CheckResult> checks;
    checks.push_back({"energy_identity_max_rel_residual", max_rel, 1e-8, max_rel <= 1e-8, ""});
    checks.push_back(
        {"constraint_norm_max", max_constraint, 1e-10, max_constraint <= 1e-10, ""});
    if (cfg.run.nonlinear)
        checks.push_back({"energy_plus_potential_monotone", vk_monotone ? 1.0 : 0.0, 1.0,
                          vk_monotone, ""});
    else
        checks.push_back({"energy_monotone", monotone ? 1.0 : 0.0, 1.0, monotone, ""});
    return report_checks(checks,
                         (fs::path(cfg.output.directory) / "simulate_summary.json").string());
}

int cmd_resolvent(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    fs::create_directories(cfg.output.directory);
    const MultilayerMesh mesh =
        build_mesh(cfg.mesh.n_plane, cfg.mesh.nz_b, cfg.mesh.nz_f, cfg.mesh.ns_p, cfg.mesh.h_p);
    const DofLayout layout = build_dof_layout(mesh);
    const Forms forms(mesh, layout, cfg.params);

    const CheckResult c = check_contraction(forms, 20, cfg.ic.seed);
    std::printf("max ||y||_X / ||F||_X over 20 random data vectors: %.12f\n", c.value);
    return report_checks({c},
                         (fs::path(cfg.output.directory) / "resolvent_summary.json").string());
}

int cmd_infsup(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    fs::create_directories(cfg.output.directory);
    const InfSupReport rep = run_infsup({2, 4, 8}, cfg.params, cfg.mesh.h_p);
    std::printf("%8s %20s %20s\n", "n_plane", "beta_taylor_hood", "beta_equal_order");
    for (const auto& r : rep.rows)
        std::printf("%8d %20.12f %20.12f\n", r.n_plane, r.beta_taylor_hood, r.beta_equal_order);
    return report_checks(rep.checks,
                         (fs::path(cfg.output.directory) / "infsup_summary.json").string());
}

int cmd_coercivity(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    fs::create_directories(cfg.output.directory);
    const auto rows = run_coercivity({2, 4, 8}, cfg.params, cfg.mesh.h_p);
    std::printf("%8s %20s\n", "n_plane", "lambda_min(sym A, G)");
    std::vector<CheckResult> checks;
    for (const auto& r : rows) {
        std::printf("%8d %20.12f\n", r.n_plane, r.lambda_min);
        checks.push_back({"coercivity_n" + std::to_string(r.n_plane), r.lambda_min, 0.0,
                          r.lambda_min > 0.0, ""});
    }
    return report_checks(checks,
                         (fs::path(cfg.output.directory) / "coercivity_summary.json").string());
}

int cmd_mms(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    fs::create_directories(cfg.output.directory);
    const MmsReport rep = run_mms({2, 4, 8}, cfg.params, cfg.mesh.h_p);
    std::printf("%8s %12s %12s %12s %12s %12s\n", "n_plane", "eta", "p_b", "w", "p_p", "u");
    for (const auto& r : rep.rows)
        std::printf("%8d %12.4e %12.4e %12.4e %12.4e %12.4e\n", r.n_plane, r.eta, r.pb, r.w,
                    r.pp, r.u);
    std::printf("observed orders: eta %.2f, p_b %.2f, w %.2f, p_p %.2f, u %.2f\n",
                rep.order_eta, rep.order_pb, rep.order_w, rep.order_pp, rep.order_u);
    return report_checks(rep.checks,
                         (fs::path(cfg.output.directory) / "mms_summary.json").string());
}

int cmd_vk_verify(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    fs::create_directories(cfg.output.directory);
    const auto checks = run_vk_checks(cfg.ic.seed == 0 ? 2024 : cfg.ic.seed);
    return report_checks(checks,
                         (fs::path(cfg.output.directory) / "vk_verify_summary.json").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multilayer filtration simulator (Biot / poroelastic plate / Stokes)"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool nonlinear_flag = false;

    CLI::App* sim = app.add_subcommand("simulate", "linear run with energy audit");
    add_common(sim, opts);
    sim->add_flag("--nonlinear", nonlinear_flag, "enable the nonlinear plate force");

    CLI::App* res = app.add_subcommand("resolvent", "contraction check of the resolvent solve");
    add_common(res, opts);
    CLI::App* inf = app.add_subcommand("infsup", "inf-sup refinement sweep");
    add_common(inf, opts);
    CLI::App* coe = app.add_subcommand("coercivity", "ellipticity probe sweep");
    add_common(coe, opts);
    CLI::App* mms = app.add_subcommand("mms", "manufactured-solution convergence table");
    add_common(mms, opts);
    CLI::App* vkv = app.add_subcommand("vk-verify", "nonlinear plate verification suite");
    add_common(vkv, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opts, nonlinear_flag);
        if (res->parsed()) return cmd_resolvent(opts);
        if (inf->parsed()) return cmd_infsup(opts);
        if (coe->parsed()) return cmd_coercivity(opts);
        if (mms->parsed()) return cmd_mms(opts);
        if (vkv->parsed()) return cmd_vk_verify(opts);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
