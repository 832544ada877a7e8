#include "homog/harness.hpp"

#include "homog/discretize.hpp"
#include "homog/limit.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace homog;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    int workers = 0; // 0 keeps the config value
    std::string seed_list;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment configuration file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--workers", args.workers, "worker thread count override");
    cmd->add_option("--seed-list", args.seed_list,
                    "comma or space separated seed override");
}

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = parse_config_file(args.config_path);
    if (args.workers > 0) cfg.workers = args.workers;
    if (!args.seed_list.empty()) {
        std::string cleaned = args.seed_list;
        for (char& c : cleaned)
            if (c == ',') c = ' ';
        std::istringstream ss(cleaned);
        std::uint64_t s;
        cfg.seeds.clear();
        while (ss >> s) cfg.seeds.push_back(s);
        cfg.validate();
    }
    return cfg;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    return out;
}

std::filesystem::path prepare_out(const CommonArgs& args) {
    std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_dump_env(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const SampledEnvironment env = sample_environment(cfg.env, cfg.seeds.front());
    const int d = cfg.env.dimension;
    const int n = 256;
    const double P = cfg.env.period;
    auto out = open_out(dir / "env.csv");
    out << "x0,x1,mu,b0,b1\n";
    const int n1 = d == 2 ? n : 1;
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n; ++i) {
            const std::array<double, 2> x = {i * P / n, j * P / n};
            const auto b = cfg.env.drift_amplitude != 0.0
                               ? drift_at(env, x)
                               : std::array<double, 2>{0.0, 0.0};
            out << sci(x[0]) << ',' << sci(x[1]) << ',' << sci(mu_at(env, x)) << ','
                << sci(b[0]) << ',' << sci(b[1]) << '\n';
        }
    std::cout << "wrote " << (dir / "env.csv").string() << "\n";
    return 0;
}

int cmd_solve(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const Grid grid = cfg.make_grid();
    const GridFunction f = make_bump(grid, cfg.f_center, cfg.f_radius, cfg.f_amplitude);
    auto diag_out = open_out(dir / "solve_diagnostics.csv");
    diag_out << "eps,seed,stages,residual,energy,l2_norm,apriori_ok\n";
    bool all_ok = true;
    for (std::size_t e = 0; e < cfg.eps_ladder.size(); ++e) {
        const double eps = cfg.eps_ladder[e];
        ResolventProblem problem;
        problem.lambda = cfg.lambda;
        problem.f = f;
        problem.eps = eps;
        problem.env = sample_environment(cfg.env, cfg.seeds.front());
        problem.grid = grid;
        const Solution sol = solve_resolvent(problem, cfg.schedule);
        const AprioriReport ap = verify_apriori(sol, problem, cfg.schedule.linear_tol);
        all_ok = all_ok && ap.pass;
        diag_out << sci(eps) << ',' << cfg.seeds.front() << ',' << sol.diag.stages << ','
                 << sci(sol.diag.residual) << ',' << sci(sol.diag.energy) << ','
                 << sci(sol.diag.l2_norm) << ',' << (ap.pass ? 1 : 0) << '\n';
        char name[64];
        std::snprintf(name, sizeof name, "solution_%02zu.csv", e);
        auto out = open_out(dir / name);
        out << "x0,x1,u,f\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto x = grid.point(i);
            out << sci(x[0]) << ',' << sci(x[1]) << ',' << sci(sol.u[i]) << ','
                << sci(f[i]) << '\n';
        }
    }
    std::cout << (all_ok ? "all a-priori checks passed" : "a-priori check failed")
              << "\n";
    return all_ok ? 0 : 1;
}

int cmd_limit(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const Grid grid = cfg.make_grid();
    const GridFunction f = make_bump(grid, cfg.f_center, cfg.f_radius, cfg.f_amplitude);
    const double mean_mu = cell_average(cfg.env, 1);
    const EffectiveModel model =
        EffectiveModel::make(cfg.env.dimension, cfg.env.alpha, mean_mu * mean_mu, grid);
    const GridFunction uf = solve_limit_fourier(model, cfg.lambda, f);
    const GridFunction um = solve_limit_matched(model, cfg.lambda, f,
                                                cfg.schedule.linear_tol);
    GridFunction diff(grid);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = uf[i] - um[i];
    const double rel = l2_norm(diff) / l2_norm(uf);
    auto out = open_out(dir / "limit.csv");
    out << "x0,x1,u_fourier,u_matched\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.point(i);
        out << sci(x[0]) << ',' << sci(x[1]) << ',' << sci(uf[i]) << ',' << sci(um[i])
            << '\n';
    }
    auto sum = open_out(dir / "limit_summary.txt");
    sum << "C1 = " << sci(model.C1) << '\n';
    sum << "coefficient = " << sci(model.coefficient) << '\n';
    sum << "route_rel_difference = " << sci(rel) << '\n';
    std::cout << "route relative difference " << sci(rel) << "\n";
    return 0;
}

int cmd_converge(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const ConvergenceReport rep = run_convergence(cfg);
    write_convergence_csv(rep, (dir / "convergence.csv").string());
    emit_plotdata(rep.eps, rep.median_rel, (dir / "convergence.dat").string());
    for (std::size_t e = 0; e < rep.eps.size(); ++e)
        std::cout << "eps " << sci(rep.eps[e]) << "  median rel error "
                  << sci(rep.median_rel[e]) << "\n";
    std::cout << "slope " << sci(rep.slope) << (rep.valid ? "" : "  [invalid]") << "\n";
    return rep.valid ? 0 : 1;
}

int cmd_birkhoff(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const BirkhoffReport rep =
        run_birkhoff(cfg.env, cfg.seeds.front(), cfg.eps_ladder, cfg.window_low(),
                     cfg.window_high(), cfg.birkhoff_max_rel);
    write_birkhoff_csv(rep, (dir / "birkhoff.csv").string());
    std::vector<double> xs, ys;
    for (const BirkhoffRow& r : rep.rows) {
        xs.push_back(r.eps);
        ys.push_back(r.rel_error);
    }
    emit_plotdata(xs, ys, (dir / "birkhoff.dat").string());
    std::cout << "final rel error " << sci(rep.rows.back().rel_error) << "  slope "
              << sci(rep.slope) << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_drift_decay(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const auto dir = prepare_out(args);
    const DriftDecayReport rep = run_drift_decay(cfg);
    write_drift_csv(rep, (dir / "drift_decay.csv").string());
    emit_plotdata(rep.eps, rep.median_value, (dir / "drift_decay.dat").string());
    for (std::size_t e = 0; e < rep.eps.size(); ++e)
        std::cout << "eps " << sci(rep.eps[e]) << "  median P "
                  << sci(rep.median_value[e]) << "\n";
    std::cout << "slope " << sci(rep.slope) << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_suite(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const SuiteSummary summary = run_full_suite(cfg, args.out_dir);
    for (const SuiteCheck& c : summary.checks)
        std::cout << c.name << ": " << (c.pass ? "pass" : "fail")
                  << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    std::cout << "overall: " << (summary.pass ? "pass" : "fail") << "\n";
    return summary.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal resolvent homogenization experiments"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;
    const std::pair<const char*, int (*)(const CommonArgs&)> verbs[] = {
        {"dump-env", cmd_dump_env},   {"solve", cmd_solve},
        {"limit", cmd_limit},         {"converge", cmd_converge},
        {"birkhoff", cmd_birkhoff},   {"drift-decay", cmd_drift_decay},
        {"suite", cmd_suite},
    };
    for (const auto& [name, fn] : verbs) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, args);
        cmd->callback([&handler, fn] { handler = fn; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return handler(args);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
