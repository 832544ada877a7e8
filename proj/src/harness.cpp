#include "homog/harness.hpp"

#include "homog/discretize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace homog {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

TrigKind parse_kind(const std::string& s) {
    if (s == "one") return TrigKind::One;
    if (s == "cos") return TrigKind::Cos;
    if (s == "sin") return TrigKind::Sin;
    throw std::invalid_argument("config: unknown trig kind '" + s + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    double v;
    if (!(ss >> v)) throw std::invalid_argument("config: bad value for " + key);
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    int v;
    if (!(ss >> v)) throw std::invalid_argument("config: bad value for " + key);
    return v;
}

std::array<double, 2> parse_point(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    std::array<double, 2> p = {0.0, 0.0};
    if (!(ss >> p[0])) throw std::invalid_argument("config: bad value for " + key);
    ss >> p[1];
    return p;
}

bool parse_profile_key(ProfileSpec& p, const std::string& sub, const std::string& value,
                       const std::string& key) {
    if (sub == "family") {
        p.family = profile_family_from_string(value);
        return true;
    }
    if (sub == "base") {
        p.base = parse_double(key, value);
        return true;
    }
    if (sub == "low") {
        p.low = parse_double(key, value);
        return true;
    }
    if (sub == "high") {
        p.high = parse_double(key, value);
        return true;
    }
    if (sub == "smoothing") {
        p.smoothing = parse_double(key, value);
        return true;
    }
    if (sub == "term") {
        std::istringstream ss(value);
        TrigTerm t;
        if (!(ss >> t.amplitude)) throw std::invalid_argument("config: bad term in " + key);
        t.kind = {TrigKind::One, TrigKind::One};
        t.freq = {0, 0};
        std::string kind;
        int freq = 0, slot = 0;
        while (ss >> kind >> freq) {
            if (slot >= 2) throw std::invalid_argument("config: too many factors in " + key);
            t.kind[slot] = parse_kind(kind);
            t.freq[slot] = freq;
            ++slot;
        }
        if (slot == 0) throw std::invalid_argument("config: term needs a factor in " + key);
        p.terms.push_back(t);
        return true;
    }
    return false;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void parallel_rows(std::size_t count, int workers,
                   const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next(0);
    const int nthreads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

std::string sanitize_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

} // namespace

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::array<double, 2> ExperimentConfig::window_low() const {
    if (window_set) return window_lo;
    return {3.0 * grid_L / 8.0, 3.0 * grid_L / 8.0};
}

std::array<double, 2> ExperimentConfig::window_high() const {
    if (window_set) return window_hi;
    return {5.0 * grid_L / 8.0, 5.0 * grid_L / 8.0};
}

void ExperimentConfig::validate() const {
    env.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
    make_grid();
    if (!(f_radius > 0.0)) throw std::invalid_argument("config: f.radius must be positive");
    if (eps_ladder.empty()) throw std::invalid_argument("config: eps ladder is empty");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0 && eps_ladder[i] <= 1.0))
            throw std::invalid_argument("config: eps values must lie in (0,1]");
        if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
            throw std::invalid_argument("config: eps ladder must be strictly decreasing");
    }
    if (seeds.empty()) throw std::invalid_argument("config: seeds list is empty");
    const auto lo = window_low();
    const auto hi = window_high();
    for (int k = 0; k < env.dimension; ++k) {
        if (!(0.0 < lo[k] && lo[k] < hi[k] && hi[k] < grid_L))
            throw std::invalid_argument("config: window must lie strictly inside the torus");
        if (!(lo[k] < f_center[k] - f_radius && f_center[k] + f_radius < hi[k]))
            throw std::invalid_argument("config: support of f must lie inside the window");
    }
    if (env.drift_amplitude != 0.0 && env.alpha < 1.0)
        throw std::invalid_argument("config: drift-active runs require alpha in [1,2)");
    schedule.validate();
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' on line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: empty key or value on line " +
                                        std::to_string(lineno));

        if (key.rfind("mu.", 0) == 0) {
            if (parse_profile_key(cfg.env.mu, key.substr(3), value, key)) continue;
        }
        if (key.rfind("stream.", 0) == 0) {
            if (parse_profile_key(cfg.env.stream01, key.substr(7), value, key)) continue;
        }
        if (key == "dimension")
            cfg.env.dimension = parse_int(key, value);
        else if (key == "alpha")
            cfg.env.alpha = parse_double(key, value);
        else if (key == "period")
            cfg.env.period = parse_double(key, value);
        else if (key == "theta0")
            cfg.env.theta0 = parse_double(key, value);
        else if (key == "drift_amplitude")
            cfg.env.drift_amplitude = parse_double(key, value);
        else if (key == "lambda")
            cfg.lambda = parse_double(key, value);
        else if (key == "grid.n")
            cfg.grid_n = parse_int(key, value);
        else if (key == "grid.L")
            cfg.grid_L = parse_double(key, value);
        else if (key == "f.center")
            cfg.f_center = parse_point(key, value);
        else if (key == "f.radius")
            cfg.f_radius = parse_double(key, value);
        else if (key == "f.amplitude")
            cfg.f_amplitude = parse_double(key, value);
        else if (key == "eps.ladder") {
            std::istringstream ss(value);
            double e;
            cfg.eps_ladder.clear();
            while (ss >> e) cfg.eps_ladder.push_back(e);
        } else if (key == "seeds") {
            std::istringstream ss(value);
            std::uint64_t s;
            cfg.seeds.clear();
            while (ss >> s) cfg.seeds.push_back(s);
        } else if (key == "window.lo") {
            cfg.window_lo = parse_point(key, value);
            cfg.window_set = true;
        } else if (key == "window.hi") {
            cfg.window_hi = parse_point(key, value);
            cfg.window_set = true;
        } else if (key == "schedule.theta0")
            cfg.schedule.theta0 = parse_double(key, value);
        else if (key == "schedule.theta_factor")
            cfg.schedule.theta_factor = parse_double(key, value);
        else if (key == "schedule.k0")
            cfg.schedule.k0 = parse_double(key, value);
        else if (key == "schedule.k_factor")
            cfg.schedule.k_factor = parse_double(key, value);
        else if (key == "schedule.max_stages")
            cfg.schedule.max_stages = parse_int(key, value);
        else if (key == "schedule.stage_tol")
            cfg.schedule.stage_tol = parse_double(key, value);
        else if (key == "schedule.linear_tol")
            cfg.schedule.linear_tol = parse_double(key, value);
        else if (key == "workers")
            cfg.workers = parse_int(key, value);
        else if (key == "converge.max_final_rel")
            cfg.converge_max_final_rel = parse_double(key, value);
        else if (key == "birkhoff.max_rel")
            cfg.birkhoff_max_rel = parse_double(key, value);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

GridFunction make_bump(const Grid& grid, const std::array<double, 2>& center,
                       double radius, double amplitude) {
    GridFunction f(grid);
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = grid.point(i);
        double d2 = 0.0;
        for (int k = 0; k < grid.d; ++k) {
            double dx = x[k] - center[k];
            dx -= grid.L * std::round(dx / grid.L);
            d2 += dx * dx;
        }
        const double t = 1.0 - d2 / r2;
        f[i] = t > 0.0 ? amplitude * t * t * t : 0.0;
    }
    return f;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return std::nan("");
    const double det = m * sxx - sx * sx;
    if (std::abs(det) < 1e-30) return std::nan("");
    return (m * sxy - sx * sy) / det;
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
    config.validate();
    const Grid grid = config.make_grid();
    const GridFunction f =
        make_bump(grid, config.f_center, config.f_radius, config.f_amplitude);
    const double mean_mu = cell_average(config.env, 1);
    const EffectiveModel model =
        EffectiveModel::make(config.env.dimension, config.env.alpha, mean_mu * mean_mu,
                             grid);
    const GridFunction ubar =
        solve_limit_matched(model, config.lambda, f, config.schedule.linear_tol);
    const auto lo = config.window_low();
    const auto hi = config.window_high();
    const double ubar_win = l2_norm_window(ubar, lo, hi);

    ConvergenceReport report;
    report.window_lo = lo;
    report.window_hi = hi;
    const std::size_t ne = config.eps_ladder.size();
    const std::size_t ns = config.seeds.size();
    report.rows.resize(ne * ns);
    parallel_rows(ne * ns, config.workers, [&](std::size_t idx) {
        const double eps = config.eps_ladder[idx / ns];
        const std::uint64_t seed = config.seeds[idx % ns];
        ConvergenceRow row;
        row.eps = eps;
        row.seed = seed;
        try {
            ResolventProblem problem;
            problem.lambda = config.lambda;
            problem.f = f;
            problem.eps = eps;
            problem.env = sample_environment(config.env, seed);
            problem.grid = grid;
            Solution sol = solve_resolvent(problem, config.schedule);
            AprioriReport ap = verify_apriori(sol, problem, config.schedule.linear_tol);
            if (!ap.pass) {
                row.failure = "a-priori check failed: " + ap.violated;
            } else {
                GridFunction diff(grid);
                for (std::size_t i = 0; i < diff.size(); ++i)
                    diff[i] = sol.u[i] - ubar[i];
                row.error = l2_norm_window(diff, lo, hi);
                row.rel_error = ubar_win > 0.0 ? row.error / ubar_win : row.error;
                row.stages = sol.diag.stages;
                row.residual = sol.diag.residual;
                row.u_norm = sol.diag.l2_norm;
                row.ok = true;
            }
        } catch (const std::exception& ex) {
            row.failure = ex.what();
        }
        report.rows[idx] = std::move(row);
    });

    report.eps = config.eps_ladder;
    report.median_error.resize(ne);
    report.median_rel.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        std::vector<double> errs, rels;
        for (std::size_t s = 0; s < ns; ++s) {
            const ConvergenceRow& row = report.rows[e * ns + s];
            if (row.ok) {
                errs.push_back(row.error);
                rels.push_back(row.rel_error);
            } else {
                ++report.failed_rows;
            }
        }
        report.median_error[e] = median_of(errs);
        report.median_rel[e] = median_of(rels);
    }
    report.valid = report.failed_rows * 5 <= static_cast<int>(ne * ns);
    report.monotone = ne >= 2;
    for (std::size_t e = 0; e + 1 < ne; ++e)
        if (!(report.median_rel[e + 1] < report.median_rel[e])) report.monotone = false;
    report.slope = fit_loglog_slope(report.eps, report.median_error);
    return report;
}

BirkhoffReport run_birkhoff(const EnvironmentSpec& spec, std::uint64_t seed,
                            const std::vector<double>& eps_ladder,
                            const std::array<double, 2>& window_lo,
                            const std::array<double, 2>& window_hi, double max_rel) {
    if (eps_ladder.empty()) throw std::invalid_argument("run_birkhoff: empty eps ladder");
    const SampledEnvironment env = sample_environment(spec, seed);
    const double target = cell_average(spec, 2);
    BirkhoffReport report;
    std::vector<double> inv_eps, rels;
    for (double eps : eps_ladder) {
        BirkhoffRow row;
        row.eps = eps;
        row.window_average = window_average_mu(env, 2, eps, window_lo, window_hi);
        row.target = target;
        row.rel_error = std::abs(row.window_average - target) / std::abs(target);
        report.rows.push_back(row);
        inv_eps.push_back(1.0 / eps);
        rels.push_back(row.rel_error);
    }
    report.slope = fit_loglog_slope(inv_eps, rels);
    report.trend_down = rels.back() <= rels.front() + 1e-14;
    report.pass = report.trend_down && rels.back() <= max_rel;
    return report;
}

DriftDecayReport run_drift_decay(const ExperimentConfig& config) {
    config.validate();
    const Grid grid = config.make_grid();
    const GridFunction g =
        make_bump(grid, config.f_center, config.f_radius, config.f_amplitude);
    const double h = grid.spacing();
    // centered differences of the test function, per axis
    std::vector<GridFunction> Dg(grid.d, GridFunction(grid));
    const int n = grid.n;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto ij = grid.unflat(i);
        for (int axis = 0; axis < grid.d; ++axis) {
            auto up = ij, dn = ij;
            up[axis] = (ij[axis] + 1) % n;
            dn[axis] = (ij[axis] + n - 1) % n;
            Dg[axis][i] =
                (g[grid.flat(up[0], up[1])] - g[grid.flat(dn[0], dn[1])]) / (2.0 * h);
        }
    }

    DriftDecayReport report;
    const std::size_t ne = config.eps_ladder.size();
    const std::size_t ns = config.seeds.size();
    report.rows.resize(ne * ns);
    parallel_rows(ne * ns, config.workers, [&](std::size_t idx) {
        const double eps = config.eps_ladder[idx / ns];
        const std::uint64_t seed = config.seeds[idx % ns];
        DriftDecayRow row;
        row.eps = eps;
        row.seed = seed;
        try {
            ResolventProblem problem;
            problem.lambda = config.lambda;
            problem.f = g;
            problem.eps = eps;
            problem.env = sample_environment(config.env, seed);
            problem.grid = grid;
            Solution sol = solve_resolvent(problem, config.schedule);
            double sum = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                auto x = grid.point(i);
                const auto b =
                    drift_at(problem.env, {x[0] / eps, grid.d == 2 ? x[1] / eps : 0.0});
                double dot = 0.0;
                for (int axis = 0; axis < grid.d; ++axis) dot += b[axis] * Dg[axis][i];
                sum += dot * sol.u[i];
            }
            row.value = std::abs(std::pow(eps, 1.0 - config.env.alpha) *
                                 grid.cell_volume() * sum);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.failure = ex.what();
        }
        report.rows[idx] = std::move(row);
    });

    report.eps = config.eps_ladder;
    report.median_value.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        std::vector<double> vals;
        for (std::size_t s = 0; s < ns; ++s)
            if (report.rows[e * ns + s].ok) vals.push_back(report.rows[e * ns + s].value);
        report.median_value[e] = median_of(vals);
    }
    report.decreasing = ne >= 2;
    for (std::size_t e = 0; e + 1 < ne; ++e)
        if (!(report.median_value[e + 1] < report.median_value[e]))
            report.decreasing = false;
    double vmax = 0.0;
    for (double v : report.median_value)
        if (std::isfinite(v)) vmax = std::max(vmax, v);
    report.slope = fit_loglog_slope(report.eps, report.median_value);
    report.pass = report.decreasing || vmax <= 1e-14;
    return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "eps,seed,error,rel_error,stages,residual,u_norm,ok,failure\n";
    for (const ConvergenceRow& r : report.rows)
        out << sci(r.eps) << ',' << r.seed << ',' << sci(r.error) << ','
            << sci(r.rel_error) << ',' << r.stages << ',' << sci(r.residual) << ','
            << sci(r.u_norm) << ',' << (r.ok ? 1 : 0) << ',' << sanitize_field(r.failure)
            << '\n';
}

void write_birkhoff_csv(const BirkhoffReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "eps,window_average,target,rel_error\n";
    for (const BirkhoffRow& r : report.rows)
        out << sci(r.eps) << ',' << sci(r.window_average) << ',' << sci(r.target) << ','
            << sci(r.rel_error) << '\n';
}

void write_drift_csv(const DriftDecayReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "eps,seed,value,ok,failure\n";
    for (const DriftDecayRow& r : report.rows)
        out << sci(r.eps) << ',' << r.seed << ',' << sci(r.value) << ','
            << (r.ok ? 1 : 0) << ',' << sanitize_field(r.failure) << '\n';
}

void write_summary(const SuiteSummary& summary, const std::string& path) {
    auto out = open_out(path);
    for (const SuiteCheck& c : summary.checks) {
        out << c.name << " = " << (c.pass ? "pass" : "fail") << '\n';
        if (!c.detail.empty()) out << c.name << ".detail = " << c.detail << '\n';
    }
    out << "overall = " << (summary.pass ? "pass" : "fail") << '\n';
}

void emit_plotdata(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& path) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!std::isfinite(y[i])) continue;
        out << sci(x[i]) << ' ' << sci(y[i]) << '\n';
    }
}

SuiteSummary run_full_suite(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    SuiteSummary summary;
    const bool drift_active = config.env.drift_amplitude != 0.0;

    {
        SuiteCheck c{"environment", true, true, ""};
        try {
            const SampledEnvironment env0 =
                sample_environment(config.env, config.seeds.front());
            if (drift_active) {
                double sup_b = 0.0;
                const int ns = 64;
                for (int i = 0; i < ns; ++i)
                    for (int j = 0; j < ns; ++j) {
                        auto b = drift_at(env0, {i * config.env.period / ns,
                                                 j * config.env.period / ns});
                        sup_b = std::max(sup_b, std::hypot(b[0], b[1]));
                    }
                DivergenceReport div =
                    check_divergence_free(env0, 256, 1e-2 * (1.0 + sup_b));
                c.pass = div.pass;
                c.detail = "max |div b| = " + sci(div.max_abs_divergence);
            } else {
                c.detail = "mu bounds verified";
            }
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    {
        SuiteCheck c{"operator-invariants", true, true, ""};
        try {
            const Grid small(config.env.dimension, config.grid_L,
                             std::min(config.grid_n, 64));
            const SampledEnvironment env0 =
                sample_environment(config.env, config.seeds.front());
            const double eps0 = config.eps_ladder.front();
            DirichletOperator A0(env0, eps0, small);
            GridFunction ones(small, 1.0);
            const double a0_on_const = linf_norm(A0.apply(ones));
            if (a0_on_const > 1e-12) {
                c.pass = false;
                c.detail = "A0 does not annihilate constants: " + sci(a0_on_const);
            }
            ViscosityOperator G(small);
            const double g_on_const = linf_norm(G.apply(ones));
            if (g_on_const > 1e-12) {
                c.pass = false;
                c.detail = "G does not annihilate constants: " + sci(g_on_const);
            }
            if (drift_active && c.pass) {
                DriftOperator Dk(env0, eps0, small, config.schedule.k0);
                std::uint64_t state = 0x9e3779b97f4a7c15ull;
                for (int trial = 0; trial < 20 && c.pass; ++trial) {
                    GridFunction g(small);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        state = state * 6364136223846793005ull + 1442695040888963407ull;
                        g[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
                    }
                    GridFunction Dg = Dk.apply(g);
                    const double pairing = std::abs(mass_pairing(Dg, g));
                    const double scale = l2_norm(Dg) * l2_norm(g);
                    if (pairing > 1e-12 * std::max(scale, 1e-300)) {
                        c.pass = false;
                        c.detail = "drift pairing not antisymmetric: " + sci(pairing);
                    }
                }
            }
            if (c.pass) {
                // the banded decomposition needs 1/delta < L/2; use a wide
                // torus for this diagnostic regardless of the config grid
                const Grid wide(config.env.dimension, 16.0, 64);
                const GridFunction u =
                    make_bump(wide, {8.0, 8.0}, 2.0, 1.0);
                GridFunction v(wide);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    auto x = wide.point(i);
                    v[i] = std::cos(2.0 * std::numbers::pi * x[0] / wide.L);
                }
                const KernelSplit split =
                    kernel_split_energies(env0, eps0, wide, u, v, 0.25);
                DirichletOperator A0w(env0, eps0, wide);
                const double total = A0w.form(u, v);
                const double recon = split.I1 + split.I2 + split.I3;
                const double scale = std::abs(split.I1) + std::abs(split.I2) +
                                     std::abs(split.I3) + 1e-300;
                if (std::abs(recon - total) > 1e-8 * scale) {
                    c.pass = false;
                    c.detail = "kernel split mismatch: " + sci(recon - total);
                } else if (c.detail.empty()) {
                    c.detail = "split I1+I2+I3 matches the full form";
                }
            }
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    {
        SuiteCheck c{"apriori", true, true, ""};
        try {
            const Grid grid = config.make_grid();
            ResolventProblem problem;
            problem.lambda = config.lambda;
            problem.f = make_bump(grid, config.f_center, config.f_radius,
                                  config.f_amplitude);
            problem.eps = config.eps_ladder.front();
            problem.env = sample_environment(config.env, config.seeds.front());
            problem.grid = grid;
            Solution sol = solve_resolvent(problem, config.schedule);
            AprioriReport ap = verify_apriori(sol, problem, config.schedule.linear_tol);
            c.pass = ap.pass;
            c.detail = ap.pass ? "contraction, identity and energy bounds hold"
                               : ap.violated;
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    {
        SuiteCheck c{"birkhoff", true, true, ""};
        try {
            BirkhoffReport rep =
                run_birkhoff(config.env, config.seeds.front(), config.eps_ladder,
                             config.window_low(), config.window_high(),
                             config.birkhoff_max_rel);
            write_birkhoff_csv(rep, path("birkhoff.csv"));
            std::vector<double> xs, ys;
            for (const BirkhoffRow& r : rep.rows) {
                xs.push_back(r.eps);
                ys.push_back(r.rel_error);
            }
            emit_plotdata(xs, ys, path("birkhoff.dat"));
            c.pass = rep.pass;
            c.detail = "final rel error = " + sci(rep.rows.back().rel_error) +
                       "; slope = " + sci(rep.slope);
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    {
        SuiteCheck c{"convergence", true, true, ""};
        try {
            ConvergenceReport rep = run_convergence(config);
            write_convergence_csv(rep, path("convergence.csv"));
            emit_plotdata(rep.eps, rep.median_rel, path("convergence.dat"));
            double vmax = 0.0;
            for (double v : rep.median_error)
                if (std::isfinite(v)) vmax = std::max(vmax, v);
            const GridFunction f = make_bump(config.make_grid(), config.f_center,
                                             config.f_radius, config.f_amplitude);
            const bool degenerate = vmax <= 1e-6 * l2_norm(f);
            c.pass = rep.valid && (rep.monotone || degenerate);
            if (config.converge_max_final_rel > 0.0 &&
                !(rep.median_rel.back() <= config.converge_max_final_rel))
                c.pass = false;
            c.detail = "final median rel error = " + sci(rep.median_rel.back()) +
                       "; slope = " + sci(rep.slope) +
                       "; failed rows = " + std::to_string(rep.failed_rows);
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    if (drift_active) {
        SuiteCheck c{"drift-decay", true, true, ""};
        try {
            DriftDecayReport rep = run_drift_decay(config);
            write_drift_csv(rep, path("drift_decay.csv"));
            emit_plotdata(rep.eps, rep.median_value, path("drift_decay.dat"));
            c.pass = rep.pass;
            c.detail = "final median P = " + sci(rep.median_value.back()) +
                       "; slope = " + sci(rep.slope);
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail = ex.what();
        }
        summary.checks.push_back(c);
    }

    summary.pass = true;
    for (const SuiteCheck& c : summary.checks)
        if (c.mandatory && !c.pass) summary.pass = false;
    write_summary(summary, path("summary.txt"));
    return summary;
}

} // namespace homog
