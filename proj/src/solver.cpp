#include "homog/solver.hpp"

#include "homog/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace homog {

void ResolventProblem::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ResolventProblem: lambda must be > 0");
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::invalid_argument("ResolventProblem: eps must lie in (0,1]");
    if (f.grid != grid) throw std::invalid_argument("ResolventProblem: f grid mismatch");
    // supp f must stay in the central half of the torus.
    const double lo = 0.25 * grid.L, hi = 0.75 * grid.L;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) continue;
        auto x = grid.point(i);
        for (int k = 0; k < grid.d; ++k)
            if (x[k] < lo || x[k] > hi)
                throw std::invalid_argument(
                    "ResolventProblem: supp f leaves the central half of the torus");
    }
}

void Schedule::validate() const {
    if (!(theta_factor > 0.0 && theta_factor < 1.0))
        throw std::invalid_argument("Schedule: theta_factor must lie in (0,1)");
    if (!(k_factor > 1.0)) throw std::invalid_argument("Schedule: k_factor must be > 1");
    if (!(theta0 > 0.0 && k0 > 0.0 && stage_tol > 0.0 && linear_tol > 0.0))
        throw std::invalid_argument("Schedule: parameters must be positive");
    if (max_stages < 1) throw std::invalid_argument("Schedule: max_stages must be >= 1");
}

GmresResult gmres(const ApplyFn& op, const std::vector<double>& rhs,
                  std::vector<double>& x, const ApplyFn& precond, double tol,
                  int max_iter) {
    const std::size_t N = rhs.size();
    GmresResult res;
    x.assign(N, 0.0);
    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const int m = max_iter;
    std::vector<std::vector<double>> V;
    V.reserve(m + 1);
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), s(m + 1, 0.0);

    V.push_back(rhs);
    for (double& v : V[0]) v /= bnorm;
    s[0] = bnorm;

    std::vector<double> z(N), w(N);
    int j = 0;
    for (; j < m; ++j) {
        precond(V[j], z);
        op(z, w);
        for (int i = 0; i <= j; ++i) {
            double dot = 0.0;
            for (std::size_t t = 0; t < N; ++t) dot += w[t] * V[i][t];
            H[i][j] = dot;
            for (std::size_t t = 0; t < N; ++t) w[t] -= dot * V[i][t];
        }
        double wn = 0.0;
        for (double v : w) wn += v * v;
        wn = std::sqrt(wn);
        H[j + 1][j] = wn;
        // Givens rotations on the new column.
        for (int i = 0; i < j; ++i) {
            const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
            H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
            H[i][j] = t;
        }
        const double denom = std::hypot(H[j][j], H[j + 1][j]);
        cs[j] = H[j][j] / denom;
        sn[j] = H[j + 1][j] / denom;
        H[j][j] = denom;
        H[j + 1][j] = 0.0;
        s[j + 1] = -sn[j] * s[j];
        s[j] = cs[j] * s[j];
        const double rel = std::abs(s[j + 1]) / bnorm;
        res.history.push_back(rel);
        if (wn > 0.0 && rel > tol) {
            for (double& v : w) v /= wn;
            V.push_back(std::move(w));
            w.assign(N, 0.0);
        } else {
            ++j;
            break;
        }
    }
    const int k = std::min<int>(j, static_cast<int>(V.size()));
    // Back substitution.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
        double acc = s[i];
        for (int t = i + 1; t < k; ++t) acc -= H[i][t] * y[t];
        y[i] = acc / H[i][i];
    }
    std::vector<double> xk(N, 0.0);
    for (int i = 0; i < k; ++i)
        for (std::size_t t = 0; t < N; ++t) xk[t] += y[i] * V[i][t];
    precond(xk, x);
    // True residual.
    op(x, w);
    double rn = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        const double r = rhs[t] - w[t];
        rn += r * r;
    }
    res.residual = std::sqrt(rn) / bnorm;
    res.iterations = k;
    res.converged = res.residual <= 4.0 * tol;
    return res;
}

namespace {

/// Diagonal-in-Fourier application of 1/symbol.
class FourierDiagonal {
  public:
    FourierDiagonal(const Grid& grid, std::vector<double> symbol)
        : fft_(grid), inv_(std::move(symbol)) {
        for (double& v : inv_) v = 1.0 / v;
    }
    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const std::size_t N = v.size();
        std::vector<std::complex<double>> buf(v.begin(), v.end());
        std::vector<std::complex<double>> spec(N);
        fft_.forward(buf.data(), spec.data());
        for (std::size_t i = 0; i < N; ++i) spec[i] *= inv_[i];
        fft_.backward(spec.data(), buf.data());
        out.resize(N);
        const double s = 1.0 / static_cast<double>(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = buf[i].real() * s;
    }

  private:
    Fft fft_;
    std::vector<double> inv_;
};

struct StageSystem {
    const ResolventProblem* problem;
    DirichletOperator A0;
    ViscosityOperator G;
    std::optional<DriftOperator> Dk;
    double theta;

    StageSystem(const ResolventProblem& p, double theta_, double k)
        : problem(&p),
          A0(p.env, p.eps, p.grid),
          G(p.grid),
          theta(theta_) {
        if (p.env.spec.drift_amplitude > 0.0) Dk.emplace(p.env, p.eps, p.grid, k);
    }

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        GridFunction g;
        g.grid = problem->grid;
        g.values = v;
        GridFunction a = A0.apply(g);
        GridFunction gg = G.apply(g);
        out.resize(v.size());
        const double lam = problem->lambda;
        if (Dk && !Dk->is_zero()) {
            GridFunction dd = Dk->apply(g);
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = lam * v[i] - a[i] + theta * gg[i] + dd[i];
        } else {
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = lam * v[i] - a[i] + theta * gg[i];
        }
    }

    std::vector<double> precond_symbol() const {
        std::vector<double> sym = A0.unit_symbol();
        const std::vector<double> gs = G.symbol();
        double kbar = 0.0;
        for (double v : A0.kappa()) kbar += v;
        kbar /= static_cast<double>(A0.kappa().size());
        for (std::size_t i = 0; i < sym.size(); ++i)
            sym[i] = problem->lambda + kbar * kbar * sym[i] + theta * gs[i];
        return sym;
    }
};

GridFunction dense_solve(const StageSystem& sys) {
    const Grid& grid = sys.problem->grid;
    const std::size_t N = grid.size();
    if (N > 4096)
        throw std::runtime_error("solve_stage_dense: N > 4096 exceeds the dense cap");
    Eigen::MatrixXd B(N, N);
    std::vector<double> e(N, 0.0), col;
    for (std::size_t jcol = 0; jcol < N; ++jcol) {
        e[jcol] = 1.0;
        sys.apply(e, col);
        for (std::size_t i = 0; i < N; ++i) B(i, jcol) = col[i];
        e[jcol] = 0.0;
    }
    Eigen::VectorXd rhs(N);
    for (std::size_t i = 0; i < N; ++i) rhs(i) = sys.problem->f[i];
    Eigen::VectorXd u = B.partialPivLu().solve(rhs);
    GridFunction out(grid);
    for (std::size_t i = 0; i < N; ++i) out[i] = u(i);
    return out;
}

GridFunction solve_system(const StageSystem& sys, double linear_tol,
                          StageDiagnostics* stats) {
    const ResolventProblem& p = *sys.problem;
    const std::size_t N = p.grid.size();
    FourierDiagonal M(p.grid, sys.precond_symbol());
    std::vector<double> x;
    auto op = [&](const std::vector<double>& v, std::vector<double>& out) {
        sys.apply(v, out);
    };
    auto pc = [&](const std::vector<double>& v, std::vector<double>& out) {
        M.apply(v, out);
    };
    const int max_iter = static_cast<int>(std::min<std::size_t>(N, 400));
    GmresResult r = gmres(op, p.f.values, x, pc, linear_tol, max_iter);
    bool dense_used = false;
    if (!r.converged || r.residual > linear_tol * 10.0) {
        if (N <= 4096) {
            GridFunction u = dense_solve(sys);
            std::vector<double> w;
            sys.apply(u.values, w);
            double rn = 0.0, bn = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double d = p.f[i] - w[i];
                rn += d * d;
                bn += p.f[i] * p.f[i];
            }
            r.residual = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
            x = u.values;
            dense_used = true;
        } else {
            std::string hist;
            for (double h : r.history) hist += " " + std::to_string(h);
            throw std::runtime_error(
                "solve_stage: linear solver failed to reach the requested residual;"
                " history:" + hist);
        }
    }
    for (double v : x)
        if (!std::isfinite(v)) throw std::runtime_error("solve_stage: non-finite solution");
    if (stats) {
        stats->iterations = r.iterations;
        stats->residual = r.residual;
        stats->dense_fallback = dense_used;
    }
    GridFunction out(p.grid);
    out.values = std::move(x);
    return out;
}

double max_stream_on_grid(const ResolventProblem& p) {
    if (p.env.spec.drift_amplitude == 0.0 || p.env.spec.dimension != 2) return 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        auto x = p.grid.point(i);
        m = std::max(m, std::abs(stream_at(p.env, {x[0] / p.eps, x[1] / p.eps})[0][1]));
    }
    return m;
}

} // namespace

GridFunction solve_stage(const ResolventProblem& problem, double theta, double k,
                         double linear_tol, StageDiagnostics* stats) {
    problem.validate();
    StageSystem sys(problem, theta, k);
    if (stats) {
        stats->theta = theta;
        stats->k = k;
    }
    return solve_system(sys, linear_tol, stats);
}

GridFunction solve_stage_dense(const ResolventProblem& problem, double theta, double k) {
    problem.validate();
    StageSystem sys(problem, theta, k);
    return dense_solve(sys);
}

Solution solve_resolvent(const ResolventProblem& problem, const Schedule& schedule) {
    problem.validate();
    schedule.validate();
    const double max_h = max_stream_on_grid(problem);
    const bool drift_active = problem.env.spec.drift_amplitude > 0.0;
    // Drift-active problems reach this point only for alpha in [1,2)
    // (DriftOperator enforces the regime), so the uniqueness regime holds
    // whenever the problem is admissible.
    Solution sol;
    sol.u = GridFunction(problem.grid);
    GridFunction prev;
    bool stabilized = false;
    int m = 0;
    for (; m < schedule.max_stages; ++m) {
        const double theta = schedule.theta0 * std::pow(schedule.theta_factor, m);
        const double k = schedule.k0 * std::pow(schedule.k_factor, m);
        StageDiagnostics sd;
        GridFunction u = solve_stage(problem, theta, k, schedule.linear_tol, &sd);
        sol.diag.stage_info.push_back(sd);
        if (m > 0) {
            double diff = 0.0, base = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double d = u[i] - prev[i];
                diff += d * d;
                base += prev[i] * prev[i];
            }
            const double incr =
                base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
            sol.diag.increments.push_back(incr);
            if (incr <= schedule.stage_tol) {
                prev = std::move(u);
                sol.diag.theta_final = theta;
                sol.diag.k_final = k;
                stabilized = true;
                ++m;
                break;
            }
        }
        prev = std::move(u);
        sol.diag.theta_final = theta;
        sol.diag.k_final = k;
        if ((!drift_active || k >= max_h) && theta <= schedule.stage_tol) {
            stabilized = true;
            ++m;
            break;
        }
    }
    if (!stabilized) {
        std::string hist;
        for (double v : sol.diag.increments) hist += " " + std::to_string(v);
        throw std::runtime_error(
            "solve_resolvent: schedule exhausted without stabilization; increments:" +
            hist);
    }
    // Final theta = 0, untruncated solve (uniqueness regime).
    StageDiagnostics sd;
    GridFunction u = solve_stage(problem, 0.0, 0.0, schedule.linear_tol, &sd);
    sol.diag.stage_info.push_back(sd);
    sol.diag.theta_zero_final = true;
    sol.diag.theta_final = 0.0;
    sol.diag.k_final = 0.0;
    sol.diag.residual = sd.residual;
    sol.diag.stages = m;
    sol.u = std::move(u);

    DirichletOperator A0(problem.env, problem.eps, problem.grid);
    sol.diag.energy = A0.form(sol.u, sol.u);
    sol.diag.l2_norm = l2_norm(sol.u);
    sol.diag.viscosity_energy = 0.0;
    return sol;
}

AprioriReport verify_apriori(const Solution& solution, const ResolventProblem& problem,
                             double linear_tol) {
    AprioriReport rep;
    const double lam = problem.lambda;
    const double fn = l2_norm(problem.f);
    rep.u_norm = l2_norm(solution.u);
    const double allowance = 1e-8 + 10.0 * linear_tol;
    rep.contraction_bound = fn / lam * (1.0 + allowance);
    rep.contraction_ok = rep.u_norm <= rep.contraction_bound;

    DirichletOperator A0(problem.env, problem.eps, problem.grid);
    ViscosityOperator G(problem.grid);
    const double energy = A0.form(solution.u, solution.u);
    const double theta = solution.diag.theta_final;
    double visc = 0.0;
    if (theta > 0.0) visc = theta * mass_pairing(G.apply(solution.u), solution.u);
    rep.energy = energy;
    rep.identity_lhs = energy + visc + lam * rep.u_norm * rep.u_norm;
    rep.identity_rhs = mass_pairing(problem.f, solution.u);
    rep.identity_tol = 10.0 * linear_tol * fn * rep.u_norm + 1e-14 * fn * fn;
    rep.identity_ok = std::abs(rep.identity_lhs - rep.identity_rhs) <= rep.identity_tol;

    rep.energy_bound = fn * fn / (2.0 * lam) + 0.5 * lam * rep.u_norm * rep.u_norm +
                       rep.identity_tol;
    rep.energy_ok = energy <= rep.energy_bound;

    rep.pass = rep.contraction_ok && rep.identity_ok && rep.energy_ok;
    if (!rep.contraction_ok) rep.violated = "resolvent contraction ||u|| <= ||f||/lambda";
    else if (!rep.identity_ok) rep.violated = "energy identity";
    else if (!rep.energy_ok) rep.violated = "energy bound";
    return rep;
}

DriftRegularityReport check_drift_regularity(const SampledEnvironment& env,
                                             int samples_per_axis) {
    DriftRegularityReport rep;
    if (env.spec.drift_amplitude == 0.0 || env.spec.dimension != 2) return rep;
    const double P = env.spec.period;
    const int n = samples_per_axis;
    const double h = P / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto b = drift_at(env, {i * h, j * h});
            rep.sup_drift = std::max(rep.sup_drift, std::hypot(b[0], b[1]));
        }
    // Seminorm estimate: cell-averaged near part plus sup-bounded analytic tail.
    const double alpha = env.spec.alpha;
    double near = 0.0;
    const int nz = n;
    const double hz = P / nz;
    for (int bi = 0; bi < 8; ++bi) {
        for (int bj = 0; bj < 8; ++bj) {
            const std::array<double, 2> x0 = {bi * P / 8.0, bj * P / 8.0};
            const auto b0 = drift_at(env, x0);
            double acc = 0.0;
            for (int i = 0; i < nz; ++i)
                for (int j = 0; j < nz; ++j) {
                    const double z0 = -P / 2 + (i + 0.5) * hz;
                    const double z1 = -P / 2 + (j + 0.5) * hz;
                    const double r = std::hypot(z0, z1);
                    if (r == 0.0) continue;
                    const auto b1 = drift_at(env, {x0[0] + z0, x0[1] + z1});
                    const double d2 = (b1[0] - b0[0]) * (b1[0] - b0[0]) +
                                      (b1[1] - b0[1]) * (b1[1] - b0[1]);
                    acc += d2 * std::pow(r, -(4.0 - alpha)) * hz * hz;
                }
            near = std::max(near, acc);
        }
    }
    const double R = P / 2.0;
    const double tail = 4.0 * rep.sup_drift * rep.sup_drift * 2.0 * std::numbers::pi *
                        std::pow(R, -(2.0 - alpha)) / (2.0 - alpha);
    rep.seminorm_estimate = near + tail;
    rep.finite = std::isfinite(rep.seminorm_estimate);
    return rep;
}

} // namespace homog
