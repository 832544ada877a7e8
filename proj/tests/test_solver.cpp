#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "homog/harness.hpp"
#include "homog/limit.hpp"
#include "homog/solver.hpp"

#include <cmath>
#include <vector>

using namespace homog;

namespace {

EnvironmentSpec trig_1d() {
    EnvironmentSpec spec;
    spec.dimension = 1;
    spec.alpha = 1.5;
    spec.period = 1.0;
    spec.theta0 = 0.5;
    spec.mu.family = ProfileFamily::Trig;
    spec.mu.base = 1.5;
    spec.mu.terms = {{0.5, {TrigKind::Cos, TrigKind::One}, {1, 0}}};
    return spec;
}

EnvironmentSpec drifted_2d() {
    EnvironmentSpec spec;
    spec.dimension = 2;
    spec.alpha = 1.5;
    spec.period = 1.0;
    spec.theta0 = 0.5;
    spec.mu.family = ProfileFamily::Trig;
    spec.mu.base = 1.5;
    spec.mu.terms = {{0.5, {TrigKind::Cos, TrigKind::Cos}, {1, 1}}};
    spec.drift_amplitude = 1.0;
    spec.stream01.family = ProfileFamily::Trig;
    spec.stream01.base = 0.0;
    spec.stream01.terms = {{1.0, {TrigKind::Sin, TrigKind::Sin}, {1, 1}}};
    return spec;
}

ResolventProblem bump_problem(const EnvironmentSpec& spec, std::uint64_t seed,
                              double lambda, double eps, int n) {
    const Grid grid(spec.dimension, 2.0, n);
    ResolventProblem p;
    p.lambda = lambda;
    p.f = make_bump(grid, {1.0, 1.0}, 0.2, 1.0);
    p.eps = eps;
    p.env = sample_environment(spec, seed);
    p.grid = grid;
    return p;
}

} // namespace

TEST_CASE("constant coefficients agree with the Fourier resolvent") {
    EnvironmentSpec spec = trig_1d();
    spec.mu = ProfileSpec::constant(1.0);
    const ResolventProblem p = bump_problem(spec, 1, 1.0, 0.5, 128);
    const GridFunction u = solve_stage(p, 0.0, 0.0, 1e-10);
    const EffectiveModel model = EffectiveModel::make(1, spec.alpha, 1.0, p.grid);
    const GridFunction oracle = solve_limit_fourier(model, p.lambda, p.f);
    GridFunction diff(p.grid);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = u[i] - oracle[i];
    CHECK(l2_norm(diff) / l2_norm(oracle) < 0.03);
}

TEST_CASE("large lambda collapses the resolvent to 1/lambda") {
    const double lambda = 1e6;
    ResolventProblem p = bump_problem(trig_1d(), 2, lambda, 0.25, 64);
    const double fnorm = l2_norm(p.f);
    for (std::size_t i = 0; i < p.f.size(); ++i) p.f[i] /= fnorm;
    const GridFunction u = solve_stage(p, 0.0, 0.0, 1e-12);
    GridFunction res(p.grid);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = lambda * u[i] - p.f[i];
    CHECK(l2_norm(res) <= 1e-3);
}

TEST_CASE("zero data gives the zero solution") {
    ResolventProblem p = bump_problem(trig_1d(), 3, 1.0, 0.25, 64);
    for (double& v : p.f.values) v = 0.0;
    const GridFunction u = solve_stage(p, 1e-2, 1.0, 1e-10);
    CHECK(l2_norm(u) == 0.0);
}

TEST_CASE("schedule limit matches a direct theta=0 solve without drift") {
    const ResolventProblem p = bump_problem(trig_1d(), 4, 1.0, 0.25, 64);
    Schedule sched;
    const Solution sol = solve_resolvent(p, sched);
    const GridFunction direct = solve_stage_dense(p, 0.0, 0.0);
    GridFunction diff(p.grid);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = sol.u[i] - direct[i];
    CHECK(l2_norm(diff) <= sched.stage_tol * l2_norm(direct));
}

TEST_CASE("iterative stage solves match the dense factorization") {
    const ResolventProblem p = bump_problem(drifted_2d(), 5, 1.0, 0.5, 16);
    for (double theta : {1e-2, 1e-4, 0.0}) {
        const GridFunction it = solve_stage(p, theta, 2.0, 1e-12);
        const GridFunction dense = solve_stage_dense(p, theta, 2.0);
        GridFunction diff(p.grid);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = it[i] - dense[i];
        CHECK(l2_norm(diff) <= 1e-8 * l2_norm(dense));
    }
}

TEST_CASE("inactive truncation makes the solution k-independent") {
    ResolventProblem p = bump_problem(drifted_2d(), 6, 1.0, 0.5, 16);
    Schedule a;
    a.k0 = 2.0; // max |H_01| = 1
    a.k_factor = 4.0;
    Schedule b = a;
    b.k_factor = 16.0;
    const Solution ua = solve_resolvent(p, a);
    const Solution ub = solve_resolvent(p, b);
    for (std::size_t i = 0; i < ua.u.size(); ++i) CHECK(ua.u[i] == ub.u[i]);
}

TEST_CASE("stage increments settle down") {
    const ResolventProblem p = bump_problem(drifted_2d(), 7, 1.0, 0.25, 16);
    Schedule sched;
    const Solution sol = solve_resolvent(p, sched);
    const std::vector<double>& inc = sol.diag.increments;
    REQUIRE(inc.size() >= 2);
    for (std::size_t i = 2; i + 1 < inc.size(); ++i) CHECK(inc[i + 1] <= inc[i] + 1e-12);
    CHECK(sol.diag.residual <= 4e-10);
}

TEST_CASE("a-priori estimates hold across lambda and environments") {
    const std::vector<EnvironmentSpec> specs = {trig_1d(), drifted_2d()};
    for (const EnvironmentSpec& spec : specs)
        for (double lambda : {0.1, 1.0, 10.0}) {
            const ResolventProblem p =
                bump_problem(spec, 11, lambda, 0.25, spec.dimension == 1 ? 64 : 16);
            Schedule sched;
            const Solution sol = solve_resolvent(p, sched);
            const AprioriReport rep = verify_apriori(sol, p, sched.linear_tol);
            CAPTURE(rep.violated);
            CHECK(rep.pass);
            CHECK(sol.diag.l2_norm <= (1.0 + 1e-6) * l2_norm(p.f) / lambda);
        }
}

TEST_CASE("unit data at lambda one is a contraction") {
    ResolventProblem p = bump_problem(trig_1d(), 12, 1.0, 0.25, 64);
    const double fnorm = l2_norm(p.f);
    for (double& v : p.f.values) v /= fnorm;
    const Solution sol = solve_resolvent(p, Schedule{});
    CHECK(sol.diag.l2_norm <= 1.0 + 1e-8);
}

TEST_CASE("energy identity holds on every stage") {
    const ResolventProblem p = bump_problem(trig_1d(), 13, 1.0, 0.25, 64);
    const DirichletOperator A0(p.env, p.eps, p.grid);
    const ViscosityOperator G(p.grid);
    const double linear_tol = 1e-10;
    double theta = 1e-2;
    for (int m = 0; m < 5; ++m, theta *= 0.1) {
        const GridFunction u = solve_stage(p, theta, 0.0, linear_tol);
        const double lhs = A0.form(u, u) + theta * mass_pairing(G.apply(u), u) +
                           p.lambda * mass_pairing(u, u);
        const double rhs = mass_pairing(p.f, u);
        CHECK(std::abs(lhs - rhs) <= 10.0 * linear_tol * l2_norm(p.f) * l2_norm(u));
    }
}

TEST_CASE("nonnegative data yields an essentially nonnegative solution") {
    const ResolventProblem p = bump_problem(trig_1d(), 14, 1.0, 0.25, 64);
    const Solution sol = solve_resolvent(p, Schedule{});
    double lo = 0.0;
    for (double v : sol.u.values) lo = std::min(lo, v);
    CHECK(lo >= -1e-8 * l2_norm(p.f));
}

TEST_CASE("solves are bitwise deterministic") {
    const ResolventProblem p = bump_problem(drifted_2d(), 15, 1.0, 0.5, 16);
    const Solution a = solve_resolvent(p, Schedule{});
    const Solution b = solve_resolvent(p, Schedule{});
    for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] == b.u[i]);
}

TEST_CASE("problem validation rejects off-center data") {
    ResolventProblem p = bump_problem(trig_1d(), 16, 1.0, 0.25, 64);
    p.f.values[0] = 1.0; // support touches the torus origin
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("drift regularity diagnostic is finite for smooth streams") {
    const SampledEnvironment env = sample_environment(drifted_2d(), 17);
    const DriftRegularityReport rep = check_drift_regularity(env);
    CHECK(rep.finite);
    CHECK(rep.sup_drift > 0.0);
    CHECK(std::isfinite(rep.seminorm_estimate));
}
