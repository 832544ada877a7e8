#pragma once

#include "homog/discretize.hpp"
#include "homog/environment.hpp"
#include "homog/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace homog {

/// The scaled resolvent problem: lambda u - A u = f on the torus grid.
struct ResolventProblem {
    double lambda = 1.0;
    GridFunction f;
    double eps = 1.0;
    SampledEnvironment env;
    Grid grid;

    void validate() const;
};

/// Regularization schedule: viscosity theta_m = theta0 * theta_factor^m down,
/// truncation k_m = k0 * k_factor^m up, each stage one linear solve.
struct Schedule {
    double theta0 = 1e-2;
    double theta_factor = 0.1;
    double k0 = 1.0;
    double k_factor = 4.0;
    int max_stages = 12;
    double stage_tol = 1e-6;
    double linear_tol = 1e-10;

    void validate() const;
};

struct StageDiagnostics {
    double theta = 0.0;
    double k = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool dense_fallback = false;
};

struct SolveDiagnostics {
    double energy = 0.0;           // E0[u,u]
    double viscosity_energy = 0.0; // theta <G u, u>
    double l2_norm = 0.0;
    double residual = 0.0;         // final linear relative residual
    int stages = 0;
    std::vector<double> increments; // per-stage relative L2 increments
    std::vector<StageDiagnostics> stage_info;
    double theta_final = 0.0;
    double k_final = 0.0; // <= 0 means untruncated
    bool theta_zero_final = false;
};

struct Solution {
    GridFunction u;
    SolveDiagnostics diag;
};

struct GmresResult {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> history;
};

using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Restart-free right-preconditioned GMRES (modified Gram-Schmidt).
GmresResult gmres(const ApplyFn& op, const std::vector<double>& rhs,
                  std::vector<double>& x, const ApplyFn& precond, double tol,
                  int max_iter);

/// One regularized stage: solves (lambda I - A0 + theta G + Dk) u = f to
/// relative residual <= linear_tol (Krylov, Fourier-preconditioned by the
/// constant-coefficient symmetric part; dense direct fallback for N <= 4096).
/// k <= 0 requests the untruncated drift. Deterministic.
GridFunction solve_stage(const ResolventProblem& problem, double theta, double k,
                         double linear_tol, StageDiagnostics* stats = nullptr);

/// Dense direct solve of the same stage system (oracle / fallback path).
GridFunction solve_stage_dense(const ResolventProblem& problem, double theta, double k);

/// Runs the schedule until stages stabilize, with a final theta = 0 solve in
/// the uniqueness regime; returns the last iterate with diagnostics.
Solution solve_resolvent(const ResolventProblem& problem, const Schedule& schedule);

struct AprioriReport {
    bool pass = false;
    // (a) resolvent contraction ||u|| <= ||f|| / lambda
    double u_norm = 0.0, contraction_bound = 0.0;
    bool contraction_ok = false;
    // (b) energy identity E0[u,u] + theta <Gu,u> + lambda ||u||^2 = <f,u>
    double identity_lhs = 0.0, identity_rhs = 0.0, identity_tol = 0.0;
    bool identity_ok = false;
    // (c) energy bound E0[u,u] <= (2 lambda)^{-1} ||f||^2 + (lambda/2) ||u||^2
    double energy = 0.0, energy_bound = 0.0;
    bool energy_ok = false;
    std::string violated; // empty when pass
};

/// Checks the a-priori estimates on a computed solution.
AprioriReport verify_apriori(const Solution& solution, const ResolventProblem& problem,
                             double linear_tol);

/// Bounded-drift / fractional-seminorm diagnostic for the uniqueness
/// condition of drift-active problems. Smooth periodic streams always pass.
struct DriftRegularityReport {
    double sup_drift = 0.0;
    double seminorm_estimate = 0.0;
    bool finite = true;
};
DriftRegularityReport check_drift_regularity(const SampledEnvironment& env,
                                             int samples_per_axis = 32);

} // namespace homog
