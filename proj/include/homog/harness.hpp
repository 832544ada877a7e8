#pragma once

#include "homog/environment.hpp"
#include "homog/grid.hpp"
#include "homog/limit.hpp"
#include "homog/solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace homog {

/// One experiment: environment, right-hand side, ladder, seeds, window.
struct ExperimentConfig {
    EnvironmentSpec env;
    double lambda = 1.0;
    std::array<double, 2> f_center = {0.5, 0.5};
    double f_radius = 0.125;
    double f_amplitude = 1.0;
    std::vector<double> eps_ladder;
    std::vector<std::uint64_t> seeds;
    int grid_n = 64;
    double grid_L = 1.0;
    std::array<double, 2> window_lo = {0.0, 0.0};
    std::array<double, 2> window_hi = {0.0, 0.0};
    bool window_set = false;
    Schedule schedule;
    int workers = 1;
    // Regression thresholds for the suite verdict; <= 0 disables the check.
    double converge_max_final_rel = 0.0;
    double birkhoff_max_rel = 0.02;

    Grid make_grid() const { return Grid(env.dimension, grid_L, grid_n); }
    std::array<double, 2> window_low() const;
    std::array<double, 2> window_high() const;
    void validate() const;
};

/// key = value configuration text (# comments, repeated keys for lists).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Smooth compactly supported bump A * (1 - (|x-c|/r)^2)^3, clamped at 0.
GridFunction make_bump(const Grid& grid, const std::array<double, 2>& center,
                       double radius, double amplitude);

/// Least-squares slope of log(y) against log(x); requires positive data.
/// Returns NaN when fewer than two usable points remain.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRow {
    double eps = 0.0;
    std::uint64_t seed = 0;
    double error = 0.0;     // ||u_eps - ubar||_{L2(O)}
    double rel_error = 0.0; // error / ||ubar||_{L2(O)}
    int stages = 0;
    double residual = 0.0;
    double u_norm = 0.0;
    bool ok = false;
    std::string failure;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::vector<double> eps;
    std::vector<double> median_error;
    std::vector<double> median_rel;
    // d log(median error) / d log(eps): positive when errors shrink with eps.
    double slope = 0.0;
    std::array<double, 2> window_lo = {0.0, 0.0};
    std::array<double, 2> window_hi = {0.0, 0.0};
    int failed_rows = 0;
    bool valid = false; // <= 20% failed rows
    bool monotone = false;
};

ConvergenceReport run_convergence(const ExperimentConfig& config);

struct BirkhoffRow {
    double eps = 0.0;
    double window_average = 0.0;
    double target = 0.0;
    double rel_error = 0.0;
};

struct BirkhoffReport {
    std::vector<BirkhoffRow> rows;
    // d log(rel error) / d log(1/eps): near -1 for smooth oscillatory fields.
    double slope = 0.0;
    bool trend_down = false;
    bool pass = false; // smallest-eps error within tolerance and trending down
};

BirkhoffReport run_birkhoff(const EnvironmentSpec& spec, std::uint64_t seed,
                            const std::vector<double>& eps_ladder,
                            const std::array<double, 2>& window_lo,
                            const std::array<double, 2>& window_hi,
                            double max_rel = 0.02);

struct DriftDecayRow {
    double eps = 0.0;
    std::uint64_t seed = 0;
    double value = 0.0;
    bool ok = false;
    std::string failure;
};

struct DriftDecayReport {
    std::vector<DriftDecayRow> rows;
    std::vector<double> eps;
    std::vector<double> median_value;
    // d log(median P) / d log(eps): the decay exponent of the pairing.
    double slope = 0.0;
    bool decreasing = false;
    bool pass = false;
};

DriftDecayReport run_drift_decay(const ExperimentConfig& config);

struct SuiteCheck {
    std::string name;
    bool pass = false;
    bool mandatory = true;
    std::string detail;
};

struct SuiteSummary {
    std::vector<SuiteCheck> checks;
    bool pass = false; // all mandatory checks passed
};

/// Full pipeline: environment validation, operator invariants, a-priori
/// verification, Birkhoff, convergence, drift decay (when active). Writes
/// CSVs, plot-data files and a key-value summary under out_dir.
SuiteSummary run_full_suite(const ExperimentConfig& config, const std::string& out_dir);

// Deterministic writers (%.12e, one-line headers, keyed row order).
void write_convergence_csv(const ConvergenceReport& report, const std::string& path);
void write_birkhoff_csv(const BirkhoffReport& report, const std::string& path);
void write_drift_csv(const DriftDecayReport& report, const std::string& path);
void write_summary(const SuiteSummary& summary, const std::string& path);
void emit_plotdata(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& path);

/// %.12e rendering used by every writer.
std::string sci(double v);

} // namespace homog
