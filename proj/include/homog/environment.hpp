#pragma once

#include "homog/profiles.hpp"

#include <array>
#include <cstdint>

namespace homog {

/// Specification of a stationary-ergodic environment: periodic profiles for
/// the conductance mu and the antisymmetric stream functions, with a uniform
/// random shift of the cell playing the role of the realization.
struct EnvironmentSpec {
    int dimension = 1;
    double alpha = 1.5;
    double period = 1.0;       // cell period P
    double theta0 = 1.0;       // lower bound for mu
    double drift_amplitude = 0.0;
    ProfileSpec mu = ProfileSpec::constant(1.0);
    // Upper-triangle stream profile H_{01}; the full matrix is built as
    // H_{01} = s, H_{10} = -s, diagonal 0, so antisymmetry holds by
    // construction. Only meaningful for dimension 2.
    ProfileSpec stream01 = ProfileSpec::constant(0.0);

    void validate() const;
};

/// A sampled realization: the spec plus a uniform shift of the cell torus.
struct SampledEnvironment {
    EnvironmentSpec spec;
    std::array<double, 2> shift = {0.0, 0.0};
    std::uint64_t seed = 0;

    /// Environment with the shift advanced by y (mod P); realizes translation.
    SampledEnvironment shifted_by(const std::array<double, 2>& y) const;
};

/// Draws the shift uniformly from [0,P)^d with a seeded generator.
/// Deterministic given (spec, seed). Throws on an invalid spec.
SampledEnvironment sample_environment(const EnvironmentSpec& spec, std::uint64_t seed);

/// Conductance field mu(x) = profile(x + shift mod P); always >= theta0.
double mu_at(const SampledEnvironment& env, const std::array<double, 2>& x);

/// Stream matrix H(x + shift), antisymmetric, scaled by drift_amplitude.
std::array<std::array<double, 2>, 2> stream_at(const SampledEnvironment& env,
                                               const std::array<double, 2>& x);

/// Divergence-free drift b_j = sum_l d_l H_{jl}, evaluated analytically.
std::array<double, 2> drift_at(const SampledEnvironment& env,
                               const std::array<double, 2>& x);

struct DivergenceReport {
    double max_abs_divergence = 0.0;
    double tol = 0.0;
    int grid_resolution = 0;
    bool pass = false;
};

/// Centered-difference divergence of drift_at over one cell at resolution n.
DivergenceReport check_divergence_free(const SampledEnvironment& env,
                                       int grid_resolution, double tol);

/// E[mu^moment]: the exact cell average of the profile (moment in {1,2}).
/// This is the ensemble expectation because the law is the uniform shift.
double cell_average(const EnvironmentSpec& spec, int moment);

/// |O|^{-1} int_O mu(x/eps)^power dx over the box [lo,hi]^d, by per-cell
/// quadrature (Birkhoff averaging diagnostic).
double window_average_mu(const SampledEnvironment& env, int power, double eps,
                         const std::array<double, 2>& lo,
                         const std::array<double, 2>& hi);

} // namespace homog
