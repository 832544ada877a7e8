#pragma once

#include <array>
#include <string>
#include <vector>

namespace homog {

/// Periodic scalar profile on the cell [0,P)^d. Families:
///  - constant:       value `base`
///  - trig:           base + sum of terms  amp * prod_k trig(2*pi*freq_k*x_k/P)
///  - checkerboard:   two values {low,high} on the 2^d equal subcells (mu only)
///  - smoothed_checkerboard: checkerboard mollified to a smooth field,
///                    mid + (high-low)/2 * tanh(q(x)/smoothing) with
///                    q = prod_k sin(2*pi*x_k/P)
enum class ProfileFamily { Constant, Trig, Checkerboard, SmoothedCheckerboard };

enum class TrigKind { One, Cos, Sin };

struct TrigTerm {
    double amplitude = 0.0;
    std::array<TrigKind, 2> kind = {TrigKind::Cos, TrigKind::One};
    std::array<int, 2> freq = {1, 0};
};

struct ProfileSpec {
    ProfileFamily family = ProfileFamily::Constant;
    double base = 1.0;                 // constant value / trig offset
    std::vector<TrigTerm> terms;       // trig only
    double low = 1.0, high = 2.0;      // checkerboard variants
    double smoothing = 0.25;           // smoothed checkerboard only

    bool differentiable() const {
        return family != ProfileFamily::Checkerboard;
    }
    static ProfileSpec constant(double c) {
        ProfileSpec p;
        p.family = ProfileFamily::Constant;
        p.base = c;
        return p;
    }
};

/// x wrapped into [0,P).
double wrap(double x, double P);

/// Profile value at x (d components used).
double profile_value(const ProfileSpec& p, int d, double P, const std::array<double, 2>& x);

/// Analytic gradient; throws for non-differentiable families.
std::array<double, 2> profile_gradient(const ProfileSpec& p, int d, double P,
                                       const std::array<double, 2>& x);

/// Exact-or-quadrature cell average of profile^moment over [0,P)^d
/// (relative error <= 1e-10; throws on quadrature non-convergence).
double profile_moment(const ProfileSpec& p, int d, double P, int moment);

/// Minimum of the profile over a dense sample of the cell (validation aid).
double profile_min_sampled(const ProfileSpec& p, int d, double P, int samples_per_axis = 512);

/// Maximum of |profile| over a dense sample of the cell.
double profile_absmax_sampled(const ProfileSpec& p, int d, double P, int samples_per_axis = 512);

std::string to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(const std::string& s);

} // namespace homog
