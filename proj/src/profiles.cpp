#include "homog/profiles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace homog {

double wrap(double x, double P) {
    double r = std::fmod(x, P);
    if (r < 0.0) r += P;
    return r;
}

namespace {

double trig_factor(TrigKind k, double arg) {
    switch (k) {
        case TrigKind::One: return 1.0;
        case TrigKind::Cos: return std::cos(arg);
        case TrigKind::Sin: return std::sin(arg);
    }
    return 1.0;
}

double trig_factor_deriv(TrigKind k, double arg) {
    switch (k) {
        case TrigKind::One: return 0.0;
        case TrigKind::Cos: return -std::sin(arg);
        case TrigKind::Sin: return std::cos(arg);
    }
    return 0.0;
}

int checker_parity(int d, double P, const std::array<double, 2>& x) {
    int parity = 0;
    for (int k = 0; k < d; ++k)
        parity += static_cast<int>(std::floor(2.0 * wrap(x[k], P) / P));
    return parity & 1;
}

double smoothed_q(int d, double P, const std::array<double, 2>& x) {
    const double w = 2.0 * std::numbers::pi / P;
    double q = 1.0;
    for (int k = 0; k < d; ++k) q *= std::sin(w * x[k]);
    return q;
}

// Periodic trapezoid average of f^moment over the cell, refined until the
// relative change drops below tol. Spectrally accurate for smooth profiles.
double trapezoid_moment(const ProfileSpec& p, int d, double P, int moment, double tol) {
    double prev = 0.0;
    bool have_prev = false;
    const int nmax = (d == 1) ? (1 << 20) : 4096;
    for (int n = 64; n <= nmax; n *= 2) {
        double s = 0.0;
        const double h = P / n;
        if (d == 1) {
            for (int i = 0; i < n; ++i) {
                double v = profile_value(p, d, P, {i * h, 0.0});
                s += (moment == 1) ? v : v * v;
            }
            s /= n;
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = profile_value(p, d, P, {i * h, j * h});
                    s += (moment == 1) ? v : v * v;
                }
            s /= static_cast<double>(n) * n;
        }
        if (have_prev && std::abs(s - prev) <= tol * std::max(1.0, std::abs(s)))
            return s;
        prev = s;
        have_prev = true;
    }
    throw std::runtime_error(
        "profile_moment: quadrature did not converge to requested tolerance");
}

} // namespace

double profile_value(const ProfileSpec& p, int d, double P, const std::array<double, 2>& x) {
    switch (p.family) {
        case ProfileFamily::Constant:
            return p.base;
        case ProfileFamily::Trig: {
            const double w = 2.0 * std::numbers::pi / P;
            double v = p.base;
            for (const auto& t : p.terms) {
                double f = t.amplitude;
                for (int k = 0; k < d; ++k) f *= trig_factor(t.kind[k], w * t.freq[k] * x[k]);
                v += f;
            }
            return v;
        }
        case ProfileFamily::Checkerboard:
            return checker_parity(d, P, x) == 0 ? p.low : p.high;
        case ProfileFamily::SmoothedCheckerboard: {
            const double mid = 0.5 * (p.low + p.high);
            const double half = 0.5 * (p.high - p.low);
            return mid + half * std::tanh(smoothed_q(d, P, x) / p.smoothing);
        }
    }
    throw std::logic_error("profile_value: unknown family");
}

std::array<double, 2> profile_gradient(const ProfileSpec& p, int d, double P,
                                       const std::array<double, 2>& x) {
    if (!p.differentiable())
        throw std::runtime_error(
            "profile_gradient: unsupported profile family (checkerboard is not "
            "differentiable); use trig or smoothed_checkerboard");
    std::array<double, 2> g = {0.0, 0.0};
    const double w = 2.0 * std::numbers::pi / P;
    switch (p.family) {
        case ProfileFamily::Constant:
            return g;
        case ProfileFamily::Trig: {
            for (const auto& t : p.terms) {
                for (int j = 0; j < d; ++j) {
                    double f = t.amplitude;
                    for (int k = 0; k < d; ++k) {
                        const double arg = w * t.freq[k] * x[k];
                        f *= (k == j) ? w * t.freq[k] * trig_factor_deriv(t.kind[k], arg)
                                      : trig_factor(t.kind[k], arg);
                    }
                    g[j] += f;
                }
            }
            return g;
        }
        case ProfileFamily::SmoothedCheckerboard: {
            const double half = 0.5 * (p.high - p.low);
            const double q = smoothed_q(d, P, x) / p.smoothing;
            const double sech2 = 1.0 / (std::cosh(q) * std::cosh(q));
            for (int j = 0; j < d; ++j) {
                double dq = 1.0;
                for (int k = 0; k < d; ++k)
                    dq *= (k == j) ? w * std::cos(w * x[k]) : std::sin(w * x[k]);
                g[j] = half * sech2 * dq / p.smoothing;
            }
            return g;
        }
        default:
            throw std::logic_error("profile_gradient: unknown family");
    }
}

double profile_moment(const ProfileSpec& p, int d, double P, int moment) {
    if (moment != 1 && moment != 2)
        throw std::invalid_argument("profile_moment: moment must be 1 or 2");
    switch (p.family) {
        case ProfileFamily::Constant:
            return moment == 1 ? p.base : p.base * p.base;
        case ProfileFamily::Checkerboard:
            // Equal-area two-value layout.
            return moment == 1 ? 0.5 * (p.low + p.high)
                               : 0.5 * (p.low * p.low + p.high * p.high);
        case ProfileFamily::SmoothedCheckerboard:
            if (moment == 1) return 0.5 * (p.low + p.high); // odd tanh part averages out
            return trapezoid_moment(p, d, P, moment, 1e-12);
        case ProfileFamily::Trig:
            return trapezoid_moment(p, d, P, moment, 1e-12);
    }
    throw std::logic_error("profile_moment: unknown family");
}

double profile_min_sampled(const ProfileSpec& p, int d, double P, int samples_per_axis) {
    const int n = samples_per_axis;
    const double h = P / n;
    double m = profile_value(p, d, P, {0.0, 0.0});
    if (d == 1) {
        for (int i = 0; i < n; ++i) m = std::min(m, profile_value(p, d, P, {i * h, 0.0}));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m = std::min(m, profile_value(p, d, P, {i * h, j * h}));
    }
    return m;
}

double profile_absmax_sampled(const ProfileSpec& p, int d, double P, int samples_per_axis) {
    const int n = samples_per_axis;
    const double h = P / n;
    double m = 0.0;
    if (d == 1) {
        for (int i = 0; i < n; ++i)
            m = std::max(m, std::abs(profile_value(p, d, P, {i * h, 0.0})));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m = std::max(m, std::abs(profile_value(p, d, P, {i * h, j * h})));
    }
    return m;
}

std::string to_string(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::Constant: return "constant";
        case ProfileFamily::Trig: return "trig";
        case ProfileFamily::Checkerboard: return "checkerboard";
        case ProfileFamily::SmoothedCheckerboard: return "smoothed_checkerboard";
    }
    return "?";
}

ProfileFamily profile_family_from_string(const std::string& s) {
    if (s == "constant") return ProfileFamily::Constant;
    if (s == "trig") return ProfileFamily::Trig;
    if (s == "checkerboard") return ProfileFamily::Checkerboard;
    if (s == "smoothed_checkerboard") return ProfileFamily::SmoothedCheckerboard;
    throw std::invalid_argument("unknown profile family: " + s);
}

} // namespace homog
