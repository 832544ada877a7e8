#include "homog/environment.hpp"

#include "homog/quadrature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace homog {

void EnvironmentSpec::validate() const {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("EnvironmentSpec: dimension must be 1 or 2");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("EnvironmentSpec: alpha must lie in (0,2)");
    if (!(period > 0.0))
        throw std::invalid_argument("EnvironmentSpec: cell period must be positive");
    if (!(theta0 > 0.0))
        throw std::invalid_argument("EnvironmentSpec: theta0 must be positive");
    if (drift_amplitude < 0.0)
        throw std::invalid_argument("EnvironmentSpec: drift_amplitude must be nonnegative");
    if (profile_min_sampled(mu, dimension, period) < theta0)
        throw std::invalid_argument(
            "EnvironmentSpec: mu profile drops below theta0 on the cell");
    if (drift_amplitude > 0.0) {
        if (dimension != 2)
            throw std::invalid_argument(
                "EnvironmentSpec: nonzero drift requires dimension 2 "
                "(no nontrivial antisymmetric stream matrix in 1d)");
        if (!stream01.differentiable())
            throw std::invalid_argument(
                "EnvironmentSpec: stream profiles must be differentiable "
                "(checkerboard streams are disallowed)");
    }
}

SampledEnvironment SampledEnvironment::shifted_by(const std::array<double, 2>& y) const {
    SampledEnvironment out = *this;
    for (int k = 0; k < spec.dimension; ++k)
        out.shift[k] = wrap(shift[k] + y[k], spec.period);
    return out;
}

SampledEnvironment sample_environment(const EnvironmentSpec& spec, std::uint64_t seed) {
    spec.validate();
    SampledEnvironment env;
    env.spec = spec;
    env.seed = seed;
    std::mt19937_64 rng(seed);
    for (int k = 0; k < spec.dimension; ++k) {
        // 53-bit uniform in [0,1); portable across library implementations.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        env.shift[k] = u * spec.period;
    }
    return env;
}

namespace {

std::array<double, 2> shifted_point(const SampledEnvironment& env,
                                    const std::array<double, 2>& x) {
    std::array<double, 2> y = {0.0, 0.0};
    for (int k = 0; k < env.spec.dimension; ++k)
        y[k] = wrap(x[k] + env.shift[k], env.spec.period);
    return y;
}

} // namespace

double mu_at(const SampledEnvironment& env, const std::array<double, 2>& x) {
    return profile_value(env.spec.mu, env.spec.dimension, env.spec.period,
                         shifted_point(env, x));
}

std::array<std::array<double, 2>, 2> stream_at(const SampledEnvironment& env,
                                               const std::array<double, 2>& x) {
    std::array<std::array<double, 2>, 2> H = {{{0.0, 0.0}, {0.0, 0.0}}};
    if (env.spec.dimension == 2 && env.spec.drift_amplitude != 0.0) {
        const double v = env.spec.drift_amplitude *
                         profile_value(env.spec.stream01, 2, env.spec.period,
                                       shifted_point(env, x));
        H[0][1] = v;
        H[1][0] = -v;
    }
    return H;
}

std::array<double, 2> drift_at(const SampledEnvironment& env,
                               const std::array<double, 2>& x) {
    std::array<double, 2> b = {0.0, 0.0};
    if (env.spec.dimension != 2 || env.spec.drift_amplitude == 0.0) return b;
    const auto grad = profile_gradient(env.spec.stream01, 2, env.spec.period,
                                       shifted_point(env, x));
    // b_0 = d_1 H_{01}, b_1 = d_0 H_{10} = -d_0 H_{01}.
    b[0] = env.spec.drift_amplitude * grad[1];
    b[1] = -env.spec.drift_amplitude * grad[0];
    return b;
}

DivergenceReport check_divergence_free(const SampledEnvironment& env,
                                       int grid_resolution, double tol) {
    const int d = env.spec.dimension;
    const double P = env.spec.period;
    const int n = grid_resolution;
    const double h = P / n;
    double maxdiv = 0.0;
    const int n1 = (d == 2) ? n : 1;
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i0 = 0; i0 < n; ++i0) {
            const std::array<double, 2> x = {i0 * h, i1 * h};
            double div = 0.0;
            for (int j = 0; j < d; ++j) {
                std::array<double, 2> xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                div += (drift_at(env, xp)[j] - drift_at(env, xm)[j]) / (2.0 * h);
            }
            maxdiv = std::max(maxdiv, std::abs(div));
        }
    }
    DivergenceReport rep;
    rep.max_abs_divergence = maxdiv;
    rep.tol = tol;
    rep.grid_resolution = n;
    rep.pass = maxdiv <= tol;
    return rep;
}

double cell_average(const EnvironmentSpec& spec, int moment) {
    return profile_moment(spec.mu, spec.dimension, spec.period, moment);
}

double window_average_mu(const SampledEnvironment& env, int power, double eps,
                         const std::array<double, 2>& lo,
                         const std::array<double, 2>& hi) {
    const int d = env.spec.dimension;
    const double cell = eps * env.spec.period; // one oscillation per tile
    auto f1 = [&](double x) {
        const double v = mu_at(env, {x / eps, 0.0});
        return power == 1 ? v : v * v;
    };
    if (d == 1) {
        double total = 0.0;
        double a = lo[0];
        while (a < hi[0] - 1e-14 * (hi[0] - lo[0])) {
            const double b = std::min(a + cell, hi[0]);
            total += integrate(f1, a, b, 1e-13 * cell).value;
            a = b;
        }
        return total / (hi[0] - lo[0]);
    }
    auto f2 = [&](double x, double y) {
        const double v = mu_at(env, {x / eps, y / eps});
        return power == 1 ? v : v * v;
    };
    double total = 0.0;
    double ax = lo[0];
    while (ax < hi[0] - 1e-14) {
        const double bx = std::min(ax + cell, hi[0]);
        double ay = lo[1];
        while (ay < hi[1] - 1e-14) {
            const double by = std::min(ay + cell, hi[1]);
            total += integrate2d(f2, ax, bx, ay, by, 1e-12 * cell * cell).value;
            ay = by;
        }
        ax = bx;
    }
    return total / ((hi[0] - lo[0]) * (hi[1] - lo[1]));
}

} // namespace homog
