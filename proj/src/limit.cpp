#include "homog/limit.hpp"

#include "homog/fft.hpp"
#include "homog/quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace homog {

namespace {

// 1 - cos r - r^2/2, series-evaluated near 0 to avoid cancellation.
double cos_remainder(double r) {
    if (r < 0.5) {
        const double r2 = r * r;
        // -r^4/24 + r^6/720 - r^8/40320 + r^10/3628800 - r^12/479001600
        double term = -r2 * r2 / 24.0;
        double acc = term;
        term *= -r2 / (5.0 * 6.0);
        acc += term;
        term *= -r2 / (7.0 * 8.0);
        acc += term;
        term *= -r2 / (9.0 * 10.0);
        acc += term;
        term *= -r2 / (11.0 * 12.0);
        acc += term;
        return acc;
    }
    return 1.0 - std::cos(r) - 0.5 * r * r;
}

// J(alpha) = int_0^inf (1 - cos r) r^{-1-alpha} dr.
double radial_integral(double alpha, double Z, double abs_tol) {
    QuadResult near = integrate(
        [&](double r) { return cos_remainder(r) * std::pow(r, -1.0 - alpha); }, 0.0, 1.0,
        0.1 * abs_tol);
    QuadResult mid = integrate(
        [&](double r) { return (1.0 - std::cos(r)) * std::pow(r, -1.0 - alpha); }, 1.0, Z,
        abs_tol);
    const double tail_const = std::pow(Z, -alpha) / alpha;
    const double tail_osc = oscillatory_tail(1.0 + alpha, Z).real();
    const double J = 0.5 / (2.0 - alpha) + near.value + mid.value + tail_const - tail_osc;
    const double est_err = near.error + mid.error;
    if (est_err > 1e-8 * std::abs(J))
        throw std::runtime_error(
            "c1_constant: quadrature stagnated; achieved absolute error " +
            std::to_string(est_err));
    return J;
}

} // namespace

double c1_constant(int d, double alpha, double abs_tol, double cutoff) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("c1_constant: alpha must lie in (0,2)");
    if (d != 1 && d != 2)
        throw std::invalid_argument("c1_constant: d must be 1 or 2");
    if (!(abs_tol > 0.0 && cutoff >= 100.0))
        throw std::invalid_argument("c1_constant: bad quadrature parameters");
    const double J = radial_integral(alpha, cutoff, abs_tol);
    double K = 1.0;
    if (d == 2) {
        // Angular reduction: int_R (1+t^2)^{-(2+alpha)/2} dt = 2 int_0^{pi/2} cos^a.
        K = 2.0 * integrate([&](double t) { return std::pow(std::cos(t), alpha); }, 0.0,
                            std::numbers::pi / 2.0, abs_tol)
                      .value;
    }
    return 4.0 * K * J;
}

EffectiveModel EffectiveModel::make(int d, double alpha, double coefficient,
                                    const Grid& grid) {
    if (!(coefficient > 0.0))
        throw std::invalid_argument("EffectiveModel: coefficient must be positive");
    EffectiveModel m;
    m.d = d;
    m.alpha = alpha;
    m.coefficient = coefficient;
    m.C1 = c1_constant(d, alpha);
    // Classical fractional-Laplacian normalization (documentation only).
    const double gneg = std::tgamma(1.0 - 0.5 * alpha) / (0.5 * alpha);
    m.C0 = std::pow(2.0, alpha) * std::tgamma(0.5 * (d + alpha)) /
           (std::pow(std::numbers::pi, 0.5 * d) * gneg);
    m.grid = grid;
    return m;
}

GridFunction solve_limit_fourier(const EffectiveModel& model, double lambda,
                                 const GridFunction& f) {
    const Grid& grid = model.grid;
    if (f.grid != grid) throw std::invalid_argument("solve_limit_fourier: grid mismatch");
    if (!(lambda > 0.0))
        throw std::invalid_argument("solve_limit_fourier: lambda must be positive");
    const std::size_t N = grid.size();
    const int n = grid.n;
    const double base = 2.0 * std::numbers::pi / grid.L;
    Fft fft(grid);
    std::vector<std::complex<double>> buf(f.values.begin(), f.values.end());
    std::vector<std::complex<double>> spec(N);
    fft.forward(buf.data(), spec.data());
    auto signed_mode = [n](int m) { return m <= n / 2 ? m : m - n; };
    for (std::size_t i = 0; i < N; ++i) {
        auto mm = grid.unflat(i);
        const double k0 = base * signed_mode(mm[0]);
        const double k1 = grid.d == 2 ? base * signed_mode(mm[1]) : 0.0;
        const double xi = std::sqrt(k0 * k0 + k1 * k1);
        const double mult =
            lambda + 0.5 * model.C1 * model.coefficient * std::pow(xi, model.alpha);
        spec[i] /= mult;
    }
    fft.backward(spec.data(), buf.data());
    GridFunction u(grid);
    const double s = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) u[i] = buf[i].real() * s;
    return u;
}

GridFunction solve_limit_matched(const EffectiveModel& model, double lambda,
                                 const GridFunction& f, double linear_tol) {
    EnvironmentSpec spec;
    spec.dimension = model.d;
    spec.alpha = model.alpha;
    spec.period = 1.0;
    const double mean_mu = std::sqrt(model.coefficient);
    spec.theta0 = 0.5 * mean_mu;
    spec.mu = ProfileSpec::constant(mean_mu);
    SampledEnvironment env = sample_environment(spec, 0);
    env.shift = {0.0, 0.0}; // constant field; the shift is immaterial

    ResolventProblem problem;
    problem.lambda = lambda;
    problem.f = f;
    problem.eps = 1.0;
    problem.env = env;
    problem.grid = model.grid;
    return solve_stage(problem, 0.0, 0.0, linear_tol);
}

} // namespace homog
