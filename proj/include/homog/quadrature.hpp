#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace homog {

/// Result of an adaptive quadrature: value and an error estimate.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1,1].
// Abscissae (positive half) and weights, Patterson's classic values.
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
QuadResult gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = hl * kronrod_x[i];
        double fv = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
        fk += kronrod_w[i] * fv;
        if (i % 2 == 1) fg += gauss_w[i / 2] * fv;
    }
    QuadResult r;
    r.value = fk * hl;
    r.error = std::abs((fk - fg) * hl);
    return r;
}

template <typename F>
void adapt(F&& f, double a, double b, double tol, int depth, QuadResult& acc) {
    QuadResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= 48) {
        acc.value += r.value;
        acc.error += r.error;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol, depth + 1, acc);
    adapt(f, c, b, 0.5 * tol, depth + 1, acc);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b].
template <typename F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
    QuadResult acc;
    detail::adapt(f, a, b, abs_tol, 0, acc);
    return acc;
}

/// Nested adaptive quadrature over the box [ax,bx] x [ay,by].
template <typename F>
QuadResult integrate2d(F&& f, double ax, double bx, double ay, double by,
                       double abs_tol = 1e-11) {
    auto outer = [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by,
                         abs_tol / std::max(1.0, bx - ax))
            .value;
    };
    return integrate(outer, ax, bx, abs_tol);
}

/// Oscillatory tail integral  int_Z^inf r^{-beta} e^{ir} dr  by repeated
/// integration by parts; remainder O(Z^{-beta-depth}). Requires Z >> beta.
inline std::complex<double> oscillatory_tail(double beta, double Z, int depth = 12) {
    if (Z < 4.0 * (beta + depth))
        throw std::invalid_argument("oscillatory_tail: Z too small for asymptotic series");
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> eiZ = std::exp(i * Z);
    // I(b) = i Z^{-b} e^{iZ} - i b I(b+1), truncated.
    std::complex<double> I(0.0, 0.0);
    for (int k = depth - 1; k >= 0; --k) {
        const double b = beta + k;
        I = i * std::pow(Z, -b) * eiZ - i * b * I;
    }
    return I;
}

} // namespace homog
