#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "homog/harness.hpp"
#include "homog/limit.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace homog;

namespace {

// plain composite-Simpson oracle for int_R 2 (1 - cos z) |z|^{-2} dz,
// computed on the half line (even integrand) and doubled, with the
// analytic tail 2/Z + 2 sin(Z)/Z^2 + O(Z^{-2}) made explicit
double oracle_c1_1d_alpha1() {
    const double Z = 100000.0;
    const long n = 10000000; // even
    const double h = Z / n;
    auto f = [](double z) {
        if (z < 1e-4) return 1.0 - z * z / 12.0; // series near zero
        return 2.0 * (1.0 - std::cos(z)) / (z * z);
    };
    double sum = f(0.0) + f(Z);
    for (long i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    const double head = sum * h / 3.0;
    const double tail = 2.0 / Z + 2.0 * std::sin(Z) / (Z * Z);
    return 2.0 * (head + tail);
}

// closed form via the Gamma function, an entirely separate route:
//   C1(d,a) = 2 pi^{d/2} |Gamma(-a/2)| / (2^a Gamma((d+a)/2))
double closed_form_c1(int d, double a) {
    const double gneg = std::tgamma(1.0 - 0.5 * a) / (0.5 * a); // |Gamma(-a/2)|
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) * gneg /
           (std::pow(2.0, a) * std::tgamma(0.5 * (d + a)));
}

// 2d symbol at an explicit unit vector xi, reduced to a plain angular
// Simpson integral times a radial Simpson integral (independent code path)
double oracle_c1_2d(double a, double angle) {
    const double xi0 = std::cos(angle), xi1 = std::sin(angle);
    const int na = 20000;
    const double ha = 2.0 * std::numbers::pi / na;
    auto angular = [&](double phi) {
        return std::pow(std::abs(xi0 * std::cos(phi) + xi1 * std::sin(phi)), a);
    };
    double asum = angular(0.0) + angular(2.0 * std::numbers::pi);
    for (int i = 1; i < na; ++i) asum += (i % 2 == 1 ? 4.0 : 2.0) * angular(i * ha);
    const double K = asum * ha / 3.0;

    // near field: substitute r = t^2 so (1 - cos r) r^{-1-a} dr turns into
    // 2 (1 - cos t^2) t^{-1-2a} dt, bounded and smooth on [0,1] for a < 2
    const long nt = 200000;
    const double ht = 1.0 / nt;
    auto near = [&](double t) {
        if (t < 1e-3) return std::pow(t, 3.0 - 2.0 * a) * (1.0 - t * t * t * t / 12.0);
        return 2.0 * (1.0 - std::cos(t * t)) * std::pow(t, -1.0 - 2.0 * a);
    };
    double nsum = near(0.0) + near(1.0);
    for (long i = 1; i < nt; ++i) nsum += (i % 2 == 1 ? 4.0 : 2.0) * near(i * ht);
    double J = nsum * ht / 3.0;

    const double Z = 50000.0;
    const long nr = 20000000;
    const double hr = (Z - 1.0) / nr;
    auto radial = [&](double r) {
        return (1.0 - std::cos(r)) * std::pow(r, -1.0 - a);
    };
    double rsum = radial(1.0) + radial(Z);
    for (long i = 1; i < nr; ++i) rsum += (i % 2 == 1 ? 4.0 : 2.0) * radial(1.0 + i * hr);
    J += rsum * hr / 3.0;
    J += std::pow(Z, -a) / a + std::sin(Z) * std::pow(Z, -1.0 - a); // tail
    return 2.0 * K * J;
}

} // namespace

TEST_CASE("C1(1,1) equals 2 pi against an independent oracle") {
    const double c1 = c1_constant(1, 1.0);
    CHECK(std::abs(c1 - 2.0 * std::numbers::pi) < 1e-8);
    CHECK(std::abs(c1 - oracle_c1_1d_alpha1()) < 1e-6);
}

TEST_CASE("C1 is stable under quadrature refinement") {
    for (int d : {1, 2})
        for (double a : {1.0, 1.25, 1.5, 1.75}) {
            const double coarse = c1_constant(d, a);
            const double fine = c1_constant(d, a, 1e-14, 400.0);
            CHECK(std::abs(coarse - fine) <= 1e-8 * coarse);
        }
}

TEST_CASE("C1 matches the Gamma closed form across the range") {
    for (int d : {1, 2})
        for (double a : {0.25, 0.75, 1.0, 1.5, 1.9})
            CHECK(c1_constant(d, a) ==
                  doctest::Approx(closed_form_c1(d, a)).epsilon(1e-9));
}

TEST_CASE("C1 diverges at both ends of the alpha range") {
    CHECK(c1_constant(1, 0.001) > 1e3);
    CHECK(c1_constant(1, 1.999) > 1e3);
    CHECK(c1_constant(1, 0.01) == doctest::Approx(closed_form_c1(1, 0.01)).epsilon(1e-9));
    CHECK(c1_constant(1, 1.99) == doctest::Approx(closed_form_c1(1, 1.99)).epsilon(1e-9));
}

TEST_CASE("C1 rejects alpha outside (0,2)") {
    CHECK_THROWS_AS(c1_constant(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(c1_constant(1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(c1_constant(3, 1.0), std::invalid_argument);
}

TEST_CASE("the 2d constant is direction independent") {
    const double a = 1.5;
    const double c1 = c1_constant(2, a);
    const double at_e0 = oracle_c1_2d(a, 0.0);
    const double at_tilt = oracle_c1_2d(a, 0.7);
    CHECK(std::abs(at_e0 - at_tilt) < 1e-6 * c1);
    CHECK(std::abs(c1 - at_e0) < 1e-5 * c1);
}

TEST_CASE("Fourier route: constants, single modes, Parseval") {
    const Grid grid(1, 2.0, 128);
    const EffectiveModel model = EffectiveModel::make(1, 1.5, 2.25, grid);
    const double lambda = 1.0;
    SUBCASE("constant data") {
        const GridFunction u = solve_limit_fourier(model, lambda, GridFunction(grid, 3.0));
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(u[i] == doctest::Approx(3.0 / lambda).epsilon(1e-12));
    }
    SUBCASE("single mode is an eigenfunction") {
        GridFunction f(grid);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = std::cos(2.0 * std::numbers::pi * grid.point(i)[0] / grid.L);
        const GridFunction u = solve_limit_fourier(model, lambda, f);
        const double mult =
            lambda + 0.5 * model.C1 * model.coefficient *
                         std::pow(2.0 * std::numbers::pi / grid.L, model.alpha);
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(u[i] == doctest::Approx(f[i] / mult).epsilon(1e-12));
    }
    SUBCASE("Parseval contraction") {
        const GridFunction f = make_bump(grid, {1.0, 0.0}, 0.2, 1.0);
        const GridFunction u = solve_limit_fourier(model, lambda, f);
        CHECK(l2_norm(u) <= l2_norm(f) / lambda);
    }
}

TEST_CASE("matched route basics") {
    const Grid grid(1, 2.0, 64);
    const EffectiveModel model = EffectiveModel::make(1, 1.5, 2.25, grid);
    SUBCASE("zero data") {
        const GridFunction u = solve_limit_matched(model, 1.0, GridFunction(grid));
        CHECK(l2_norm(u) == 0.0);
    }
    SUBCASE("contraction both routes") {
        const GridFunction f = make_bump(grid, {1.0, 0.0}, 0.2, 1.0);
        for (double lambda : {0.5, 1.0, 2.0}) {
            CHECK(l2_norm(solve_limit_fourier(model, lambda, f)) <=
                  l2_norm(f) / lambda);
            CHECK(l2_norm(solve_limit_matched(model, lambda, f)) <=
                  (1.0 + 1e-9) * l2_norm(f) / lambda);
        }
    }
}

TEST_CASE("the two routes agree and keep agreeing better") {
    struct Case {
        int d;
        double alpha;
    };
    for (const Case c : {Case{1, 1.5}, Case{2, 1.5}, Case{1, 1.0}}) {
        double prev = 1e300;
        for (int n : {64, 128, 256}) {
            const Grid grid(c.d, 2.0, n);
            const GridFunction f = make_bump(grid, {1.0, 1.0}, 0.2, 1.0);
            const EffectiveModel model = EffectiveModel::make(c.d, c.alpha, 2.25, grid);
            const GridFunction uf = solve_limit_fourier(model, 1.0, f);
            const GridFunction um = solve_limit_matched(model, 1.0, f);
            GridFunction diff(grid);
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = uf[i] - um[i];
            const double rel = l2_norm(diff) / l2_norm(uf);
            if (c.d == 1 && c.alpha == 1.5 && n == 128) CHECK(rel <= 0.03);
            CHECK(rel < prev);
            prev = rel;
        }
    }
}
