#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "homog/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
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

EnvironmentSpec sinsin_2d(double amp) {
    EnvironmentSpec spec;
    spec.dimension = 2;
    spec.alpha = 1.5;
    spec.period = 1.0;
    spec.theta0 = 0.5;
    spec.mu = ProfileSpec::constant(1.0);
    spec.drift_amplitude = amp;
    spec.stream01.family = ProfileFamily::Trig;
    spec.stream01.base = 0.0;
    spec.stream01.terms = {{1.0, {TrigKind::Sin, TrigKind::Sin}, {1, 1}}};
    return spec;
}

} // namespace

TEST_CASE("sampling is deterministic in the seed") {
    const EnvironmentSpec spec = trig_1d();
    const SampledEnvironment a = sample_environment(spec, 42);
    const SampledEnvironment b = sample_environment(spec, 42);
    CHECK(a.shift[0] == b.shift[0]);
    CHECK(a.shift[1] == b.shift[1]);
    const SampledEnvironment c = sample_environment(spec, 43);
    CHECK(a.shift[0] != c.shift[0]);
}

TEST_CASE("shift lies in the cell") {
    EnvironmentSpec spec = trig_1d();
    for (std::uint64_t s = 0; s < 200; ++s) {
        const SampledEnvironment env = sample_environment(spec, s);
        CHECK(env.shift[0] >= 0.0);
        CHECK(env.shift[0] < 1.0);
    }
    spec.period = 2.5;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const SampledEnvironment env = sample_environment(spec, s);
        CHECK(env.shift[0] >= 0.0);
        CHECK(env.shift[0] < 2.5);
    }
}

TEST_CASE("shift distribution is uniform (Kolmogorov-Smirnov)") {
    const EnvironmentSpec spec = trig_1d();
    const int n = 10000;
    std::vector<double> shifts(n);
    for (int s = 0; s < n; ++s)
        shifts[s] = sample_environment(spec, static_cast<std::uint64_t>(s)).shift[0];
    std::sort(shifts.begin(), shifts.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = shifts[i];
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    // 1% critical value for the one-sample KS statistic
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mu_at evaluates profiles") {
    SUBCASE("constant") {
        EnvironmentSpec spec = trig_1d();
        spec.mu = ProfileSpec::constant(3.25);
        spec.theta0 = 1.0;
        const SampledEnvironment env = sample_environment(spec, 7);
        CHECK(mu_at(env, {0.123, 0.0}) == 3.25);
        CHECK(mu_at(env, {0.9, 0.0}) == 3.25);
    }
    SUBCASE("trig at zero shift") {
        SampledEnvironment env;
        env.spec = trig_1d();
        env.shift = {0.0, 0.0};
        CHECK(mu_at(env, {0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(mu_at(env, {0.25, 0.0}) == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(mu_at(env, {0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("checkerboard with shift") {
        SampledEnvironment env;
        env.spec = trig_1d();
        env.spec.mu.family = ProfileFamily::Checkerboard;
        env.spec.mu.low = 1.0;
        env.spec.mu.high = 2.0;
        env.shift = {0.25, 0.0};
        // x=0 lands at cell point 0.25, the first half-cell
        CHECK(mu_at(env, {0.0, 0.0}) == 1.0);
        // x=0.3 lands at 0.55, the second half-cell
        CHECK(mu_at(env, {0.3, 0.0}) == 2.0);
    }
}

TEST_CASE("drift of the sin*sin stream matches the hand derivative") {
    const SampledEnvironment env = [&] {
        SampledEnvironment e;
        e.spec = sinsin_2d(1.0);
        e.shift = {0.0, 0.0};
        return e;
    }();
    const double tp = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const double x0 = unif(rng), x1 = unif(rng);
        const auto b = drift_at(env, {x0, x1});
        CHECK(b[0] ==
              doctest::Approx(tp * std::sin(tp * x0) * std::cos(tp * x1)).epsilon(1e-12));
        CHECK(b[1] ==
              doctest::Approx(-tp * std::cos(tp * x0) * std::sin(tp * x1)).epsilon(1e-12));
    }
}

TEST_CASE("stream matrix is exactly antisymmetric") {
    const SampledEnvironment env = sample_environment(sinsin_2d(0.7), 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const auto H = stream_at(env, {unif(rng), unif(rng)});
        CHECK(H[0][0] == 0.0);
        CHECK(H[1][1] == 0.0);
        CHECK(H[0][1] + H[1][0] == 0.0);
    }
}

TEST_CASE("zero drift amplitude gives zero fields") {
    const SampledEnvironment env = sample_environment(sinsin_2d(0.0), 3);
    const auto H = stream_at(env, {0.37, 0.81});
    const auto b = drift_at(env, {0.37, 0.81});
    CHECK(H[0][1] == 0.0);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
}

TEST_CASE("discrete divergence of the drift is second-order small") {
    // the equal-frequency sin*sin stream is special: both centered-difference
    // terms pick up the same sinc factor and the discrete divergence cancels
    // to roundoff at any h
    const SampledEnvironment special = sample_environment(sinsin_2d(1.0), 19);
    CHECK(check_divergence_free(special, 64, 1e-10).pass);

    // a mixed-frequency stream shows the generic O(h^2) behaviour
    EnvironmentSpec spec = sinsin_2d(1.0);
    spec.stream01.terms = {{1.0, {TrigKind::Sin, TrigKind::Sin}, {1, 2}}};
    const SampledEnvironment env = sample_environment(spec, 19);
    const DivergenceReport r64 = check_divergence_free(env, 64, 1.0);
    const DivergenceReport r128 = check_divergence_free(env, 128, 1.0);
    CHECK(r64.max_abs_divergence < 0.5);
    const double ratio = r64.max_abs_divergence / r128.max_abs_divergence;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("cell averages: closed forms") {
    SUBCASE("constant") {
        EnvironmentSpec spec = trig_1d();
        spec.mu = ProfileSpec::constant(2.0);
        CHECK(cell_average(spec, 1) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(cell_average(spec, 2) == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("trig") {
        const EnvironmentSpec spec = trig_1d();
        CHECK(cell_average(spec, 1) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(cell_average(spec, 2) == doctest::Approx(2.375).epsilon(1e-12));
    }
    SUBCASE("checkerboard") {
        EnvironmentSpec spec = trig_1d();
        spec.mu.family = ProfileFamily::Checkerboard;
        spec.mu.low = 1.0;
        spec.mu.high = 2.0;
        CHECK(cell_average(spec, 1) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(cell_average(spec, 2) == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("translation covariance holds exactly on dyadic points") {
    // dyadic shifts and offsets make every add and wrap exact in binary
    const double y = 417.0 / 1024.0;
    std::vector<ProfileSpec> profiles;
    {
        ProfileSpec trig = trig_1d().mu;
        profiles.push_back(trig);
        ProfileSpec cb;
        cb.family = ProfileFamily::Checkerboard;
        cb.low = 1.0;
        cb.high = 2.0;
        profiles.push_back(cb);
        ProfileSpec sc;
        sc.family = ProfileFamily::SmoothedCheckerboard;
        sc.low = 1.0;
        sc.high = 2.0;
        sc.smoothing = 0.25;
        profiles.push_back(sc);
    }
    for (const ProfileSpec& p : profiles) {
        SampledEnvironment env;
        env.spec = trig_1d();
        env.spec.mu = p;
        env.spec.theta0 = 0.25;
        env.shift = {193.0 / 512.0, 0.0};
        const SampledEnvironment moved = env.shifted_by({y, 0.0});
        for (int i = 0; i < 64; ++i) {
            const double x = i / 64.0;
            CHECK(mu_at(env, {x + y, 0.0}) == mu_at(moved, {x, 0.0}));
        }
    }
}

TEST_CASE("mu stays above theta0 everywhere") {
    const EnvironmentSpec spec = trig_1d();
    const SampledEnvironment env = sample_environment(spec, 101);
    double lo = 1e300;
    for (int i = 0; i < 1000000; ++i) lo = std::min(lo, mu_at(env, {i / 1000000.0, 0.0}));
    CHECK(lo >= spec.theta0);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("expanding window averages approach the second moment") {
    const EnvironmentSpec spec = trig_1d();
    const SampledEnvironment env = sample_environment(spec, 13);
    const double target = cell_average(spec, 2);
    const double avg =
        window_average_mu(env, 2, 1.0, {0.37, 0.0}, {0.37 + 32.0, 0.0});
    CHECK(std::abs(avg - target) / target <= 0.02);
}

TEST_CASE("invalid specs are rejected by name") {
    SUBCASE("theta0") {
        EnvironmentSpec spec = trig_1d();
        spec.theta0 = 0.0;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("mu below theta0") {
        EnvironmentSpec spec = trig_1d();
        spec.theta0 = 1.25;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("drift in 1d") {
        EnvironmentSpec spec = trig_1d();
        spec.drift_amplitude = 1.0;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("non-differentiable stream") {
        EnvironmentSpec spec = sinsin_2d(1.0);
        spec.stream01.family = ProfileFamily::Checkerboard;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
}
