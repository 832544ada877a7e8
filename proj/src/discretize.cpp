#include "homog/discretize.hpp"

#include "homog/quadrature.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace homog {

namespace {

int signed_offset(int o, int n) { return o <= n / 2 ? o : o - n; }

// Emits every image contribution of the periodized kernel for one offset:
// sink(|z_image|, value). The m = 0 term of the cells adjacent to the origin
// is the exact cell average of the kernel instead of the midpoint value.
template <typename Sink>
void emit_offset_terms_1d(int so, double h, double L, double alpha, int M, Sink&& sink) {
    for (int m = -M; m <= M; ++m) {
        const double z = so * h + m * L;
        if (m == 0 && std::abs(so) == 1) {
            // (1/h) int_{h/2}^{3h/2} r^{-1-alpha} dr, closed form.
            const double a = std::pow(0.5 * h, -alpha);
            const double b = std::pow(1.5 * h, -alpha);
            sink(std::abs(z), (a - b) / (alpha * h));
        } else {
            sink(std::abs(z), std::pow(std::abs(z), -(1.0 + alpha)));
        }
    }
}

double cell_integral_2d(double z0, double z1, double h, double alpha) {
    auto f = [&](double w0, double w1) {
        return std::pow(w0 * w0 + w1 * w1, -0.5 * (2.0 + alpha));
    };
    const double scale = std::pow(z0 * z0 + z1 * z1, -0.5 * (2.0 + alpha));
    const double tol = 1e-12 * scale * h * h;
    return integrate2d(f, z0 - 0.5 * h, z0 + 0.5 * h, z1 - 0.5 * h, z1 + 0.5 * h, tol)
               .value /
           (h * h);
}

template <typename Sink>
void emit_offset_terms_2d(int so0, int so1, double h, double L, double alpha, int M,
                          Sink&& sink) {
    const bool adjacent = std::max(std::abs(so0), std::abs(so1)) == 1;
    for (int m0 = -M; m0 <= M; ++m0) {
        for (int m1 = -M; m1 <= M; ++m1) {
            const double z0 = so0 * h + m0 * L;
            const double z1 = so1 * h + m1 * L;
            const double r = std::hypot(z0, z1);
            if (m0 == 0 && m1 == 0 && adjacent)
                sink(r, cell_integral_2d(z0, z1, h, alpha));
            else
                sink(r, std::pow(r, -(2.0 + alpha)));
        }
    }
}

double tail_per_offset(const Grid& grid, double alpha, int M) {
    const double R = (M + 0.5) * grid.L;
    if (grid.d == 1) return 2.0 * std::pow(R, -alpha) / (alpha * grid.L);
    const double c = integrate(
                         [&](double t) { return std::pow(1.0 + t * t, -0.5 * (2.0 + alpha)); },
                         0.0, 1.0, 1e-13)
                         .value;
    return 8.0 * c * std::pow(R, -alpha) / (alpha * grid.L * grid.L);
}

} // namespace

WeightTable periodized_kernel_table(const Grid& grid, double alpha,
                                    const AssemblyOptions& opts) {
    grid.validate();
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("periodized_kernel_table: alpha outside (0,2)");
    if (grid.size() > opts.max_points)
        throw std::runtime_error(
            "periodized_kernel_table: grid exceeds the configured point cap; "
            "raise AssemblyOptions::max_points to assemble this resolution");
    WeightTable t;
    t.grid = grid;
    t.alpha = alpha;
    t.images = opts.images;
    t.tail = tail_per_offset(grid, alpha, opts.images);
    t.w.assign(grid.size(), 0.0);
    const double h = grid.spacing();
    const int n = grid.n, M = opts.images;
    if (grid.d == 1) {
        for (int o = 1; o < n; ++o) {
            double acc = t.tail;
            emit_offset_terms_1d(signed_offset(o, n), h, grid.L, alpha, M,
                                 [&](double, double v) { acc += v; });
            t.w[o] = acc;
        }
    } else {
        for (int o1 = 0; o1 < n; ++o1) {
            for (int o0 = 0; o0 < n; ++o0) {
                if (o0 == 0 && o1 == 0) continue;
                double acc = t.tail;
                emit_offset_terms_2d(signed_offset(o0, n), signed_offset(o1, n), h,
                                     grid.L, alpha, M,
                                     [&](double, double v) { acc += v; });
                t.w[grid.flat(o0, o1)] = acc;
            }
        }
    }
    return t;
}

std::shared_ptr<const WeightTable> cached_kernel_table(const Grid& grid, double alpha,
                                                       const AssemblyOptions& opts) {
    using Key = std::tuple<int, double, int, double, int>;
    static std::map<Key, std::shared_ptr<const WeightTable>> cache;
    static std::mutex mtx;
    const Key key{grid.d, grid.L, grid.n, alpha, opts.images};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const WeightTable>(periodized_kernel_table(grid, alpha, opts));
    cache[key] = t;
    return t;
}

DirichletOperator::DirichletOperator(const SampledEnvironment& env, double eps,
                                     const Grid& grid, const AssemblyOptions& opts)
    : grid_(grid), table_(cached_kernel_table(grid, env.spec.alpha, opts)) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::invalid_argument("DirichletOperator: eps must lie in (0,1]");
    kappa_.resize(grid.size());
    for (std::size_t i = 0; i < kappa_.size(); ++i) {
        auto x = grid.point(i);
        kappa_[i] = mu_at(env, {x[0] / eps, x[1] / eps});
    }
    init();
}

DirichletOperator::DirichletOperator(double kappa_const, const Grid& grid, double alpha,
                                     const AssemblyOptions& opts)
    : grid_(grid),
      table_(cached_kernel_table(grid, alpha, opts)),
      kappa_(grid.size(), kappa_const) {
    init();
}

DirichletOperator::DirichletOperator(std::vector<double> kappa, const Grid& grid,
                                     std::shared_ptr<const WeightTable> table)
    : grid_(grid), table_(std::move(table)), kappa_(std::move(kappa)) {
    if (kappa_.size() != grid.size())
        throw std::invalid_argument("DirichletOperator: kappa size mismatch");
    init();
}

void DirichletOperator::init() {
    conv_ = std::make_unique<Convolver>(grid_, table_->w);
    conv_->convolve(kappa_, conv_w_kappa_);
}

void DirichletOperator::apply(const GridFunction& g, GridFunction& out) const {
    const std::size_t N = grid_.size();
    if (g.grid != grid_) throw std::invalid_argument("DirichletOperator: grid mismatch");
    // shifting g by a constant leaves A0 g unchanged; subtracting g[0] makes
    // constants map to exactly zero instead of FFT roundoff
    const double g0 = g[0];
    std::vector<double> kg(N);
    for (std::size_t i = 0; i < N; ++i) kg[i] = kappa_[i] * (g[i] - g0);
    std::vector<double> c;
    conv_->convolve(kg, c);
    out = GridFunction(grid_);
    const double hd = grid_.cell_volume();
    for (std::size_t i = 0; i < N; ++i)
        out[i] = kappa_[i] * hd * (c[i] - (g[i] - g0) * conv_w_kappa_[i]);
}

GridFunction DirichletOperator::apply(const GridFunction& g) const {
    GridFunction out;
    apply(g, out);
    return out;
}

double DirichletOperator::form(const GridFunction& u, const GridFunction& g) const {
    GridFunction Au = apply(u);
    double s = 0.0;
    for (std::size_t i = 0; i < Au.size(); ++i) s += Au[i] * g[i];
    return -grid_.cell_volume() * s;
}

std::vector<double> DirichletOperator::unit_symbol() const {
    const std::size_t N = grid_.size();
    Fft fft(grid_);
    std::vector<std::complex<double>> w(table_->w.begin(), table_->w.end());
    std::vector<std::complex<double>> what(N);
    fft.forward(w.data(), what.data());
    const double row_sum = what[0].real(); // DFT at 0 = sum of weights
    std::vector<double> sym(N);
    const double hd = grid_.cell_volume();
    for (std::size_t i = 0; i < N; ++i)
        sym[i] = std::max(0.0, hd * (row_sum - what[i].real()));
    return sym;
}

double eta_clamp(double s, double k) {
    const double a = std::abs(s);
    double v;
    if (a <= k) {
        v = a;
    } else if (a >= 2.0 * k) {
        v = 0.0;
    } else {
        const double t = (a - k) / k;
        v = k * (2.0 * t * t * t - 3.0 * t * t + 1.0); // cubic taper, |slope| <= 1.5
    }
    return s < 0.0 ? -v : v;
}

namespace {

// Centered difference along axis j, periodic.
void centered_diff(const Grid& g, const std::vector<double>& u, int j,
                   std::vector<double>& out) {
    const int n = g.n;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    out.resize(u.size());
    if (g.d == 1) {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1) % n, im = (i + n - 1) % n;
            out[i] = (u[ip] - u[im]) * inv2h;
        }
        return;
    }
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i0 = 0; i0 < n; ++i0) {
            std::size_t ip, im;
            if (j == 0) {
                ip = g.flat((i0 + 1) % n, i1);
                im = g.flat((i0 + n - 1) % n, i1);
            } else {
                ip = g.flat(i0, (i1 + 1) % n);
                im = g.flat(i0, (i1 + n - 1) % n);
            }
            out[g.flat(i0, i1)] = (u[ip] - u[im]) * inv2h;
        }
    }
}

} // namespace

DriftOperator::DriftOperator(const SampledEnvironment& env, double eps, const Grid& grid,
                             double k)
    : grid_(grid) {
    const auto& spec = env.spec;
    if (spec.drift_amplitude == 0.0) return; // zero operator
    if (spec.dimension != 2 || grid.d != 2)
        throw std::invalid_argument("DriftOperator: active drift requires dimension 2");
    if (spec.alpha < 1.0)
        throw std::invalid_argument(
            "DriftOperator: drift requested with alpha < 1; the uniqueness regime "
            "requires alpha in [1,2) for drift-active problems");
    coeff_ = std::pow(eps, 2.0 - spec.alpha);
    eta_.resize(grid.size());
    bool any = false;
    for (std::size_t i = 0; i < eta_.size(); ++i) {
        auto x = grid.point(i);
        const double H01 = stream_at(env, {x[0] / eps, x[1] / eps})[0][1];
        eta_[i] = (k > 0.0) ? eta_clamp(H01, k) : H01;
        if (eta_[i] != 0.0) any = true;
    }
    zero_ = !any;
}

void DriftOperator::apply(const GridFunction& g, GridFunction& out) const {
    if (zero_) {
        out = GridFunction(g.grid);
        return;
    }
    if (g.grid != grid_) throw std::invalid_argument("DriftOperator: grid mismatch");
    // Dk u = eps^{2-alpha} [ D_0(eta D_1 u) - D_1(eta D_0 u) ].
    std::vector<double> d0u, d1u;
    centered_diff(grid_, g.values, 0, d0u);
    centered_diff(grid_, g.values, 1, d1u);
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        a[i] = eta_[i] * d1u[i];
        b[i] = eta_[i] * d0u[i];
    }
    std::vector<double> da, db;
    centered_diff(grid_, a, 0, da);
    centered_diff(grid_, b, 1, db);
    out = GridFunction(grid_);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = coeff_ * (da[i] - db[i]);
}

GridFunction DriftOperator::apply(const GridFunction& g) const {
    GridFunction out;
    apply(g, out);
    return out;
}

void ViscosityOperator::apply(const GridFunction& g, GridFunction& out) const {
    if (g.grid != grid_) throw std::invalid_argument("ViscosityOperator: grid mismatch");
    const int n = grid_.n;
    const double invh2 = 1.0 / (grid_.spacing() * grid_.spacing());
    out = GridFunction(grid_);
    if (grid_.d == 1) {
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1) % n, im = (i + n - 1) % n;
            out[i] = (2.0 * g[i] - g[ip] - g[im]) * invh2;
        }
        return;
    }
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i0 = 0; i0 < n; ++i0) {
            const std::size_t c = grid_.flat(i0, i1);
            out[c] = (4.0 * g[c] - g[grid_.flat((i0 + 1) % n, i1)] -
                      g[grid_.flat((i0 + n - 1) % n, i1)] -
                      g[grid_.flat(i0, (i1 + 1) % n)] -
                      g[grid_.flat(i0, (i1 + n - 1) % n)]) *
                     invh2;
        }
    }
}

GridFunction ViscosityOperator::apply(const GridFunction& g) const {
    GridFunction out;
    apply(g, out);
    return out;
}

std::vector<double> ViscosityOperator::symbol() const {
    const int n = grid_.n;
    const double invh2 = 1.0 / (grid_.spacing() * grid_.spacing());
    std::vector<double> axis(n);
    for (int m = 0; m < n; ++m)
        axis[m] = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * m / n)) * invh2;
    std::vector<double> sym(grid_.size());
    if (grid_.d == 1) return axis;
    for (int m1 = 0; m1 < n; ++m1)
        for (int m0 = 0; m0 < n; ++m0) sym[grid_.flat(m0, m1)] = axis[m0] + axis[m1];
    return sym;
}

KernelSplit kernel_split_energies(const SampledEnvironment& env, double eps,
                                  const Grid& grid, const GridFunction& u,
                                  const GridFunction& g, double delta,
                                  const AssemblyOptions& opts) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("kernel_split_energies: delta must lie in (0,1)");
    if (!(1.0 / delta < grid.L / 2.0))
        throw std::invalid_argument("kernel_split_energies: need 1/delta < L/2");
    const double h = grid.spacing();
    const int n = grid.n, M = opts.images;
    auto bucket_tables = std::array<WeightTable, 3>{};
    for (auto& t : bucket_tables) {
        t.grid = grid;
        t.alpha = env.spec.alpha;
        t.images = M;
        t.w.assign(grid.size(), 0.0);
    }
    const double tail = tail_per_offset(grid, env.spec.alpha, M);
    auto classify = [&](double r) {
        if (r <= delta) return 0;
        if (r < 1.0 / delta) return 1;
        return 2;
    };
    if (grid.d == 1) {
        for (int o = 1; o < n; ++o) {
            emit_offset_terms_1d(signed_offset(o, n), h, grid.L, env.spec.alpha, M,
                                 [&](double r, double v) { bucket_tables[classify(r)].w[o] += v; });
            bucket_tables[2].w[o] += tail;
        }
    } else {
        for (int o1 = 0; o1 < n; ++o1) {
            for (int o0 = 0; o0 < n; ++o0) {
                if (o0 == 0 && o1 == 0) continue;
                const std::size_t idx = grid.flat(o0, o1);
                emit_offset_terms_2d(signed_offset(o0, n), signed_offset(o1, n), h,
                                     grid.L, env.spec.alpha, M,
                                     [&](double r, double v) {
                                         bucket_tables[classify(r)].w[idx] += v;
                                     });
                bucket_tables[2].w[idx] += tail;
            }
        }
    }
    std::vector<double> kappa(grid.size());
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        auto x = grid.point(i);
        kappa[i] = mu_at(env, {x[0] / eps, x[1] / eps});
    }
    KernelSplit out;
    double* slots[3] = {&out.I1, &out.I2, &out.I3};
    for (int b = 0; b < 3; ++b) {
        auto tbl = std::make_shared<const WeightTable>(std::move(bucket_tables[b]));
        DirichletOperator op(kappa, grid, tbl);
        *slots[b] = op.form(u, g);
    }
    return out;
}

} // namespace homog
