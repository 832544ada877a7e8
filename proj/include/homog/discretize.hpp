#pragma once

#include "homog/environment.hpp"
#include "homog/fft.hpp"
#include "homog/grid.hpp"

#include <memory>
#include <vector>

namespace homog {

struct AssemblyOptions {
    int images = 8;                    // far-field image count M per axis
    std::size_t max_points = 1u << 20; // refuse assemblies beyond this grid size
};

/// Periodized jump-kernel weight table: w[offset] = sum over lattice images
/// of |z + mL|^{-d-alpha} (image count `images` per axis) plus an analytic
/// integral tail estimate for the remainder. The zero offset is excluded and
/// the cells adjacent to the origin carry exact cell-averaged integrals of
/// the kernel instead of midpoint values.
struct WeightTable {
    Grid grid;
    double alpha = 0.0;
    int images = 0;
    double tail = 0.0;      // per-offset analytic tail contribution
    std::vector<double> w;  // size N, w[0] = 0
};

WeightTable periodized_kernel_table(const Grid& grid, double alpha,
                                    const AssemblyOptions& opts = {});

/// Shared, cached table (keyed by grid, alpha, image count).
std::shared_ptr<const WeightTable> cached_kernel_table(const Grid& grid, double alpha,
                                                       const AssemblyOptions& opts = {});

/// Symmetric nonlocal Dirichlet operator. As assembled, A0 is the generator
/// (negative semidefinite, A0*1 = 0); the quadratic form is <-A0 g, g>:
///   (A0 g)(x) = h^d sum_y kappa(x) kappa(y) w(x-y) (g(y) - g(x)),
/// with kappa(x) = mu(x/eps). Application is FFT-based (the kernel weight
/// depends only on x-y).
class DirichletOperator {
  public:
    DirichletOperator(const SampledEnvironment& env, double eps, const Grid& grid,
                      const AssemblyOptions& opts = {});
    /// Constant-coefficient variant (kappa identically `kappa_const`).
    DirichletOperator(double kappa_const, const Grid& grid, double alpha,
                      const AssemblyOptions& opts = {});
    /// Custom weight table (kernel-splitting diagnostics).
    DirichletOperator(std::vector<double> kappa, const Grid& grid,
                      std::shared_ptr<const WeightTable> table);

    void apply(const GridFunction& g, GridFunction& out) const;
    GridFunction apply(const GridFunction& g) const;

    /// Dirichlet form value E0[u,g] = <-A0 u, g>.
    double form(const GridFunction& u, const GridFunction& g) const;

    const Grid& grid() const { return grid_; }
    const std::vector<double>& kappa() const { return kappa_; }
    const WeightTable& table() const { return *table_; }
    /// Symbol of -A0 with kappa == 1, per DFT mode (real, >= 0); used for
    /// Fourier preconditioning.
    std::vector<double> unit_symbol() const;

  private:
    void init();
    Grid grid_;
    std::shared_ptr<const WeightTable> table_;
    std::vector<double> kappa_;
    std::unique_ptr<Convolver> conv_;
    std::vector<double> conv_w_kappa_; // conv(w, kappa), precomputed
};

/// Antisymmetric drift operator at truncation level k:
///   <Dk u, g>_h = -eps^{2-alpha} h^d sum_x sum_{j,l} eta_k(H_{jl}(x/eps))
///                  (D_l u)(x) (D_j g)(x),
/// D_j the centered difference. The pointwise cancellation of the
/// antisymmetric sum makes <Dk g, g> vanish identically.
class DriftOperator {
  public:
    /// k <= 0 means untruncated (eta = identity).
    DriftOperator(const SampledEnvironment& env, double eps, const Grid& grid, double k);

    void apply(const GridFunction& g, GridFunction& out) const;
    GridFunction apply(const GridFunction& g) const;
    bool is_zero() const { return zero_; }
    const std::vector<double>& eta_field() const { return eta_; }

  private:
    Grid grid_;
    double coeff_ = 0.0;      // eps^{2-alpha}
    bool zero_ = true;
    std::vector<double> eta_; // eta_k(H_{01}(x/eps))
};

/// Odd clamp eta_k: identity on [-k,k], cubic taper on k<|s|<2k, zero beyond.
double eta_clamp(double s, double k);

/// Discrete Laplacian G with <G g, g>_h = h^d sum_x sum_j |D_j^+ g|^2.
class ViscosityOperator {
  public:
    explicit ViscosityOperator(const Grid& grid) : grid_(grid) {}
    void apply(const GridFunction& g, GridFunction& out) const;
    GridFunction apply(const GridFunction& g) const;
    /// Symbol per DFT mode (real, >= 0).
    std::vector<double> symbol() const;

  private:
    Grid grid_;
};

struct KernelSplit {
    double I1 = 0.0; // |z| <= delta
    double I2 = 0.0; // delta < |z| < 1/delta
    double I3 = 0.0; // |z| >= 1/delta (includes the analytic tail)
};

/// The three partial bilinear forms of the jump-range decomposition;
/// I1 + I2 + I3 equals the full form pairing.
KernelSplit kernel_split_energies(const SampledEnvironment& env, double eps,
                                  const Grid& grid, const GridFunction& u,
                                  const GridFunction& g, double delta,
                                  const AssemblyOptions& opts = {});

} // namespace homog
