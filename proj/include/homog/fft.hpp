#pragma once

#include "homog/grid.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace homog {

/// Complex DFT on the grid (1d length n, or 2d n x n, row-major), backed by
/// FFTW. Plan creation is serialized internally; transforms are reentrant.
class Fft {
  public:
    explicit Fft(const Grid& grid);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    /// Unnormalized forward DFT.
    void forward(const std::complex<double>* in, std::complex<double>* out) const;
    /// Unnormalized backward DFT; forward then backward multiplies by N.
    void backward(const std::complex<double>* in, std::complex<double>* out) const;

    std::size_t size() const { return n_total_; }

  private:
    std::size_t n_total_;
    void* plan_fwd_;
    void* plan_bwd_;
};

/// Circular convolution on the grid: out(x) = sum_y w(x-y) v(y).
/// `what` is the forward DFT of w; scratch buffers are managed internally.
class Convolver {
  public:
    Convolver(const Grid& grid, const std::vector<double>& weights);

    void convolve(const std::vector<double>& v, std::vector<double>& out) const;

  private:
    Grid grid_;
    std::shared_ptr<Fft> fft_;
    std::vector<std::complex<double>> what_;
};

} // namespace homog
