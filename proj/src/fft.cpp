#include "homog/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace homog {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(const Grid& grid) : n_total_(grid.size()) {
    std::vector<std::complex<double>> buf(n_total_);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_UNALIGNED so plans work with any std::vector storage.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (grid.d == 1) {
        plan_fwd_ = fftw_plan_dft_1d(grid.n, p, p, FFTW_FORWARD, flags);
        plan_bwd_ = fftw_plan_dft_1d(grid.n, p, p, FFTW_BACKWARD, flags);
    } else {
        plan_fwd_ = fftw_plan_dft_2d(grid.n, grid.n, p, p, FFTW_FORWARD, flags);
        plan_bwd_ = fftw_plan_dft_2d(grid.n, grid.n, p, p, FFTW_BACKWARD, flags);
    }
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("Fft: plan creation failed");
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Fft::backward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

Convolver::Convolver(const Grid& grid, const std::vector<double>& weights)
    : grid_(grid), fft_(std::make_shared<Fft>(grid)) {
    if (weights.size() != grid.size())
        throw std::invalid_argument("Convolver: weight table size mismatch");
    std::vector<std::complex<double>> w(weights.begin(), weights.end());
    what_.resize(w.size());
    fft_->forward(w.data(), what_.data());
}

void Convolver::convolve(const std::vector<double>& v, std::vector<double>& out) const {
    const std::size_t N = grid_.size();
    if (v.size() != N)
        throw std::invalid_argument("Convolver: input size mismatch");
    std::vector<std::complex<double>> buf(v.begin(), v.end());
    std::vector<std::complex<double>> spec(N);
    fft_->forward(buf.data(), spec.data());
    for (std::size_t i = 0; i < N; ++i) spec[i] *= what_[i];
    fft_->backward(spec.data(), buf.data());
    out.resize(N);
    const double inv = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = buf[i].real() * inv;
}

} // namespace homog
