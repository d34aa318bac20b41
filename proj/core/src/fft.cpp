#include "fswc/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numeric>

namespace fswc {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft::RealFft(std::vector<int> dims) : dims_(std::move(dims)) {
    n_real_ = 1;
    for (int d : dims_) n_real_ *= static_cast<std::size_t>(d);
    n_spec_ = n_real_ / dims_.back() * (dims_.back() / 2 + 1);
    real_ = static_cast<Real*>(fftw_malloc(sizeof(Real) * n_real_));
    spec_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * n_spec_));
    std::lock_guard<std::mutex> lk(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c(static_cast<int>(dims_.size()), dims_.data(), real_,
                                  reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r(static_cast<int>(dims_.size()), dims_.data(),
                                  reinterpret_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw Error("RealFft: planning failed");
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_);
    fftw_free(spec_);
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void RealFft::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

ComplexFft::ComplexFft(std::vector<int> dims) : dims_(std::move(dims)) {
    n_ = 1;
    for (int d : dims_) n_ *= static_cast<std::size_t>(d);
    buf_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * n_));
    std::lock_guard<std::mutex> lk(planner_mutex());
    plan_fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(),
                              reinterpret_cast<fftw_complex*>(buf_),
                              reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(),
                              reinterpret_cast<fftw_complex*>(buf_),
                              reinterpret_cast<fftw_complex*>(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw Error("ComplexFft: planning failed");
}

ComplexFft::~ComplexFft() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_);
}

void ComplexFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void ComplexFft::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

}  // namespace fswc
