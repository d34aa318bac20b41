#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fswc/common.hpp"

namespace fswc {

/// d-dimensional real<->half-complex FFT on a fixed grid. Plans use
/// FFTW_ESTIMATE so the algorithm choice (and hence rounding) is identical
/// across runs and thread counts. Buffers are owned; not thread-safe, create
/// one per worker.
class RealFft {
  public:
    explicit RealFft(std::vector<int> dims);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t n_real() const { return n_real_; }
    std::size_t n_spec() const { return n_spec_; }

    Real* real_data() { return real_; }
    Complex* spec_data() { return spec_; }

    /// real_data -> spec_data, unnormalized sum convention.
    void forward();
    /// spec_data -> real_data, unnormalized (spec_data is destroyed).
    void backward();

  private:
    std::vector<int> dims_;
    std::size_t n_real_, n_spec_;
    Real* real_;
    Complex* spec_;
    void* plan_fwd_;
    void* plan_bwd_;
};

/// d-dimensional complex FFT, same conventions.
class ComplexFft {
  public:
    explicit ComplexFft(std::vector<int> dims);
    ~ComplexFft();
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::size_t size() const { return n_; }
    Complex* data() { return buf_; }

    void forward();   ///< in place, e^{-i} convention, unnormalized
    void backward();  ///< in place, e^{+i} convention, unnormalized

  private:
    std::vector<int> dims_;
    std::size_t n_;
    Complex* buf_;
    void* plan_fwd_;
    void* plan_bwd_;
};

}  // namespace fswc
