#pragma once

#include <mutex>
#include <set>

#include <unsupported/Eigen/FFT>

#include "modspace/types.hpp"

namespace modspace::detail {

// Raw unnormalised DFTs on contiguous buffers:
//   forward  X_m = sum_n x_n e^{-2 pi i m n / N}
//   inverse  x_n = (1/N) sum_m X_m e^{+2 pi i m n / N}
// One Eigen::FFT per thread. Plan creation in the FFTW backend is not
// thread-safe, so the first use of each size is serialised.
class Dft {
 public:
  static Dft& local() {
    thread_local Dft instance;
    return instance;
  }

  void forward(Complex* dst, const Complex* src, Index n) {
    warm(n);
    fft_.fwd(dst, src, n);
  }

  void inverse(Complex* dst, const Complex* src, Index n) {
    warm(n);
    fft_.inv(dst, src, n);
  }

 private:
  Dft() = default;

  void warm(Index n) {
    if (warmed_.count(n)) return;
    static std::mutex planner;
    std::lock_guard lock(planner);
    CVector a = CVector::Zero(n), b(n);
    fft_.fwd(b.data(), a.data(), n);
    fft_.inv(a.data(), b.data(), n);
    warmed_.insert(n);
  }

  Eigen::FFT<double> fft_;
  std::set<Index> warmed_;
};

}  // namespace modspace::detail
