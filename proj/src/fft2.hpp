#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "oscswap/mat2.hpp"

namespace oscswap::detail {

/// In-place unnormalised 2D FFT pair bound to one 64-byte aligned buffer.
/// Plans are measured once per shape on scratch memory and shared.
class Fft2 {
 public:
  Fft2(int nx, int ny, cplx* buffer) : data_(reinterpret_cast<fftw_complex*>(buffer)) {
    std::lock_guard lock(mutex());
    auto& slot = cache()[{nx, ny}];
    if (!slot.first) {
      auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
      slot.first = fftw_plan_dft_2d(nx, ny, scratch, scratch, FFTW_FORWARD, FFTW_MEASURE);
      slot.second = fftw_plan_dft_2d(nx, ny, scratch, scratch, FFTW_BACKWARD, FFTW_MEASURE);
      fftw_free(scratch);
    }
    forward_ = slot.first;
    backward_ = slot.second;
  }

  void forward() { fftw_execute_dft(forward_, data_, data_); }
  void backward() { fftw_execute_dft(backward_, data_, data_); }

 private:
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  static std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_plan>>& cache() {
    static std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_plan>> plans;
    return plans;
  }
  fftw_complex* data_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace oscswap::detail
