#include "bsq/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace bsq {
namespace {

std::mutex& planner_lock() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::vector<std::complex<double>>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("DFT size must be positive");
  std::vector<std::complex<double>> scratch(n);
  const std::lock_guard<std::mutex> guard(planner_lock());
  const int size = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(size, as_fftw(scratch), as_fftw(scratch), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_1d(size, as_fftw(scratch), as_fftw(scratch), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft::~Fft() {
  const std::lock_guard<std::mutex> guard(planner_lock());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw std::invalid_argument("DFT buffer has the wrong size");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void Fft::inverse(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw std::invalid_argument("DFT buffer has the wrong size");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data), as_fftw(data));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace bsq
