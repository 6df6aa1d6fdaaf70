#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bsq {

/// In-place complex DFT of a fixed size backed by FFTW.
///
/// Plans are created once (under a global lock, FFTW planning is not
/// thread-safe); executing a plan on different buffers from several threads
/// is safe.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }
  /// X_k = sum_j x_j exp(-2 pi i j k / n).
  void forward(std::vector<std::complex<double>>& data) const;
  /// Inverse transform including the 1/n factor.
  void inverse(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& values);

}  // namespace bsq
