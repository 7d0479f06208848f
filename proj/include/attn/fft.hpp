#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace attn {

/// Complex FFT of a fixed length n >= 1, backed by FFTW estimate-mode plans.
/// A plan is immutable after construction and may be shared across threads;
/// results do not depend on which thread executes it.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  /// X[k] = sum_j x[j] exp(-2 pi i j k / n), computed out of place.
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  /// x[j] = (1/n) sum_k X[k] exp(+2 pi i j k / n).
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

/// Smallest 2^a 3^b 5^c that is >= n.
std::size_t next_smooth_size(std::size_t n);

}  // namespace attn
