#include "attn/fft.hpp"

#include <fftw3.h>

#include <cstdint>
#include <mutex>

#include "attn/core.hpp"

namespace attn {

namespace {

// the FFTW planner is not re-entrant; execution is
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

}  // namespace

struct FftPlan::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(std::size_t n) {
    const std::lock_guard lock(planner_mutex());
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!forward || !backward) throw Error("FFTW could not plan a transform of length " + std::to_string(n));
  }

  ~Plans() {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw ValidationError("FFT length must be positive");
  if (n > static_cast<std::size_t>(INT32_MAX)) throw ValidationError("FFT length too large");
  plans_ = std::make_shared<const Plans>(n);
}

void FftPlan::forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_) throw ValidationError("FFT buffer length mismatch");
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
}

void FftPlan::inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_) throw ValidationError("FFT buffer length mismatch");
  fftw_execute_dft(plans_->backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : out) v *= scale;
}

std::size_t next_smooth_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = SIZE_MAX;
  for (std::size_t a = 1; a < 2 * n; a *= 2)
    for (std::size_t b = a; b < 2 * n; b *= 3)
      for (std::size_t c = b; c < 2 * n; c *= 5)
        if (c >= n && c < best) best = c;
  return best;
}

}  // namespace attn
