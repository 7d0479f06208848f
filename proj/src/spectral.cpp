#include "attn/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "attn/fft.hpp"
#include "attn/text.hpp"

namespace attn {

std::size_t StftParams::window_samples() const {
  const double n = window_seconds * sample_rate_hz;
  const double rounded = std::round(n);
  if (!std::isfinite(n) || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw ValidationError("w_L * fs = " + format_double(n) + " is not an integer number of samples");
  return static_cast<std::size_t>(rounded);
}

void StftParams::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ValidationError("sample rate must be positive");
  if (!(window_seconds >= 2.0 && window_seconds <= 60.0))
    throw ValidationError("w_L = " + format_double(window_seconds) + " s is outside [2, 60]");
  const std::size_t win = window_samples();
  if (win < 2) throw ValidationError("window must span at least 2 samples");
  if (shift_samples < 4 || shift_samples > 1280)
    throw ValidationError("w_S = " + std::to_string(shift_samples) + " samples is outside [4, 1280]");
}

std::vector<double> blackman_window(std::size_t n) {
  if (n < 2) throw ValidationError("Blackman window needs n >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / denom;
    w[k] = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * x) + 0.08 * std::cos(4.0 * std::numbers::pi * x);
  }
  // Pin the exact values the symmetric form takes at its ends and centre.
  w.front() = 0.0;
  w.back() = 0.0;
  if (n % 2 == 1) w[n / 2] = 1.0;
  return w;
}

std::vector<double> make_window(WindowFunction fn, std::size_t n) {
  switch (fn) {
    case WindowFunction::Blackman: return blackman_window(n);
  }
  throw ValidationError("unknown window function");
}

std::size_t num_frames(std::size_t len, std::size_t window, std::size_t shift) {
  if (shift == 0) throw ValidationError("shift must be positive");
  if (len < window) return 0;
  return (len - window) / shift + 1;
}

namespace {

struct StftKernel {
  std::size_t window;
  std::size_t shift;
  std::size_t bins;
  std::vector<double> taper;
  double scale;
  FftPlan plan;

  explicit StftKernel(const StftParams& params)
      : window(params.window_samples()),
        shift(params.shift_samples),
        bins(window / 2 + 1),
        taper(make_window(params.window, window)),
        scale(0.0),
        plan(window) {
    double sum_sq = 0.0;
    for (double w : taper) sum_sq += w * w;
    scale = 1.0 / (params.sample_rate_hz * sum_sq);
  }

  struct Scratch {
    std::vector<std::complex<double>> in, out;
    explicit Scratch(std::size_t n) : in(n), out(n) {}
  };

  /// Power of the frame starting at `x` (strided by `stride` doubles).
  void frame(const double* x, std::size_t stride, Scratch& s, double* out) const {
    for (std::size_t k = 0; k < window; ++k) s.in[k] = {x[k * stride] * taper[k], 0.0};
    plan.forward(s.in, s.out);
    for (std::size_t b = 0; b < bins; ++b) {
      const double p = std::norm(s.out[b]) * scale;
      const bool unpaired = b == 0 || (window % 2 == 0 && b == window / 2);
      out[b] = unpaired ? p : 2.0 * p;
    }
  }
};

PowerFrames prepare(std::span<const double> signal, const StftParams& params, const StftKernel& kernel) {
  const std::size_t frames = num_frames(signal.size(), kernel.window, kernel.shift);
  if (frames == 0)
    throw ValidationError("signal of " + std::to_string(signal.size()) + " samples is shorter than one window (" +
                          std::to_string(kernel.window) + ")");
  PowerFrames out;
  out.power = Matrix(frames, kernel.bins);
  out.frame_end_times.resize(frames);
  for (std::size_t j = 0; j < frames; ++j)
    out.frame_end_times[j] = static_cast<double>(j * kernel.shift + kernel.window) / params.sample_rate_hz;
  return out;
}

Spectrogram prepare(const LabeledRecording& rec, const StftParams& params, const StftKernel& kernel) {
  const auto& raw = rec.recording;
  if (raw.sample_rate_hz != params.sample_rate_hz)
    throw ValidationError("STFT sample rate " + format_double(params.sample_rate_hz) +
                          " Hz does not match the recording (" + format_double(raw.sample_rate_hz) + " Hz)");
  const std::size_t frames = num_frames(raw.num_samples(), kernel.window, kernel.shift);
  if (frames == 0)
    throw ValidationError(raw.subject_id + "/trial " + std::to_string(raw.trial_index) +
                          ": recording shorter than one STFT window");
  Spectrogram sg;
  sg.subject_id = raw.subject_id;
  sg.trial_index = raw.trial_index;
  sg.channel_labels = raw.channel_labels;
  sg.num_frames = frames;
  sg.num_bins = kernel.bins;
  sg.num_channels = raw.num_channels();
  sg.power.assign(frames * sg.num_bins * sg.num_channels, 0.0);
  sg.frame_step_seconds = params.frame_step_seconds();
  sg.frame_times.resize(frames);
  sg.labels.resize(frames);
  for (std::size_t j = 0; j < frames; ++j) {
    const std::size_t last = j * kernel.shift + kernel.window - 1;
    sg.frame_times[j] = static_cast<double>(last + 1) / params.sample_rate_hz;
    sg.labels[j] = rec.labels[last];
  }
  const double df = params.bin_spacing_hz();
  sg.freq_axis.resize(sg.num_bins);
  sg.band_lo.resize(sg.num_bins);
  sg.band_hi.resize(sg.num_bins);
  for (std::size_t b = 0; b < sg.num_bins; ++b) {
    sg.freq_axis[b] = static_cast<double>(b) * df;
    sg.band_lo[b] = (static_cast<double>(b) - 0.5) * df;
    sg.band_hi[b] = (static_cast<double>(b) + 0.5) * df;
  }
  return sg;
}

}  // namespace

PowerFrames stft_power(std::span<const double> signal, const StftParams& params) {
  params.validate();
  const StftKernel kernel(params);
  auto out = prepare(signal, params, kernel);
  const auto frames = static_cast<std::ptrdiff_t>(out.power.rows);
#pragma omp parallel
  {
    StftKernel::Scratch scratch(kernel.window);
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < frames; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      kernel.frame(signal.data() + ju * kernel.shift, 1, scratch, out.power.row(ju).data());
    }
  }
  return out;
}

Spectrogram spectrogram(const LabeledRecording& rec, const StftParams& params) {
  params.validate();
  const StftKernel kernel(params);
  auto sg = prepare(rec, params, kernel);
  const auto& samples = rec.recording.samples;
  const auto work = static_cast<std::ptrdiff_t>(sg.num_frames * sg.num_channels);
#pragma omp parallel
  {
    StftKernel::Scratch scratch(kernel.window);
#pragma omp for schedule(static)
    for (std::ptrdiff_t item = 0; item < work; ++item) {
      const auto j = static_cast<std::size_t>(item) / sg.num_channels;
      const auto c = static_cast<std::size_t>(item) % sg.num_channels;
      kernel.frame(samples.values.data() + j * kernel.shift * samples.cols + c, samples.cols, scratch, &sg.at(j, 0, c));
    }
  }
  return sg;
}

namespace serial {

PowerFrames stft_power(std::span<const double> signal, const StftParams& params) {
  params.validate();
  const StftKernel kernel(params);
  auto out = prepare(signal, params, kernel);
  StftKernel::Scratch scratch(kernel.window);
  for (std::size_t j = 0; j < out.power.rows; ++j)
    kernel.frame(signal.data() + j * kernel.shift, 1, scratch, out.power.row(j).data());
  return out;
}

Spectrogram spectrogram(const LabeledRecording& rec, const StftParams& params) {
  params.validate();
  const StftKernel kernel(params);
  auto sg = prepare(rec, params, kernel);
  const auto& samples = rec.recording.samples;
  StftKernel::Scratch scratch(kernel.window);
  for (std::size_t c = 0; c < sg.num_channels; ++c)
    for (std::size_t j = 0; j < sg.num_frames; ++j)
      kernel.frame(samples.values.data() + j * kernel.shift * samples.cols + c, samples.cols, scratch, &sg.at(j, 0, c));
  return sg;
}

}  // namespace serial

}  // namespace attn
