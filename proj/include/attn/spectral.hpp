#pragma once

#include <span>
#include <string>
#include <vector>

#include "attn/core.hpp"
#include "attn/formation.hpp"

namespace attn {

enum class WindowFunction { Blackman };

struct StftParams {
  double window_seconds = 4.0;  // w_L, valid range [2, 60]
  std::size_t shift_samples = 128;  // w_S, valid range [4, 1280]
  WindowFunction window = WindowFunction::Blackman;
  double sample_rate_hz = 128.0;

  /// w_L * fs; throws when not an integer.
  std::size_t window_samples() const;
  std::size_t num_raw_bins() const { return window_samples() / 2 + 1; }
  double bin_spacing_hz() const { return sample_rate_hz / static_cast<double>(window_samples()); }
  double frame_step_seconds() const { return static_cast<double>(shift_samples) / sample_rate_hz; }
  void validate() const;
};

/// Symmetric Blackman window: 0.42 - 0.5 cos(2 pi k/(n-1)) + 0.08 cos(4 pi k/(n-1)).
std::vector<double> blackman_window(std::size_t n);
std::vector<double> make_window(WindowFunction fn, std::size_t n);

/// floor((len - window) / shift) + 1, or 0 when the signal is shorter than a window.
std::size_t num_frames(std::size_t len, std::size_t window, std::size_t shift);

struct PowerFrames {
  Matrix power;                      // frames x one-sided bins
  std::vector<double> frame_end_times;  // seconds, (j * shift + window) / fs
};

/// One-sided periodogram-density STFT: |X_b|^2 / (fs * sum w^2), interior bins
/// doubled. Frames are processed in parallel; results do not depend on the
/// thread count.
PowerFrames stft_power(std::span<const double> signal, const StftParams& params);

/// Per-channel power spectrogram of one labeled trial. Layout is
/// [frame][channel][bin]; `band_lo`/`band_hi` give each bin's (lo, hi] edges.
struct Spectrogram {
  std::string subject_id;
  int trial_index = 0;
  std::vector<std::string> channel_labels;
  std::size_t num_frames = 0;
  std::size_t num_bins = 0;
  std::size_t num_channels = 0;
  std::vector<double> power;
  std::vector<double> frame_times;  // frame end, seconds from trial start
  double frame_step_seconds = 0.0;
  std::vector<double> freq_axis;  // bin centre, Hz
  std::vector<double> band_lo;
  std::vector<double> band_hi;
  std::vector<StateLabel> labels;  // per frame

  double& at(std::size_t frame, std::size_t bin, std::size_t channel) {
    return power[(frame * num_channels + channel) * num_bins + bin];
  }
  double at(std::size_t frame, std::size_t bin, std::size_t channel) const {
    return power[(frame * num_channels + channel) * num_bins + bin];
  }
};

/// Frame label is the label of the frame's last sample.
Spectrogram spectrogram(const LabeledRecording& rec, const StftParams& params);

namespace serial {
// Single-threaded reference implementations, kept for equivalence tests and benchmarks.
PowerFrames stft_power(std::span<const double> signal, const StftParams& params);
Spectrogram spectrogram(const LabeledRecording& rec, const StftParams& params);
}  // namespace serial

}  // namespace attn
