#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "attn/core.hpp"
#include "attn/spectral.hpp"

namespace attn {

struct BinningParams {
  double bin_size_hz = 0.5;
  double f_lo = 0.0;  // exclusive
  double f_hi = 18.0;  // inclusive

  std::size_t num_bins() const;
  void validate() const;
};

struct SmoothingParams {
  double span_seconds = 15.0;
};

inline constexpr double kDecibelFloor = 1e-12;

/// Groups raw bins into (f_lo + b*size, f_lo + (b+1)*size] bands; each output
/// value is the mean of its raw bins.
Spectrogram bin_frequencies(const Spectrogram& spec, const BinningParams& params);

/// Number of frames in the trailing window: max(1, round(span / frame step)).
std::size_t smoothing_frames(const SmoothingParams& params, double frame_step_seconds);

/// Causal trailing mean over the current and up to k-1 preceding frames.
Spectrogram running_average(const Spectrogram& spec, const SmoothingParams& params);

/// 10 log10(power + floor_eps).
Spectrogram to_decibels(const Spectrogram& spec, double floor_eps = kDecibelFloor);

struct Provenance {
  std::string subject_id;
  int trial_index = 0;
  double frame_time = 0.0;

  bool operator==(const Provenance&) const = default;
};

struct FeatureMatrix {
  Matrix rows;
  std::vector<StateLabel> labels;
  std::vector<Provenance> provenance;
  std::vector<std::string> feature_names;

  std::size_t num_rows() const { return rows.rows; }
  std::size_t num_features() const { return rows.cols; }
  std::vector<std::string> subjects() const;  // sorted, unique

  void append(const FeatureMatrix& other);
  FeatureMatrix subset(std::span<const std::size_t> indices) const;
  void validate() const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// "ch:<label>|band:<lo>-<hi>Hz"
std::string feature_name(const std::string& channel, double lo, double hi);

/// One row per frame, channel-major then ascending frequency.
FeatureMatrix flatten(const Spectrogram& spec);

struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> degenerate;  // std below 1e-12, replaced by 1
  std::string fitted_on;         // fingerprint of the training matrix
};

inline constexpr double kDegenerateStd = 1e-12;

/// Per-column mean and population standard deviation of the training rows.
Scaler fit_scaler(const FeatureMatrix& train);
FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& m);
std::string fingerprint(const FeatureMatrix& m);

// ---- FeatureMatrix CSV interchange ---------------------------------------
//
// Leading "# key=value" lines carry metadata (resolved config, input hash),
// then a header row of feature names followed by label,subject,trial,frame_time,
// then one row per frame.

using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_feature_matrix(const FeatureMatrix& m, std::ostream& out, const Metadata& meta = {});
void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path, const Metadata& meta = {});
FeatureMatrix read_feature_matrix(std::istream& in, Metadata* meta = nullptr);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path, Metadata* meta = nullptr);

}  // namespace attn
