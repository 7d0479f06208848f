#include "attn/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "attn/text.hpp"

namespace attn {

std::size_t BinningParams::num_bins() const {
  return static_cast<std::size_t>(std::llround((f_hi - f_lo) / bin_size_hz));
}

void BinningParams::validate() const {
  if (!(bin_size_hz > 0.0)) throw ValidationError("bin size must be positive");
  if (!(f_lo >= 0.0 && f_hi > f_lo)) throw ValidationError("frequency range must satisfy 0 <= f_lo < f_hi");
  const double count = (f_hi - f_lo) / bin_size_hz;
  if (std::abs(count - std::round(count)) > 1e-9 * std::max(1.0, count))
    throw ValidationError("frequency range width is not a whole number of bins");
}

Spectrogram bin_frequencies(const Spectrogram& spec, const BinningParams& params) {
  params.validate();
  if (spec.num_bins < 2) throw ValidationError("spectrogram has too few frequency bins to bin");
  const double df = spec.freq_axis[1] - spec.freq_axis[0];
  const double ratio = params.bin_size_hz / df;
  const auto k = static_cast<std::size_t>(std::llround(ratio));
  if (k == 0 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio)
    throw ValidationError("bin size " + format_double(params.bin_size_hz) +
                          " Hz is not an integer multiple of the raw bin spacing " + format_double(df) + " Hz");
  const double lo_ratio = params.f_lo / df;
  const auto first = static_cast<std::size_t>(std::llround(lo_ratio));
  if (std::abs(lo_ratio - static_cast<double>(first)) > 1e-9 * std::max(1.0, lo_ratio))
    throw ValidationError("f_lo is not aligned with the raw bin grid");
  const std::size_t out_bins = params.num_bins();
  const double top = spec.freq_axis.back();
  if (params.f_hi > top + 1e-9 * top || first + out_bins * k >= spec.num_bins)
    throw ValidationError("f_hi = " + format_double(params.f_hi) + " Hz exceeds the Nyquist frequency " +
                          format_double(top) + " Hz");

  Spectrogram out;
  out.subject_id = spec.subject_id;
  out.trial_index = spec.trial_index;
  out.channel_labels = spec.channel_labels;
  out.num_frames = spec.num_frames;
  out.num_bins = out_bins;
  out.num_channels = spec.num_channels;
  out.frame_times = spec.frame_times;
  out.frame_step_seconds = spec.frame_step_seconds;
  out.labels = spec.labels;
  out.power.assign(out.num_frames * out.num_channels * out.num_bins, 0.0);
  out.freq_axis.resize(out_bins);
  out.band_lo.resize(out_bins);
  out.band_hi.resize(out_bins);
  for (std::size_t b = 0; b < out_bins; ++b) {
    out.band_lo[b] = params.f_lo + static_cast<double>(b) * params.bin_size_hz;
    out.band_hi[b] = params.f_lo + static_cast<double>(b + 1) * params.bin_size_hz;
    out.freq_axis[b] = 0.5 * (out.band_lo[b] + out.band_hi[b]);
  }
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t j = 0; j < out.num_frames; ++j)
    for (std::size_t c = 0; c < out.num_channels; ++c)
      for (std::size_t b = 0; b < out_bins; ++b) {
        double sum = 0.0;
        const std::size_t raw_begin = first + b * k + 1;
        for (std::size_t i = raw_begin; i < raw_begin + k; ++i) sum += spec.at(j, i, c);
        out.at(j, b, c) = sum * inv_k;
      }
  return out;
}

std::size_t smoothing_frames(const SmoothingParams& params, double frame_step_seconds) {
  if (!(params.span_seconds > 0.0)) throw ValidationError("smoothing span must be positive");
  if (!(frame_step_seconds > 0.0)) throw ValidationError("frame step must be positive");
  const auto k = std::llround(params.span_seconds / frame_step_seconds);
  return static_cast<std::size_t>(std::max<long long>(1, k));
}

Spectrogram running_average(const Spectrogram& spec, const SmoothingParams& params) {
  const std::size_t k = smoothing_frames(params, spec.frame_step_seconds);
  Spectrogram out = spec;
  const std::size_t width = spec.num_channels * spec.num_bins;
  std::vector<double> sum(width, 0.0);
  for (std::size_t j = 0; j < spec.num_frames; ++j) {
    const double* add = spec.power.data() + j * width;
    if (j >= k && j % k == 0) {
      // Periodic exact re-summation bounds rounding drift of the sliding sum.
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t f = j - k + 1; f <= j; ++f) {
        const double* row = spec.power.data() + f * width;
        for (std::size_t i = 0; i < width; ++i) sum[i] += row[i];
      }
    } else {
      for (std::size_t i = 0; i < width; ++i) sum[i] += add[i];
      if (j >= k) {
        const double* drop = spec.power.data() + (j - k) * width;
        for (std::size_t i = 0; i < width; ++i) sum[i] -= drop[i];
      }
    }
    const double inv = 1.0 / static_cast<double>(std::min(j + 1, k));
    double* dst = out.power.data() + j * width;
    for (std::size_t i = 0; i < width; ++i) dst[i] = sum[i] * inv;
  }
  return out;
}

Spectrogram to_decibels(const Spectrogram& spec, double floor_eps) {
  if (!(floor_eps > 0.0)) throw ValidationError("decibel floor must be positive");
  Spectrogram out = spec;
  for (auto& p : out.power) {
    if (p < 0.0) throw ValidationError("negative power cannot be converted to decibels");
    p = 10.0 * std::log10(p + floor_eps);
  }
  return out;
}

std::vector<std::string> FeatureMatrix::subjects() const {
  std::set<std::string> s;
  for (const auto& p : provenance) s.insert(p.subject_id);
  return {s.begin(), s.end()};
}

void FeatureMatrix::append(const FeatureMatrix& other) {
  if (rows.rows == 0 && feature_names.empty()) {
    *this = other;
    return;
  }
  if (other.feature_names != feature_names) throw ValidationError("cannot append feature matrices with different features");
  rows.values.insert(rows.values.end(), other.rows.values.begin(), other.rows.values.end());
  rows.rows += other.rows.rows;
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  provenance.insert(provenance.end(), other.provenance.begin(), other.provenance.end());
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.rows = select_rows(rows, indices);
  out.labels.reserve(indices.size());
  out.provenance.reserve(indices.size());
  for (auto i : indices) {
    out.labels.push_back(labels[i]);
    out.provenance.push_back(provenance[i]);
  }
  return out;
}

void FeatureMatrix::validate() const {
  if (labels.size() != rows.rows || provenance.size() != rows.rows)
    throw ValidationError("feature matrix row, label and provenance counts differ");
  if (feature_names.size() != rows.cols) throw ValidationError("feature name count does not match column count");
  for (double v : rows.values)
    if (!std::isfinite(v)) throw ValidationError("feature matrix contains a non-finite value");
}

std::string feature_name(const std::string& channel, double lo, double hi) {
  return "ch:" + channel + "|band:" + format_hz(lo) + "-" + format_hz(hi) + "Hz";
}

FeatureMatrix flatten(const Spectrogram& spec) {
  FeatureMatrix m;
  const std::size_t width = spec.num_channels * spec.num_bins;
  m.feature_names.reserve(width);
  for (std::size_t c = 0; c < spec.num_channels; ++c)
    for (std::size_t b = 0; b < spec.num_bins; ++b)
      m.feature_names.push_back(feature_name(spec.channel_labels[c], spec.band_lo[b], spec.band_hi[b]));
  // The [frame][channel][bin] layout is already channel-major per row.
  m.rows.rows = spec.num_frames;
  m.rows.cols = width;
  m.rows.values = spec.power;
  m.labels = spec.labels;
  m.provenance.reserve(spec.num_frames);
  for (std::size_t j = 0; j < spec.num_frames; ++j)
    m.provenance.push_back({spec.subject_id, spec.trial_index, spec.frame_times[j]});
  return m;
}

std::string fingerprint(const FeatureMatrix& m) {
  Fnv1a h;
  h.update_u64(m.rows.rows).update_u64(m.rows.cols);
  h.update(m.rows.values.data(), m.rows.values.size() * sizeof(double));
  for (auto l : m.labels) h.update_u64(static_cast<std::uint64_t>(code(l)));
  for (const auto& p : m.provenance) h.update(p.subject_id).update_u64(static_cast<std::uint64_t>(p.trial_index)).update_double(p.frame_time);
  return h.hex();
}

Scaler fit_scaler(const FeatureMatrix& train) {
  if (train.num_rows() == 0) throw ValidationError("cannot fit a scaler on an empty training matrix");
  const std::size_t n = train.num_rows();
  const std::size_t d = train.num_features();
  Scaler s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  s.degenerate.assign(d, false);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = train.rows.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = train.rows.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = row[c] - s.mean[c];
      s.stddev[c] += dev * dev;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    s.stddev[c] = std::sqrt(s.stddev[c] / static_cast<double>(n));
    if (s.stddev[c] < kDegenerateStd) {
      s.stddev[c] = 1.0;
      s.degenerate[c] = true;
    }
  }
  s.fitted_on = fingerprint(train);
  return s;
}

FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& m) {
  if (scaler.mean.size() != m.num_features())
    throw ValidationError("scaler was fitted on " + std::to_string(scaler.mean.size()) + " features, matrix has " +
                          std::to_string(m.num_features()));
  FeatureMatrix out = m;
  const std::size_t d = m.num_features();
  for (std::size_t r = 0; r < out.num_rows(); ++r) {
    auto row = out.rows.row(r);
    for (std::size_t c = 0; c < d; ++c) row[c] = (row[c] - scaler.mean[c]) / scaler.stddev[c];
  }
  return out;
}

}  // namespace attn
