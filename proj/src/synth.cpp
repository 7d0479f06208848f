#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "attn/fft.hpp"
#include "attn/ingest.hpp"
#include "attn/text.hpp"

namespace attn {

namespace {

constexpr double kBackgroundAmplitudeUv = 10.0;
constexpr double kLowestShapedHz = 0.5;
constexpr double kBurstSeconds = 2.0;
constexpr int kBurstTracks = 2;
constexpr double kSamplesPerUv = 1000.0;  // 1 nV resolution keeps text files short

struct SubjectTraits {
  std::array<BandProfile, kNumStates> profile;
  double background_uv = kBackgroundAmplitudeUv;
  double noise_exponent = 1.0;
  std::vector<double> channel_gain;        // background scale per channel
  std::vector<double> oscillation_weight;  // spatial pattern of the state rhythm
};

SubjectTraits subject_traits(const SynthSpec& spec, int subject_index) {
  std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(subject_index), 0x5ab1ec7ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double v = spec.subject_variability;
  const double nyquist = spec.sample_rate_hz / 2.0;

  SubjectTraits t;
  for (int s = 0; s < kNumStates; ++s) {
    const auto& base = spec.profile[s];
    const double width = base.hi_hz - base.lo_hz;
    const double shift = v * 1.5 * normal(rng);
    const double stretch = std::exp(v * 0.3 * normal(rng));
    double lo = base.lo_hz + shift;
    double hi = lo + width * stretch;
    lo = std::clamp(lo, kLowestShapedHz, nyquist - 1.0);
    hi = std::clamp(hi, lo + 0.5, nyquist);
    const double excess = (base.gain - 1.0) * std::exp(v * normal(rng));
    t.profile[s] = {lo, hi, 1.0 + excess};
  }
  t.background_uv = kBackgroundAmplitudeUv * std::exp(v * 0.5 * normal(rng));
  t.noise_exponent = std::max(0.0, spec.noise_exponent + v * 0.3 * normal(rng));
  const auto n_ch = spec.channels.size();
  t.channel_gain.resize(n_ch);
  t.oscillation_weight.resize(n_ch);
  for (std::size_t c = 0; c < n_ch; ++c) {
    t.channel_gain[c] = std::exp(v * 0.3 * normal(rng));
    t.oscillation_weight[c] = std::exp(v * 0.5 * normal(rng));
  }
  return t;
}

double shaping_gain(double f_hz, double exponent) {
  return std::pow(std::max(f_hz, kLowestShapedHz), -exponent / 2.0);
}

/// Unit-variance Gaussian 1/f^alpha noise of length n, with the fraction of its
/// variance falling in each state band.
std::vector<double> pink_noise(std::size_t n, double fs, double exponent, std::mt19937_64& rng) {
  const std::size_t m = next_smooth_size(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> spectrum(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    const double f = static_cast<double>(std::min(k, m - k)) * fs / static_cast<double>(m);
    spectrum[k] = k == 0 ? std::complex<double>{} : std::complex<double>{re, im} * shaping_gain(f, exponent);
  }
  std::vector<std::complex<double>> time(m);
  FftPlan(m).inverse(spectrum, time);
  std::vector<double> out(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = time[i].real();
    sum += out[i];
  }
  const double mean = sum / static_cast<double>(n);
  for (auto& x : out) {
    x -= mean;
    sum_sq += x * x;
  }
  const double scale = sum_sq > 0.0 ? 1.0 / std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
  for (auto& x : out) x *= scale;
  return out;
}

/// Share of the shaped-noise variance inside (lo, hi].
double band_fraction(double lo, double hi, double fs, double exponent) {
  // Integrate the one-sided shaping PSD on a fine grid.
  const double df = 0.01;
  double total = 0.0, band = 0.0;
  for (double f = df; f <= fs / 2.0; f += df) {
    const double g = shaping_gain(f, exponent);
    total += g * g;
    if (f > lo && f <= hi) band += g * g;
  }
  return band / total;
}

/// Hann-tapered sinusoidal bursts with random frequency in [lo, hi] and random
/// phase, overlapping by half a burst, scaled to unit variance.
std::vector<double> band_bursts(std::size_t n, double fs, double lo, double hi, std::mt19937_64& rng) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  std::uniform_real_distribution<double> freq(lo, hi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const auto burst = static_cast<std::size_t>(std::llround(kBurstSeconds * fs));
  const std::size_t hop = std::max<std::size_t>(1, burst / 2);
  for (int track = 0; track < kBurstTracks; ++track) {
    for (std::size_t start = 0; start < n + hop; start += hop) {
      const double f = freq(rng);
      const double ph = phase(rng);
      const std::size_t begin = start >= hop ? start - hop : 0;
      const std::size_t offset = start >= hop ? 0 : hop - start;
      for (std::size_t k = offset; k < burst && begin + k - offset < n; ++k) {
        const double taper = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(burst));
        const double t = static_cast<double>(begin + k - offset) / fs;
        out[begin + k - offset] += taper * std::sin(2.0 * std::numbers::pi * f * t + ph);
      }
    }
  }
  double sum_sq = 0.0;
  for (double x : out) sum_sq += x * x;
  const double scale = sum_sq > 0.0 ? 1.0 / std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
  for (auto& x : out) x *= scale;
  return out;
}

}  // namespace

std::array<BandProfile, kNumStates> default_band_profile() {
  return {BandProfile{12.0, 18.0, 4.0}, BandProfile{8.0, 12.0, 4.0}, BandProfile{1.0, 7.0, 4.0}};
}

void validate(const SynthSpec& spec) {
  if (spec.num_subjects < 1) throw ValidationError("synthetic corpus needs at least one subject");
  if (spec.trials_per_subject < 1) throw ValidationError("synthetic corpus needs at least one trial per subject");
  if (!(spec.trial_duration_min >= 20.0))
    throw ValidationError("trial duration " + format_double(spec.trial_duration_min) +
                          " min is below the 20 min labeling minimum");
  if (!(spec.sample_rate_hz > 0.0)) throw ValidationError("sample rate must be positive");
  if (!(spec.subject_variability >= 0.0)) throw ValidationError("subject variability must be non-negative");
  if (!std::isfinite(spec.noise_exponent)) throw ValidationError("noise exponent must be finite");
  if (spec.channels.empty()) throw ValidationError("synthetic corpus needs at least one channel");
  for (const auto& b : spec.profile) {
    if (!(b.gain > 0.0)) throw ValidationError("band gains must be positive");
    if (!(b.lo_hz >= 0.0 && b.hi_hz > b.lo_hz && b.hi_hz <= spec.sample_rate_hz / 2.0))
      throw ValidationError("band range must satisfy 0 <= lo < hi <= Nyquist");
  }
}

std::array<BandProfile, kNumStates> subject_profile(const SynthSpec& spec, int subject_index) {
  return subject_traits(spec, subject_index).profile;
}

std::string synthetic_subject_id(int subject_index) { return "s" + std::to_string(subject_index + 1); }

RawRecording generate_trial(const SynthSpec& spec, int subject_index, int trial_index) {
  const auto traits = subject_traits(spec, subject_index);
  const double fs = spec.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(spec.trial_duration_min * 60.0 * fs));
  const auto b10 = std::min(n, static_cast<std::size_t>(std::llround(10.0 * 60.0 * fs)));
  const auto b20 = std::min(n, static_cast<std::size_t>(std::llround(20.0 * 60.0 * fs)));
  const std::array<std::pair<std::size_t, std::size_t>, kNumStates> segments{{{0, b10}, {b10, b20}, {b20, n}}};

  std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(subject_index),
                               static_cast<std::uint64_t>(trial_index)));

  // One state rhythm per segment, shared by all channels with a per-channel weight.
  std::array<std::vector<double>, kNumStates> rhythm;
  std::array<double, kNumStates> rhythm_rms{};
  for (int s = 0; s < kNumStates; ++s) {
    const auto& band = traits.profile[s];
    const auto [begin, end] = segments[s];
    rhythm[s] = band_bursts(end - begin, fs, band.lo_hz, band.hi_hz, rng);
    const double frac = band_fraction(band.lo_hz, band.hi_hz, fs, traits.noise_exponent);
    rhythm_rms[s] = std::sqrt(std::max(0.0, band.gain - 1.0) * frac);
  }

  RawRecording rec;
  rec.subject_id = synthetic_subject_id(subject_index);
  rec.trial_index = trial_index;
  rec.sample_rate_hz = fs;
  rec.channel_labels = spec.channels;
  rec.samples = Matrix(n, spec.channels.size());
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const auto noise = pink_noise(n, fs, traits.noise_exponent, rng);
    const double amp = traits.background_uv * traits.channel_gain[c];
    for (int s = 0; s < kNumStates; ++s) {
      const auto [begin, end] = segments[s];
      const double w = rhythm_rms[s] * traits.oscillation_weight[c];
      for (std::size_t i = begin; i < end; ++i) {
        const double x = amp * (noise[i] + w * rhythm[s][i - begin]);
        rec.samples(i, c) = std::round(x * kSamplesPerUv) / kSamplesPerUv;
      }
    }
  }
  return rec;
}

std::vector<RawRecording> generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  if (spec.trial_duration_min < kMinFullTrialMinutes)
    warn("synthetic trials of " + format_double(spec.trial_duration_min) + " min are below the 30 min minimum");
  const int total = spec.num_subjects * spec.trials_per_subject;
  std::vector<RawRecording> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < total; ++i) {
    out[static_cast<std::size_t>(i)] =
        generate_trial(spec, i / spec.trials_per_subject, i % spec.trials_per_subject + 1);
  }
  return out;
}

}  // namespace attn
