#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "attn/core.hpp"
#include "attn/ingest.hpp"

namespace testing {

// direct O(N^2) DFT of the windowed frame, density-normalized one-sided power
inline std::vector<double> naive_power(const std::vector<double>& frame, const std::vector<double>& w, double fs) {
  const std::size_t n = frame.size();
  double sw2 = 0.0;
  for (double v : w) sw2 += v * v;
  std::vector<double> out(n / 2 + 1);
  for (std::size_t b = 0; b <= n / 2; ++b) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((b * k) % n) /
                              static_cast<long double>(n);
      const long double x = static_cast<long double>(frame[k]) * w[k];
      re += x * std::cos(ang);
      im += x * std::sin(ang);
    }
    double p = static_cast<double>((re * re + im * im) / (fs * sw2));
    const bool edge = b == 0 || (n % 2 == 0 && b == n / 2);
    out[b] = edge ? p : 2.0 * p;
  }
  return out;
}

inline double rel_err(double a, double b) {
  const double d = std::abs(a - b);
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : d / s;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// zero-signal recording with arbitrary length, cheap for formation tests
inline attn::RawRecording flat_recording(double minutes, std::size_t channels = 1, double fs = 128.0,
                                         const std::string& subject = "s1", int trial = 1) {
  attn::RawRecording r;
  r.subject_id = subject;
  r.trial_index = trial;
  r.sample_rate_hz = fs;
  const auto& canon = attn::canonical_channels();
  r.channel_labels.assign(canon.begin(), canon.begin() + static_cast<long>(channels));
  r.samples = attn::Matrix(static_cast<std::size_t>(std::llround(minutes * 60.0 * fs)), channels);
  return r;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace testing
