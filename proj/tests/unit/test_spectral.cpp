#include <doctest.h>

#include <numbers>
#include <random>

#include "../support.hpp"
#include "attn/spectral.hpp"

using namespace attn;

namespace {

LabeledRecording labeled(double minutes, std::size_t channels, std::uint64_t seed) {
  auto rec = testing::flat_recording(minutes, channels);
  const auto noise = testing::gaussian(rec.samples.values.size(), seed);
  rec.samples.values = noise;
  FormationParams p;
  p.channels.assign(rec.channel_labels.begin(), rec.channel_labels.end());
  p.d_l = DrowsyLength::max();
  return form_recording(rec, p);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("blackman window against the formula") {
    for (std::size_t n : {64u, 255u, 256u, 512u}) {
      const auto w = blackman_window(n);
      REQUIRE(w.size() == n);
      CHECK(std::abs(w.front()) <= 1e-15);
      CHECK(std::abs(w.back()) <= 1e-15);
      for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1);
        const double direct = 0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
        CHECK(std::abs(w[k] - direct) <= 1e-15);
      }
      if (n % 2 == 1) CHECK(w[n / 2] == 1.0);
    }
    CHECK_THROWS_AS(blackman_window(1), ValidationError);
  }

  TEST_CASE("frame count law") {
    CHECK(num_frames(1280, 512, 128) == 7);
    CHECK(num_frames(511, 512, 128) == 0);
    CHECK(num_frames(512, 512, 128) == 1);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      const std::size_t win = 2 + rng() % 600, shift = 1 + rng() % 700, len = win + rng() % 5000;
      CHECK(num_frames(len, win, shift) == (len - win) / shift + 1);
    }
  }

  TEST_CASE("stft matches the naive DFT") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      StftParams p;
      p.window_seconds = 2.0 + static_cast<double>(rng() % 3);
      p.shift_samples = 4 + rng() % 200;
      const std::size_t win = p.window_samples();
      const auto x = testing::gaussian(win + rng() % 1024, rng());
      const auto out = stft_power(x, p);
      const auto w = blackman_window(win);
      REQUIRE(out.power.rows == num_frames(x.size(), win, p.shift_samples));
      REQUIRE(out.power.cols == win / 2 + 1);
      double worst = 0.0;
      for (std::size_t j = 0; j < out.power.rows; j += 3) {
        std::vector<double> frame(x.begin() + static_cast<long>(j * p.shift_samples),
                                  x.begin() + static_cast<long>(j * p.shift_samples + win));
        const auto ref = testing::naive_power(frame, w, p.sample_rate_hz);
        for (std::size_t b = 0; b < ref.size(); ++b) worst = std::max(worst, testing::rel_err(out.power(j, b), ref[b]));
        CHECK(out.frame_end_times[j] ==
              doctest::Approx(static_cast<double>(j * p.shift_samples + win) / p.sample_rate_hz).epsilon(1e-15));
      }
      CHECK(worst <= 1e-9);
    }
  }

  TEST_CASE("on-grid 10 Hz tone peaks at 10 Hz") {
    StftParams p;
    p.window_seconds = 2.0;
    std::vector<double> x(128 * 20);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * 10.0 * i / 128.0 + 0.3);
    const auto out = stft_power(x, p);
    std::vector<double> mean(out.power.cols, 0.0);
    for (std::size_t j = 0; j < out.power.rows; ++j)
      for (std::size_t b = 0; b < out.power.cols; ++b) mean[b] += out.power(j, b);
    const auto peak = std::max_element(mean.begin(), mean.end()) - mean.begin();
    CHECK(static_cast<double>(peak) * p.bin_spacing_hz() == 10.0);
    CHECK(p.bin_spacing_hz() == 0.5);
  }

  TEST_CASE("Parseval under the density normalization") {
    StftParams p;
    const auto x = testing::gaussian(2048, 9);
    const auto out = stft_power(x, p);
    const auto w = blackman_window(p.window_samples());
    double sw2 = 0.0;
    for (double v : w) sw2 += v * v;
    for (std::size_t j = 0; j < out.power.rows; ++j) {
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t b = 0; b < out.power.cols; ++b) lhs += out.power(j, b) * p.bin_spacing_hz();
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double v = w[k] * x[j * p.shift_samples + k];
        rhs += v * v;
      }
      CHECK(testing::rel_err(lhs, rhs / sw2) <= 1e-6);
    }
  }

  TEST_CASE("power is non-negative and short signals are rejected") {
    StftParams p;
    const auto out = stft_power(testing::gaussian(1000, 2), p);
    for (double v : out.power.values) CHECK(v >= 0.0);
    CHECK_THROWS_AS(stft_power(testing::gaussian(511, 2), p), ValidationError);
  }

  TEST_CASE("parameter validation") {
    StftParams p;
    p.window_seconds = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.window_seconds = 61.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.window_seconds = 2.0;
    p.shift_samples = 1281;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.shift_samples = 1280;
    CHECK_NOTHROW(p.validate());
    p.shift_samples = 2;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.window_seconds = 2.01;
    p.shift_samples = 128;
    CHECK_THROWS_AS(p.window_samples(), ValidationError);
    p.window_seconds = 3.0;
    CHECK(p.window_samples() == 384);
    CHECK(p.num_raw_bins() == 193);
  }

  TEST_CASE("40-minute 7-channel spectrogram shape") {
    const auto rec = labeled(40.0, 7, 1);
    const auto sg = spectrogram(rec, StftParams{});
    CHECK(sg.num_frames == 2397);
    CHECK(sg.num_bins == 257);
    CHECK(sg.num_channels == 7);
    CHECK(sg.power.size() == 2397u * 257u * 7u);
    CHECK(sg.frame_times.size() == 2397);
    for (std::size_t j = 1; j < sg.frame_times.size(); ++j)
      CHECK(sg.frame_times[j] - sg.frame_times[j - 1] == doctest::Approx(1.0));
    CHECK(sg.freq_axis[1] == 0.25);
  }

  TEST_CASE("single channel equals stft_power; end-sample labels") {
    const auto rec = labeled(20.5, 1, 4);
    const auto sg = spectrogram(rec, StftParams{});
    const auto direct = stft_power(rec.recording.channel(0), StftParams{});
    REQUIRE(sg.num_frames == direct.power.rows);
    for (std::size_t j = 0; j < sg.num_frames; ++j)
      for (std::size_t b = 0; b < sg.num_bins; ++b) CHECK(sg.at(j, b, 0) == direct.power(j, b));
    const std::size_t b10 = 10 * 60 * 128;
    for (std::size_t j = 0; j < sg.num_frames; ++j) {
      const std::size_t last = j * 128 + 512 - 1;
      CHECK(sg.labels[j] == rec.labels[last]);
      if (j * 128 < b10 && last >= b10) CHECK(sg.labels[j] == StateLabel::Unfocused);
    }
  }

  TEST_CASE("parallel and serial kernels agree bitwise") {
    const auto rec = labeled(21.0, 3, 8);
    StftParams p;
    p.shift_samples = 64;
    const auto a = spectrogram(rec, p);
    const auto b = serial::spectrogram(rec, p);
    CHECK(a.power == b.power);
    CHECK(a.labels == b.labels);
    const auto x = rec.recording.channel(1);
    CHECK(stft_power(x, p).power == serial::stft_power(x, p).power);
  }
}
