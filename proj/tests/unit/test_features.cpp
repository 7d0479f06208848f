#include <doctest.h>

#include <random>
#include <sstream>

#include "../support.hpp"
#include "attn/features.hpp"
#include "attn/pipeline.hpp"
#include "attn/text.hpp"

using namespace attn;

namespace {

Spectrogram random_spec(std::size_t frames, std::size_t bins, std::size_t channels, double spacing,
                        std::uint64_t seed, double step = 1.0) {
  Spectrogram s;
  s.subject_id = "s1";
  s.trial_index = 1;
  s.num_frames = frames;
  s.num_bins = bins;
  s.num_channels = channels;
  const auto& canon = canonical_channels();
  s.channel_labels.assign(canon.begin(), canon.begin() + static_cast<long>(channels));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  s.power.resize(frames * bins * channels);
  for (auto& v : s.power) v = u(rng);
  s.frame_step_seconds = step;
  for (std::size_t j = 0; j < frames; ++j) s.frame_times.push_back(4.0 + step * static_cast<double>(j));
  for (std::size_t b = 0; b < bins; ++b) {
    s.freq_axis.push_back(spacing * static_cast<double>(b));
    s.band_lo.push_back(spacing * static_cast<double>(b));
    s.band_hi.push_back(spacing * static_cast<double>(b));
  }
  s.labels.assign(frames, StateLabel::Focused);
  return s;
}

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  FeatureMatrix m;
  m.rows = Matrix(rows, cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(3.0, 2.0);
  for (auto& v : m.rows.values) v = g(rng);
  for (std::size_t r = 0; r < rows; ++r) {
    m.labels.push_back(label_from_code(static_cast<int>(r % 3)));
    m.provenance.push_back({"s" + std::to_string(1 + r % 2), 1, static_cast<double>(r)});
  }
  for (std::size_t c = 0; c < cols; ++c) m.feature_names.push_back("f" + std::to_string(c));
  return m;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("binning at 0.5 Hz spacing keeps 36 bins") {
    const auto s = random_spec(3, 129, 7, 0.5, 1);
    const auto b = bin_frequencies(s, BinningParams{});
    CHECK(b.num_bins == 36);
    CHECK(b.num_bins * b.num_channels == 252);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t c = 0; c < 7; ++c)
        for (std::size_t k = 0; k < 36; ++k) CHECK(b.at(j, k, c) == s.at(j, k + 1, c));
    CHECK(b.band_lo[0] == 0.0);
    CHECK(b.band_hi[35] == 18.0);
  }

  TEST_CASE("binning at 0.25 Hz spacing averages pairs and excludes DC") {
    const auto s = random_spec(2, 257, 2, 0.25, 2);
    const auto b = bin_frequencies(s, BinningParams{});
    CHECK(b.num_bins == 36);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t k = 0; k < 36; ++k)
          CHECK(b.at(j, k, c) == doctest::Approx((s.at(j, 2 * k + 1, c) + s.at(j, 2 * k + 2, c)) / 2.0).epsilon(1e-15));
  }

  TEST_CASE("binning constant and linear") {
    auto s = random_spec(2, 257, 1, 0.25, 3);
    std::fill(s.power.begin(), s.power.end(), 2.5);
    for (double v : bin_frequencies(s, BinningParams{}).power) CHECK(v == 2.5);

    const auto r = random_spec(2, 257, 2, 0.25, 4);
    auto scaled = r;
    for (auto& v : scaled.power) v *= 3.0;
    const auto a = bin_frequencies(r, BinningParams{});
    const auto b = bin_frequencies(scaled, BinningParams{});
    for (std::size_t i = 0; i < a.power.size(); ++i) CHECK(b.power[i] == doctest::Approx(3.0 * a.power[i]).epsilon(1e-14));
  }

  TEST_CASE("binning errors") {
    const auto third = random_spec(1, 193, 1, 1.0 / 3.0, 5);
    CHECK_THROWS_WITH_AS(bin_frequencies(third, BinningParams{}),
                         doctest::Contains("not an integer multiple of the raw bin spacing"), ValidationError);
    const auto s = random_spec(1, 257, 1, 0.25, 5);
    BinningParams p;
    p.f_hi = 70.0;
    CHECK_THROWS_WITH_AS(bin_frequencies(s, p), doctest::Contains("Nyquist"), ValidationError);
    p.f_hi = 17.8;
    CHECK_THROWS_AS(p.validate(), ValidationError);
  }

  TEST_CASE("running average window and warm-up") {
    CHECK(smoothing_frames(SmoothingParams{}, 1.0) == 15);
    CHECK(smoothing_frames(SmoothingParams{}, 10.0) == 2);
    CHECK(smoothing_frames(SmoothingParams{}, 100.0) == 1);

    const auto s = random_spec(40, 3, 2, 0.5, 6);
    const auto r = running_average(s, SmoothingParams{});
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (std::size_t j = 0; j <= 4; ++j) sum += s.at(j, b, c);
        CHECK(r.at(4, b, c) == doctest::Approx(sum / 5.0).epsilon(1e-14));
      }
  }

  TEST_CASE("running average against brute force") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
      const double step = seed == 9 ? 0.0625 : 1.0;
      const auto s = random_spec(500, 4, 3, 0.5, seed, step);
      const auto r = running_average(s, SmoothingParams{});
      const std::size_t k = smoothing_frames(SmoothingParams{}, step);
      double worst = 0.0;
      for (std::size_t j = 0; j < s.num_frames; ++j)
        for (std::size_t c = 0; c < 3; ++c)
          for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t lo = j + 1 >= k ? j + 1 - k : 0;
            double sum = 0.0;
            for (std::size_t i = lo; i <= j; ++i) sum += s.at(i, b, c);
            worst = std::max(worst, std::abs(r.at(j, b, c) - sum / static_cast<double>(j - lo + 1)));
          }
      CHECK(worst <= 1e-12);
    }
  }

  TEST_CASE("running average: constants and offsets") {
    auto s = random_spec(50, 2, 1, 0.5, 10);
    auto flat = s;
    std::fill(flat.power.begin(), flat.power.end(), 4.0);
    for (double v : running_average(flat, SmoothingParams{}).power) CHECK(v == doctest::Approx(4.0).epsilon(1e-15));
    auto shifted = s;
    for (auto& v : shifted.power) v += 7.0;
    const auto a = running_average(s, SmoothingParams{});
    const auto b = running_average(shifted, SmoothingParams{});
    for (std::size_t i = 0; i < a.power.size(); ++i) CHECK(b.power[i] == doctest::Approx(a.power[i] + 7.0).epsilon(1e-13));
  }

  TEST_CASE("decibels") {
    auto s = random_spec(1, 3, 1, 0.5, 11);
    s.power = {1.0, 100.0, 0.0};
    const auto d = to_decibels(s);
    CHECK(std::abs(d.power[0]) < 5e-12);
    CHECK(std::abs(d.power[1] - 20.0) < 1e-9);
    CHECK(d.power[2] == 10.0 * std::log10(1e-12));
    CHECK(d.power[2] == doctest::Approx(-120.0));
  }

  TEST_CASE("flatten ordering and names") {
    auto s = random_spec(2, 257, 7, 0.25, 12);
    const auto b = bin_frequencies(s, BinningParams{});
    const auto m = flatten(b);
    CHECK(m.num_rows() == 2);
    CHECK(m.num_features() == 252);
    CHECK(m.feature_names[0] == "ch:F3|band:0.0-0.5Hz");
    CHECK(m.feature_names[36] == "ch:F4|band:0.0-0.5Hz");
    CHECK(m.feature_names[35] == "ch:F3|band:17.5-18.0Hz");
    for (std::size_t c = 0; c < 7; ++c)
      for (std::size_t k = 0; k < 36; ++k) CHECK(m.rows(1, c * 36 + k) == b.at(1, k, c));
    CHECK(m.provenance[1].frame_time == s.frame_times[1]);

    auto one = random_spec(1, 129, 1, 0.5, 13);
    const auto ob = bin_frequencies(one, BinningParams{});
    const auto om = flatten(ob);
    for (std::size_t k = 0; k < 36; ++k) CHECK(om.rows(0, k) == ob.at(0, k, 0));
  }

  TEST_CASE("scaler on training rows") {
    auto m = random_matrix(300, 6, 14);
    for (std::size_t r = 0; r < 300; ++r) m.rows(r, 4) = 2.0;
    const auto s = fit_scaler(m);
    CHECK(s.degenerate[4]);
    CHECK_FALSE(s.degenerate[0]);
    CHECK(s.stddev[4] == 1.0);
    const auto z = apply_scaler(s, m);
    for (std::size_t c = 0; c < 6; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < 300; ++r) mean += z.rows(r, c);
      mean /= 300.0;
      for (std::size_t r = 0; r < 300; ++r) var += (z.rows(r, c) - mean) * (z.rows(r, c) - mean);
      const double sd = std::sqrt(var / 300.0);
      CHECK(std::abs(mean) < 1e-9);
      if (c == 4) {
        for (std::size_t r = 0; r < 300; ++r) CHECK(z.rows(r, c) == 0.0);
      } else {
        CHECK(std::abs(sd - 1.0) < 1e-9);
      }
    }
    CHECK_THROWS_AS(fit_scaler(FeatureMatrix{}), ValidationError);
  }

  TEST_CASE("test rows use training statistics") {
    const auto train = random_matrix(200, 5, 15);
    auto test = random_matrix(80, 5, 16);
    for (auto& v : test.rows.values) v = v * 1.5 + 0.7;
    const auto z = apply_scaler(fit_scaler(train), test);
    for (std::size_t c = 0; c < 5; ++c) {
      double tm = 0.0, sm = 0.0;
      for (std::size_t r = 0; r < 200; ++r) tm += train.rows(r, c);
      tm /= 200.0;
      double tv = 0.0;
      for (std::size_t r = 0; r < 200; ++r) tv += (train.rows(r, c) - tm) * (train.rows(r, c) - tm);
      const double tsd = std::sqrt(tv / 200.0);
      double test_mean = 0.0;
      for (std::size_t r = 0; r < 80; ++r) test_mean += test.rows(r, c);
      test_mean /= 80.0;
      for (std::size_t r = 0; r < 80; ++r) sm += z.rows(r, c);
      sm /= 80.0;
      CHECK(std::abs(sm - (test_mean - tm) / tsd) < 1e-9);
    }
  }

  TEST_CASE("feature matrix file round trip") {
    auto m = random_matrix(25, 4, 17);
    m.feature_names = {"ch:F3|band:0.0-0.5Hz", "ch:F3|band:0.5-1.0Hz", "ch:F4|band:0.0-0.5Hz", "ch:F4|band:0.5-1.0Hz"};
    std::stringstream io;
    write_feature_matrix(m, io, {{"w_l", "4"}, {"input_hash", "abc"}});
    Metadata meta;
    const auto back = read_feature_matrix(io, &meta);
    CHECK(back == m);
    REQUIRE(meta.size() == 2);
    CHECK(meta[1].second == "abc");
    CHECK(fingerprint(back) == fingerprint(m));
  }

  TEST_CASE("featurize is deterministic with the 252 / 108 feature law") {
    SynthSpec spec;
    spec.num_subjects = 1;
    spec.trials_per_subject = 1;
    spec.trial_duration_min = 21.0;
    const auto recs = generate_synthetic(spec);
    FormationParams f;
    FeatureParams p;
    p.stft.shift_samples = 640;
    const auto a = featurize(recs, f, p);
    const auto b = featurize(recs, f, p);
    CHECK(a == b);
    CHECK(a.num_features() == 252);
    f.channels = {"Fz", "F3", "Pz"};
    CHECK(featurize(recs, f, p).num_features() == 108);
    p.stft.window_seconds = 3.0;
    CHECK_THROWS_WITH_AS(featurize(recs, f, p), doctest::Contains("not an integer multiple"), ValidationError);
  }
}
