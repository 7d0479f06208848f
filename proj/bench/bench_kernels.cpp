// OpenMP kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "attn/forest.hpp"
#include "attn/formation.hpp"
#include "attn/ingest.hpp"
#include "attn/spectral.hpp"

using namespace attn;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

const LabeledRecording& trial() {
  static const LabeledRecording rec = [] {
    SynthSpec spec;
    spec.num_subjects = 1;
    spec.trials_per_subject = 1;
    spec.trial_duration_min = 30.0;
    return form_recording(generate_trial(spec, 0, 1), FormationParams{});
  }();
  return rec;
}

struct Blobs {
  Matrix x;
  std::vector<StateLabel> y;
};

const Blobs& blobs() {
  static const Blobs b = [] {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Blobs out;
    const std::size_t rows = 3000, cols = 64;
    out.x = Matrix(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const int c = static_cast<int>(r % 3);
      out.y.push_back(label_from_code(c));
      for (std::size_t k = 0; k < cols; ++k) out.x(r, k) = g(rng) + (k % 3 == static_cast<std::size_t>(c) ? 1.0 : 0.0);
    }
    return out;
  }();
  return b;
}

RfConfig forest_config() {
  RfConfig c;
  c.num_trees = 32;
  c.seed = 3;
  return c;
}

StftParams stft_params(const benchmark::State& state) {
  StftParams p;
  p.window_seconds = static_cast<double>(state.range(0));
  p.shift_samples = static_cast<std::size_t>(state.range(1));
  return p;
}

void BM_stft_parallel(benchmark::State& state) {
  const auto x = noise(128 * 60 * 10);
  const auto p = stft_params(state);
  for (auto _ : state) benchmark::DoNotOptimize(stft_power(x, p));
}

void BM_stft_serial(benchmark::State& state) {
  const auto x = noise(128 * 60 * 10);
  const auto p = stft_params(state);
  for (auto _ : state) benchmark::DoNotOptimize(serial::stft_power(x, p));
}

void BM_spectrogram_parallel(benchmark::State& state) {
  const auto& rec = trial();
  for (auto _ : state) benchmark::DoNotOptimize(spectrogram(rec, StftParams{}));
}

void BM_spectrogram_serial(benchmark::State& state) {
  const auto& rec = trial();
  for (auto _ : state) benchmark::DoNotOptimize(serial::spectrogram(rec, StftParams{}));
}

void BM_forest_train_parallel(benchmark::State& state) {
  const auto& b = blobs();
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(b.x, b.y, forest_config()));
}

void BM_forest_train_serial(benchmark::State& state) {
  const auto& b = blobs();
  for (auto _ : state) benchmark::DoNotOptimize(serial::train_forest(b.x, b.y, forest_config()));
}

void BM_forest_predict_parallel(benchmark::State& state) {
  const auto& b = blobs();
  const auto f = train_forest(b.x, b.y, forest_config());
  for (auto _ : state) benchmark::DoNotOptimize(predict(f, b.x));
}

void BM_forest_predict_serial(benchmark::State& state) {
  const auto& b = blobs();
  const auto f = train_forest(b.x, b.y, forest_config());
  for (auto _ : state) benchmark::DoNotOptimize(serial::predict(f, b.x));
}

}  // namespace

BENCHMARK(BM_stft_parallel)->Args({4, 128})->Args({4, 16})->Args({30, 128})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stft_serial)->Args({4, 128})->Args({4, 16})->Args({30, 128})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectrogram_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectrogram_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_train_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_train_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_predict_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_predict_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
