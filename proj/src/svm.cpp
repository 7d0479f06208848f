#include "attn/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "attn/text.hpp"

namespace attn {

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw ValidationError("SVM regularization C must be positive");
  if (epochs < 1) throw ValidationError("SVM needs at least one epoch");
}

std::array<double, kNumStates> LinearOvr::scores(std::span<const double> row) const {
  std::array<double, kNumStates> s{};
  const std::size_t d = num_features();
  for (int k = 0; k < kNumStates; ++k) {
    const auto w = weights.row(static_cast<std::size_t>(k));
    double acc = w[d];
    for (std::size_t j = 0; j < d; ++j) acc += w[j] * row[j];
    s[k] = acc;
  }
  return s;
}

namespace {

/// w = scale * v, with |w|^2 tracked for the projection step.
struct ScaledVector {
  std::vector<double> v;
  double scale = 1.0;
  double norm_sq = 0.0;

  explicit ScaledVector(std::size_t n) : v(n, 0.0) {}

  double dot(std::span<const double> x, double bias_input) const {
    const std::size_t d = v.size() - 1;
    double acc = v[d] * bias_input;
    for (std::size_t j = 0; j < d; ++j) acc += v[j] * x[j];
    return acc * scale;
  }

  void shrink(double factor) {
    if (factor <= 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      scale = 1.0;
      norm_sq = 0.0;
      return;
    }
    scale *= factor;
    norm_sq *= factor * factor;
    if (scale < 1e-9) renormalize();
  }

  void add(std::span<const double> x, double bias_input, double step) {
    // w += step * x  <=>  v += (step / scale) * x
    const std::size_t d = v.size() - 1;
    const double s = step / scale;
    double vx = v[d] * bias_input, xx = bias_input * bias_input;
    for (std::size_t j = 0; j < d; ++j) {
      vx += v[j] * x[j];
      xx += x[j] * x[j];
    }
    norm_sq += 2.0 * step * scale * vx + step * step * xx;
    for (std::size_t j = 0; j < d; ++j) v[j] += s * x[j];
    v[d] += s * bias_input;
  }

  void renormalize() {
    for (auto& e : v) e *= scale;
    scale = 1.0;
  }
};

}  // namespace

LinearOvr train_svm(const Matrix& x, std::span<const StateLabel> y, const SvmConfig& config) {
  config.validate();
  if (x.rows != y.size()) throw ValidationError("row and label counts differ");
  if (x.rows == 0) throw ValidationError("cannot train an SVM on zero rows");
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  const double radius_sq = 1.0 / lambda;
  constexpr double kBiasInput = 1.0;

  LinearOvr model;
  model.weights = Matrix(kNumStates, d + 1);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<ScaledVector> w(kNumStates, ScaledVector(d + 1));
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto row = x.row(i);
      for (int k = 0; k < kNumStates; ++k) {
        auto& wk = w[static_cast<std::size_t>(k)];
        const double target = code(y[i]) == k ? 1.0 : -1.0;
        const double margin = target * wk.dot(row, kBiasInput);
        wk.shrink(1.0 - eta * lambda);
        if (margin < 1.0) wk.add(row, kBiasInput, eta * target);
        if (wk.norm_sq > radius_sq) wk.shrink(std::sqrt(radius_sq / wk.norm_sq));
      }
    }
  }
  for (int k = 0; k < kNumStates; ++k) {
    auto& wk = w[static_cast<std::size_t>(k)];
    wk.renormalize();
    std::copy(wk.v.begin(), wk.v.end(), model.weights.row(static_cast<std::size_t>(k)).begin());
  }
  return model;
}

std::vector<StateLabel> predict(const LinearOvr& model, const Matrix& x) {
  if (x.cols != model.num_features())
    throw ValidationError("width mismatch: model expects " + std::to_string(model.num_features()) + " features, got " +
                          std::to_string(x.cols));
  std::vector<StateLabel> out(x.rows);
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto s = model.scores(x.row(static_cast<std::size_t>(r)));
    int best = 0;
    for (int k = 1; k < kNumStates; ++k)
      if (s[k] > s[best]) best = k;
    out[static_cast<std::size_t>(r)] = label_from_code(best);
  }
  return out;
}

}  // namespace attn
