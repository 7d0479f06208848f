#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "attn/core.hpp"

namespace attn {

enum class SvmKernel { Linear };

struct SvmConfig {
  SvmKernel kernel = SvmKernel::Linear;
  double c = 1.0;
  int epochs = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One hyperplane per class; the last column of `weights` is the bias term.
struct LinearOvr {
  Matrix weights;  // kNumStates x (num_features + 1)

  std::size_t num_features() const { return weights.cols == 0 ? 0 : weights.cols - 1; }
  std::array<double, kNumStates> scores(std::span<const double> row) const;
};

/// One-vs-rest primal hinge-loss SVM trained by stochastic subgradient descent
/// with step 1/(lambda t), lambda = 1/(C n).
LinearOvr train_svm(const Matrix& x, std::span<const StateLabel> y, const SvmConfig& config);
/// Argmax of the per-class scores, ties to the smallest class code.
std::vector<StateLabel> predict(const LinearOvr& model, const Matrix& x);

}  // namespace attn
