#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "attn/core.hpp"

namespace attn {

enum class MlpArch { Dnn4, Dnn6 };

struct MlpConfig {
  MlpArch arch = MlpArch::Dnn4;
  std::vector<int> hidden{64, 64};
  std::vector<double> dropout{0.0, 0.0};  // dropout[i] follows hidden layer i
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 30;
  std::uint64_t seed = 0;

  /// in -> 64 -> 64 -> 3
  static MlpConfig dnn4();
  /// in -> 64 -> 128 -> drop -> 128 -> drop -> 64 -> 3
  static MlpConfig dnn6(double dropout = 0.5);
  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
  double dropout_after = 0.0;  // only for hidden layers, training only
};

/// ReLU hidden layers and a softmax output over the three states.
struct Mlp {
  std::vector<DenseLayer> layers;
  std::size_t num_inputs = 0;

  /// Logits for a column-per-sample batch (inputs x batch), dropout off.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& batch) const;
};

/// He-normal weights, zero biases.
Mlp init_mlp(const MlpConfig& config, std::size_t num_inputs, std::uint64_t seed);

/// Adam on mini-batch mean cross-entropy with inverted dropout. When
/// `epoch_losses` is given it receives the full-data loss before training and
/// after every epoch.
Mlp train_mlp(const Matrix& x, std::span<const StateLabel> y, const MlpConfig& config,
              std::vector<double>* epoch_losses = nullptr);

/// Argmax of the softmax output, ties to the smallest class code.
std::vector<StateLabel> predict(const Mlp& net, const Matrix& x);

/// Mean cross-entropy over the rows, dropout off.
double cross_entropy(const Mlp& net, const Matrix& x, std::span<const StateLabel> y);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Backpropagated gradient of the mean cross-entropy, dropout off.
MlpGradients loss_gradients(const Mlp& net, const Matrix& x, std::span<const StateLabel> y);

struct GradientCheckResult {
  double max_rel_error = 0.0;
  double max_rel_error_weights = 0.0;
  double max_rel_error_biases = 0.0;
  std::size_t parameters = 0;
};

/// Compares loss_gradients against central differences (h = 1e-5) over every
/// parameter of a freshly initialised network whose biases are drawn small and
/// random, so no unit sits exactly on the ReLU kink.
GradientCheckResult gradient_check(const MlpConfig& config, const Matrix& x, std::span<const StateLabel> y,
                                   std::uint64_t seed);
GradientCheckResult gradient_check(const Mlp& net, const Matrix& x, std::span<const StateLabel> y);

}  // namespace attn
