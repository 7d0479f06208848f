#include "attn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "attn/text.hpp"

namespace attn {

MlpConfig MlpConfig::dnn4() {
  MlpConfig c;
  c.arch = MlpArch::Dnn4;
  c.hidden = {64, 64};
  c.dropout = {0.0, 0.0};
  return c;
}

MlpConfig MlpConfig::dnn6(double dropout) {
  MlpConfig c;
  c.arch = MlpArch::Dnn6;
  c.hidden = {64, 128, 128, 64};
  c.dropout = {0.0, dropout, dropout, 0.0};
  return c;
}

void MlpConfig::validate() const {
  if (hidden.empty()) throw ValidationError("MLP needs at least one hidden layer");
  if (dropout.size() != hidden.size()) throw ValidationError("MLP needs one dropout rate per hidden layer");
  for (int h : hidden)
    if (h <= 0) throw ValidationError("MLP layer sizes must be positive");
  for (double p : dropout)
    if (!(p >= 0.0 && p < 1.0)) throw ValidationError("dropout probability must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

constexpr std::size_t kPredictChunk = 512;

MatrixXd gather_columns(const Matrix& x, std::span<const std::size_t> rows) {
  MatrixXd out(static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b) {
    const auto src = x.row(rows[b]);
    for (std::size_t j = 0; j < x.cols; ++j) out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) = src[j];
  }
  return out;
}

MatrixXd column_block(const Matrix& x, std::size_t begin, std::size_t count) {
  RowMajorMap block(x.values.data() + begin * x.cols, static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(x.cols));
  return block.transpose();
}

/// Column-wise log-softmax.
MatrixXd log_softmax(const MatrixXd& logits) {
  MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    const double lse = m + std::log((logits.col(c).array() - m).exp().sum());
    out.col(c) = logits.col(c).array() - lse;
  }
  return out;
}

void check_inputs(const Mlp& net, const Matrix& x) {
  if (x.cols != net.num_inputs)
    throw ValidationError("width mismatch: model expects " + std::to_string(net.num_inputs) + " features, got " +
                          std::to_string(x.cols));
}

struct Pass {
  std::vector<MatrixXd> pre;   // z per layer
  std::vector<MatrixXd> post;  // activations; post[0] is the input
  std::vector<MatrixXd> masks;  // dropout masks (empty when inactive)
};

/// Forward pass keeping intermediates. `rng` enables dropout.
Pass forward(const Mlp& net, MatrixXd input, std::mt19937_64* rng) {
  Pass p;
  p.post.push_back(std::move(input));
  const std::size_t n_layers = net.layers.size();
  p.masks.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = net.layers[l];
    MatrixXd z = layer.weights * p.post.back();
    z.colwise() += layer.bias;
    p.pre.push_back(z);
    if (l + 1 == n_layers) {
      p.post.push_back(std::move(z));
      break;
    }
    MatrixXd a = z.cwiseMax(0.0);
    if (rng && layer.dropout_after > 0.0) {
      const double keep = 1.0 - layer.dropout_after;
      std::bernoulli_distribution draw(keep);
      MatrixXd mask(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = draw(*rng) ? 1.0 / keep : 0.0;
      a = a.cwiseProduct(mask);
      p.masks[l] = std::move(mask);
    }
    p.post.push_back(std::move(a));
  }
  return p;
}

MlpGradients backward(const Mlp& net, const Pass& p, std::span<const int> targets) {
  const auto batch = static_cast<double>(targets.size());
  const std::size_t n_layers = net.layers.size();
  MlpGradients g;
  g.weights.resize(n_layers);
  g.biases.resize(n_layers);

  // d(mean CE)/d logits = (softmax - onehot) / batch
  MatrixXd delta = log_softmax(p.post.back()).array().exp();
  for (std::size_t b = 0; b < targets.size(); ++b) delta(targets[b], static_cast<Eigen::Index>(b)) -= 1.0;
  delta /= batch;

  for (std::size_t l = n_layers; l-- > 0;) {
    g.weights[l] = delta * p.post[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    MatrixXd upstream = net.layers[l].weights.transpose() * delta;
    if (p.masks[l - 1].size() > 0) upstream = upstream.cwiseProduct(p.masks[l - 1]);
    delta = upstream.array() * (p.pre[l - 1].array() > 0.0).cast<double>();
  }
  return g;
}

std::vector<int> codes_of(std::span<const StateLabel> y) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = code(y[i]);
  return out;
}

struct AdamState {
  std::vector<MatrixXd> m_w, v_w;
  std::vector<VectorXd> m_b, v_b;
  long step = 0;

  explicit AdamState(const Mlp& net) {
    for (const auto& l : net.layers) {
      m_w.push_back(MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      v_w.push_back(MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      m_b.push_back(VectorXd::Zero(l.bias.size()));
      v_b.push_back(VectorXd::Zero(l.bias.size()));
    }
  }

  void apply(Mlp& net, const MlpGradients& g, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    const auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = beta1 * m + (1.0 - beta1) * grad;
      v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
      param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      update(net.layers[l].weights, m_w[l], v_w[l], g.weights[l]);
      update(net.layers[l].bias, m_b[l], v_b[l], g.biases[l]);
    }
  }
};

}  // namespace

MatrixXd Mlp::logits(const MatrixXd& batch) const { return forward(*this, batch, nullptr).post.back(); }

Mlp init_mlp(const MlpConfig& config, std::size_t num_inputs, std::uint64_t seed) {
  config.validate();
  if (num_inputs == 0) throw ValidationError("MLP needs at least one input feature");
  std::mt19937_64 rng(seed);
  Mlp net;
  net.num_inputs = num_inputs;
  std::size_t fan_in = num_inputs;
  std::vector<std::size_t> sizes(config.hidden.begin(), config.hidden.end());
  sizes.push_back(kNumStates);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    DenseLayer layer;
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    layer.weights.resize(static_cast<Eigen::Index>(sizes[l]), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = normal(rng);
    layer.bias = VectorXd::Zero(static_cast<Eigen::Index>(sizes[l]));
    layer.dropout_after = l < config.dropout.size() ? config.dropout[l] : 0.0;
    net.layers.push_back(std::move(layer));
    fan_in = sizes[l];
  }
  return net;
}

Mlp train_mlp(const Matrix& x, std::span<const StateLabel> y, const MlpConfig& config,
              std::vector<double>* epoch_losses) {
  config.validate();
  if (x.rows != y.size()) throw ValidationError("row and label counts differ");
  if (x.rows == 0) throw ValidationError("cannot train an MLP on zero rows");
  Mlp net = init_mlp(config, x.cols, mix_seed(config.seed, 1));
  std::mt19937_64 rng(mix_seed(config.seed, 2));
  const auto codes = codes_of(y);
  AdamState adam(net);
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<int> targets;

  if (epoch_losses) epoch_losses->push_back(cross_entropy(net, x, y));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t count = std::min(batch, order.size() - begin);
      const std::span<const std::size_t> rows(order.data() + begin, count);
      targets.resize(count);
      for (std::size_t b = 0; b < count; ++b) targets[b] = codes[rows[b]];
      const auto pass = forward(net, gather_columns(x, rows), &rng);
      adam.apply(net, backward(net, pass, targets), config.learning_rate);
    }
    if (epoch_losses) epoch_losses->push_back(cross_entropy(net, x, y));
  }
  return net;
}

std::vector<StateLabel> predict(const Mlp& net, const Matrix& x) {
  check_inputs(net, x);
  std::vector<StateLabel> out(x.rows);
  const auto chunks = static_cast<std::ptrdiff_t>((x.rows + kPredictChunk - 1) / kPredictChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ch = 0; ch < chunks; ++ch) {
    const std::size_t begin = static_cast<std::size_t>(ch) * kPredictChunk;
    const std::size_t count = std::min(kPredictChunk, x.rows - begin);
    const MatrixXd logits = net.logits(column_block(x, begin, count));
    for (std::size_t b = 0; b < count; ++b) {
      int best = 0;
      for (int k = 1; k < kNumStates; ++k)
        if (logits(k, static_cast<Eigen::Index>(b)) > logits(best, static_cast<Eigen::Index>(b))) best = k;
      out[begin + b] = label_from_code(best);
    }
  }
  return out;
}

double cross_entropy(const Mlp& net, const Matrix& x, std::span<const StateLabel> y) {
  check_inputs(net, x);
  if (x.rows != y.size()) throw ValidationError("row and label counts differ");
  double total = 0.0;
  for (std::size_t begin = 0; begin < x.rows; begin += kPredictChunk) {
    const std::size_t count = std::min(kPredictChunk, x.rows - begin);
    const MatrixXd logp = log_softmax(net.logits(column_block(x, begin, count)));
    for (std::size_t b = 0; b < count; ++b) total -= logp(code(y[begin + b]), static_cast<Eigen::Index>(b));
  }
  return total / static_cast<double>(x.rows);
}

MlpGradients loss_gradients(const Mlp& net, const Matrix& x, std::span<const StateLabel> y) {
  check_inputs(net, x);
  if (x.rows != y.size() || x.rows == 0) throw ValidationError("gradient needs matching, non-empty rows and labels");
  const auto pass = forward(net, column_block(x, 0, x.rows), nullptr);
  return backward(net, pass, codes_of(y));
}

GradientCheckResult gradient_check(const Mlp& net, const Matrix& x, std::span<const StateLabel> y) {
  constexpr double h = 1e-5;
  constexpr double floor = 1e-6;
  const auto analytic = loss_gradients(net, x, y);
  Mlp probe = net;
  GradientCheckResult result;
  const auto rel = [&](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}); };
  const auto numeric = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = cross_entropy(probe, x, y);
    param = saved - h;
    const double down = cross_entropy(probe, x, y);
    param = saved;
    return (up - down) / (2.0 * h);
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& layer = probe.layers[l];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      const double e = rel(analytic.weights[l].data()[i], numeric(layer.weights.data()[i]));
      result.max_rel_error_weights = std::max(result.max_rel_error_weights, e);
      ++result.parameters;
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      const double e = rel(analytic.biases[l][i], numeric(layer.bias[i]));
      result.max_rel_error_biases = std::max(result.max_rel_error_biases, e);
      ++result.parameters;
    }
  }
  result.max_rel_error = std::max(result.max_rel_error_weights, result.max_rel_error_biases);
  return result;
}

GradientCheckResult gradient_check(const MlpConfig& config, const Matrix& x, std::span<const StateLabel> y,
                                   std::uint64_t seed) {
  MlpConfig no_dropout = config;
  std::fill(no_dropout.dropout.begin(), no_dropout.dropout.end(), 0.0);
  auto net = init_mlp(no_dropout, x.cols, seed);
  // zero biases put units behind a dead layer exactly on the ReLU kink
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::normal_distribution<double> g(0.0, 0.1);
  for (auto& layer : net.layers)
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = g(rng);
  return gradient_check(net, x, y);
}

}  // namespace attn
