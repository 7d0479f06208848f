#include "attn/forest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "attn/text.hpp"

namespace attn {

void RfConfig::validate() const {
  if (num_trees < 1) throw ValidationError("random forest needs at least one tree");
  if (max_depth < 0) throw ValidationError("max_depth must be >= 0 (0 = unlimited)");
  if (min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
}

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].label;
}

std::size_t default_features_per_split(std::size_t num_features) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_features))));
}

namespace {

using Counts = std::array<std::size_t, kNumStates>;

int majority(const Counts& c) {
  int best = 0;
  for (int k = 1; k < kNumStates; ++k)
    if (c[k] > c[best]) best = k;
  return best;
}

double gini_sum(const Counts& c, std::size_t n) {
  // n * gini = n - sum(c_k^2) / n
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (auto v : c) sq += static_cast<double>(v) * static_cast<double>(v);
  return static_cast<double>(n) - sq / static_cast<double>(n);
}

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

struct Frame {
  std::size_t begin, end;
  int depth;
  int node;
};

}  // namespace

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                       const RfConfig& config, std::size_t features_per_split, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  std::vector<int> features(x.cols);
  std::iota(features.begin(), features.end(), 0);
  std::vector<std::pair<double, int>> column;
  column.reserve(idx.size());
  const auto min_leaf = static_cast<std::size_t>(config.min_samples_leaf);

  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Frame> stack{{0, idx.size(), 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const std::size_t n = f.end - f.begin;
    Counts counts{};
    for (std::size_t i = f.begin; i < f.end; ++i) ++counts[y[idx[i]]];
    tree.nodes[f.node].label = majority(counts);

    const bool pure = *std::max_element(counts.begin(), counts.end()) == n;
    if (pure || n < 2 * min_leaf || (config.max_depth > 0 && f.depth >= config.max_depth)) continue;

    // Any valid split of an impure node is taken, even without an impurity
    // decrease, so unpruned trees separate all distinct rows.
    Candidate best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::size_t tried = 0;
    // Partial Fisher-Yates: keep drawing features until the quota is met and a split was found.
    for (std::size_t k = 0; k < features.size(); ++k) {
      if (tried >= features_per_split && best.feature >= 0) break;
      std::uniform_int_distribution<std::size_t> pick(k, features.size() - 1);
      std::swap(features[k], features[pick(rng)]);
      const int feat = features[k];
      ++tried;

      column.clear();
      for (std::size_t i = f.begin; i < f.end; ++i) column.emplace_back(x(idx[i], static_cast<std::size_t>(feat)), y[idx[i]]);
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      Counts left{};
      Counts right = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[column[i].second];
        --right[column[i].second];
        const std::size_t n_left = i + 1;
        if (column[i].first == column[i + 1].first) continue;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;
        const double imp = gini_sum(left, n_left) + gini_sum(right, n - n_left);
        if (imp < best.impurity - 1e-12) {
          const double a = column[i].first;
          const double b = column[i + 1].first;
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = {feat, t, imp};
        }
      }
    }
    if (best.feature < 0) continue;

    const auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(f.begin),
                                    idx.begin() + static_cast<std::ptrdiff_t>(f.end), [&](std::size_t r) {
                                      return x(r, static_cast<std::size_t>(best.feature)) <= best.threshold;
                                    });
    const auto split_at = static_cast<std::size_t>(mid - idx.begin());
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[f.node];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({split_at, f.end, f.depth + 1, left_id + 1});
    stack.push_back({f.begin, split_at, f.depth + 1, left_id});
  }
  return tree;
}

namespace {

std::vector<int> label_codes(const Matrix& x, std::span<const StateLabel> y, const RfConfig& config) {
  config.validate();
  if (x.rows != y.size()) throw ValidationError("row and label counts differ");
  if (x.rows == 0) throw ValidationError("cannot grow a forest on zero rows");
  std::vector<int> codes(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) codes[i] = code(y[i]);
  return codes;
}

DecisionTree tree_for(const Matrix& x, std::span<const int> codes, const RfConfig& config, std::size_t t) {
  const std::uint64_t tree_seed = mix_seed(config.seed, static_cast<std::uint64_t>(t));
  std::vector<std::size_t> rows(x.rows);
  if (config.bootstrap) {
    std::mt19937_64 rng(mix_seed(tree_seed, 0xb0075ULL));
    std::uniform_int_distribution<std::size_t> draw(0, x.rows - 1);
    for (auto& r : rows) r = draw(rng);
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  return grow_tree(x, codes, rows, config, default_features_per_split(x.cols), tree_seed);
}

StateLabel vote(const Forest& forest, std::span<const double> row) {
  Counts votes{};
  for (const auto& tree : forest.trees) ++votes[tree.predict(row)];
  return label_from_code(majority(votes));
}

void check_width(const Forest& forest, const Matrix& x) {
  if (x.cols != forest.num_features)
    throw ValidationError("width mismatch: model expects " + std::to_string(forest.num_features) + " features, got " +
                          std::to_string(x.cols));
}

}  // namespace

Forest train_forest(const Matrix& x, std::span<const StateLabel> y, const RfConfig& config) {
  const auto codes = label_codes(x, y, config);
  Forest forest;
  forest.num_features = x.cols;
  forest.trees.resize(static_cast<std::size_t>(config.num_trees));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < config.num_trees; ++t)
    forest.trees[static_cast<std::size_t>(t)] = tree_for(x, codes, config, static_cast<std::size_t>(t));
  return forest;
}

std::vector<StateLabel> predict(const Forest& forest, const Matrix& x) {
  check_width(forest, x);
  std::vector<StateLabel> out(x.rows);
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = vote(forest, x.row(static_cast<std::size_t>(r)));
  return out;
}

namespace serial {

Forest train_forest(const Matrix& x, std::span<const StateLabel> y, const RfConfig& config) {
  const auto codes = label_codes(x, y, config);
  Forest forest;
  forest.num_features = x.cols;
  for (int t = 0; t < config.num_trees; ++t) forest.trees.push_back(tree_for(x, codes, config, static_cast<std::size_t>(t)));
  return forest;
}

std::vector<StateLabel> predict(const Forest& forest, const Matrix& x) {
  check_width(forest, x);
  std::vector<StateLabel> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = vote(forest, x.row(r));
  return out;
}

}  // namespace serial

}  // namespace attn
