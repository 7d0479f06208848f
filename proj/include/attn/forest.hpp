#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "attn/core.hpp"

namespace attn {

struct RfConfig {
  int num_trees = 200;
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  int label = 0;  // majority class of the node's training rows
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(std::span<const double> row) const;
};

struct Forest {
  std::vector<DecisionTree> trees;
  std::size_t num_features = 0;
};

/// Gini-split CART tree over `rows` (duplicates allowed, as in a bootstrap
/// sample), trying `features_per_split` random features per node.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows,
                       const RfConfig& config, std::size_t features_per_split, std::uint64_t seed);

/// sqrt(num_features), at least 1.
std::size_t default_features_per_split(std::size_t num_features);

/// Trees are grown in parallel; tree i draws its randomness from (seed, i) only.
Forest train_forest(const Matrix& x, std::span<const StateLabel> y, const RfConfig& config);
/// Majority vote, ties to the smallest class code.
std::vector<StateLabel> predict(const Forest& forest, const Matrix& x);

namespace serial {
Forest train_forest(const Matrix& x, std::span<const StateLabel> y, const RfConfig& config);
std::vector<StateLabel> predict(const Forest& forest, const Matrix& x);
}  // namespace serial

}  // namespace attn
