#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attn/core.hpp"

namespace attn {

/// Rows are true classes, columns predicted classes.
using Confusion = std::array<std::array<std::uint64_t, kNumStates>, kNumStates>;

Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred);
Confusion confusion_matrix(std::span<const StateLabel> y_true, std::span<const StateLabel> y_pred);

/// Recall per class; NaN for classes with no true samples.
std::array<double, kNumStates> per_class_recall(const Confusion& c);
/// Mean recall over classes that have at least one true sample.
double balanced_accuracy(const Confusion& c);
double plain_accuracy(const Confusion& c);
double drowsy_recall(const Confusion& c);

struct EvalReport {
  Confusion confusion{};
  double balanced_accuracy = 0.0;
  std::array<double, kNumStates> per_class_recall{};
  double plain_accuracy = 0.0;
  /// Run metadata: classifier, split spec, feature params, seed, provenance.
  std::vector<std::pair<std::string, std::string>> metadata;

  std::string get(const std::string& key) const;  // "" when absent
};

EvalReport evaluate(std::span<const StateLabel> y_true, std::span<const StateLabel> y_pred,
                    std::vector<std::pair<std::string, std::string>> metadata = {});

/// Flat `key=value` lines followed by a `confusion:` marker and three CSV rows.
void write_report(const EvalReport& r, std::ostream& out);
EvalReport read_report(std::istream& in);

}  // namespace attn
