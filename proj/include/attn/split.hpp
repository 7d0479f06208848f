#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attn/core.hpp"
#include "attn/features.hpp"

namespace attn {

enum class Paradigm { SubjectSpecific, CommonSubject, LeaveOneOut };

std::string_view to_string(Paradigm p);
/// "subject-specific", "common-subject" or "leave-one-out".
Paradigm parse_paradigm(std::string_view text);

struct SplitSpec {
  Paradigm paradigm = Paradigm::CommonSubject;
  std::string subject;  // SubjectSpecific / LeaveOneOut only
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

/// Stratified-by-label random split (SubjectSpecific restricted to one
/// subject, CommonSubject over all rows) or whole-subject hold-out
/// (LeaveOneOut). Per class, round(count * test_fraction) rows go to test.
DatasetSplit make_split(std::span<const StateLabel> labels, std::span<const std::string> subjects,
                        const SplitSpec& spec);
DatasetSplit make_split(const FeatureMatrix& m, const SplitSpec& spec);

}  // namespace attn
