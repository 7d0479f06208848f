#include "attn/split.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "attn/text.hpp"

namespace attn {

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::SubjectSpecific: return "subject-specific";
    case Paradigm::CommonSubject: return "common-subject";
    case Paradigm::LeaveOneOut: return "leave-one-out";
  }
  return "?";
}

Paradigm parse_paradigm(std::string_view text) {
  text = trim(text);
  if (text == "subject-specific") return Paradigm::SubjectSpecific;
  if (text == "common-subject") return Paradigm::CommonSubject;
  if (text == "leave-one-out") return Paradigm::LeaveOneOut;
  throw ParseError("unknown paradigm '" + std::string(text) +
                   "' (expected subject-specific, common-subject or leave-one-out)");
}

namespace {

DatasetSplit stratified(std::span<const StateLabel> labels, const std::vector<std::size_t>& rows,
                        double test_fraction, std::uint64_t seed, const std::string& scope) {
  std::array<std::vector<std::size_t>, kNumStates> by_class;
  for (auto r : rows) by_class[code(labels[r])].push_back(r);
  DatasetSplit split;
  for (int c = 0; c < kNumStates; ++c) {
    auto& members = by_class[c];
    if (members.empty())
      throw ValidationError("class '" + std::string(to_string(label_from_code(c))) + "' has no rows in " + scope +
                            "; stratified split impossible");
    std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(c));
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  return split;
}

}  // namespace

DatasetSplit make_split(std::span<const StateLabel> labels, std::span<const std::string> subjects,
                        const SplitSpec& spec) {
  if (labels.size() != subjects.size()) throw ValidationError("label and subject arrays differ in length");
  if (spec.paradigm != Paradigm::LeaveOneOut && !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw ValidationError("test fraction must lie in (0, 1)");
  const std::set<std::string> present(subjects.begin(), subjects.end());
  if (spec.paradigm != Paradigm::CommonSubject && !present.contains(spec.subject))
    throw ValidationError("unknown subject '" + spec.subject + "'");

  DatasetSplit split;
  switch (spec.paradigm) {
    case Paradigm::SubjectSpecific: {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < subjects.size(); ++i)
        if (subjects[i] == spec.subject) rows.push_back(i);
      split = stratified(labels, rows, spec.test_fraction, spec.seed, "subject '" + spec.subject + "'");
      break;
    }
    case Paradigm::CommonSubject: {
      std::vector<std::size_t> rows(labels.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      split = stratified(labels, rows, spec.test_fraction, spec.seed, "the dataset");
      break;
    }
    case Paradigm::LeaveOneOut: {
      if (present.size() < 2) throw ValidationError("leave-one-out needs at least two subjects");
      for (std::size_t i = 0; i < subjects.size(); ++i) (subjects[i] == spec.subject ? split.test : split.train).push_back(i);
      break;
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (split.train.empty() || split.test.empty())
    throw ValidationError("split of paradigm " + std::string(to_string(spec.paradigm)) + " left an empty side");
  return split;
}

DatasetSplit make_split(const FeatureMatrix& m, const SplitSpec& spec) {
  std::vector<std::string> subjects;
  subjects.reserve(m.num_rows());
  for (const auto& p : m.provenance) subjects.push_back(p.subject_id);
  return make_split(m.labels, subjects, spec);
}

}  // namespace attn
