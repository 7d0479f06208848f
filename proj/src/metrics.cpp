#include "attn/metrics.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "attn/text.hpp"

namespace attn {

Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw ValidationError("confusion matrix: " + std::to_string(y_true.size()) + " true labels vs " +
                          std::to_string(y_pred.size()) + " predictions");
  if (y_true.empty()) throw ValidationError("confusion matrix: empty input");
  Confusion c{};
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= kNumStates || p < 0 || p >= kNumStates)
      throw ValidationError("confusion matrix: label out of range at position " + std::to_string(i));
    ++c[t][p];
  }
  return c;
}

Confusion confusion_matrix(std::span<const StateLabel> y_true, std::span<const StateLabel> y_pred) {
  std::vector<int> t(y_true.size()), p(y_pred.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = code(y_true[i]);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = code(y_pred[i]);
  return confusion_matrix(std::span<const int>(t), std::span<const int>(p));
}

namespace {
std::uint64_t row_sum(const Confusion& c, int i) {
  std::uint64_t s = 0;
  for (auto v : c[i]) s += v;
  return s;
}
}  // namespace

std::array<double, kNumStates> per_class_recall(const Confusion& c) {
  std::array<double, kNumStates> r{};
  for (int i = 0; i < kNumStates; ++i) {
    const auto n = row_sum(c, i);
    r[i] = n == 0 ? std::nan("") : static_cast<double>(c[i][i]) / static_cast<double>(n);
  }
  return r;
}

double balanced_accuracy(const Confusion& c) {
  double sum = 0.0;
  int represented = 0;
  for (double r : per_class_recall(c)) {
    if (std::isnan(r)) continue;
    sum += r;
    ++represented;
  }
  if (represented == 0) throw ValidationError("balanced accuracy of an all-zero confusion matrix");
  return sum / represented;
}

double plain_accuracy(const Confusion& c) {
  std::uint64_t total = 0, correct = 0;
  for (int i = 0; i < kNumStates; ++i) {
    total += row_sum(c, i);
    correct += c[i][i];
  }
  if (total == 0) throw ValidationError("accuracy of an all-zero confusion matrix");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double drowsy_recall(const Confusion& c) {
  const int d = code(StateLabel::Drowsy);
  const auto n = row_sum(c, d);
  if (n == 0) throw ValidationError("drowsy recall undefined: no drowsy samples");
  return static_cast<double>(c[d][d]) / static_cast<double>(n);
}

std::string EvalReport::get(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

EvalReport evaluate(std::span<const StateLabel> y_true, std::span<const StateLabel> y_pred,
                    std::vector<std::pair<std::string, std::string>> metadata) {
  EvalReport r;
  r.confusion = confusion_matrix(y_true, y_pred);
  r.balanced_accuracy = balanced_accuracy(r.confusion);
  r.per_class_recall = per_class_recall(r.confusion);
  r.plain_accuracy = plain_accuracy(r.confusion);
  r.metadata = std::move(metadata);
  return r;
}

void write_report(const EvalReport& r, std::ostream& out) {
  for (const auto& [k, v] : r.metadata) out << k << '=' << v << '\n';
  out << "balanced_accuracy=" << format_double(r.balanced_accuracy) << '\n';
  out << "plain_accuracy=" << format_double(r.plain_accuracy) << '\n';
  for (int i = 0; i < kNumStates; ++i)
    out << "recall." << to_string(label_from_code(i)) << '=' << format_double(r.per_class_recall[i]) << '\n';
  out << "confusion:\n";
  for (const auto& row : r.confusion) out << row[0] << ',' << row[1] << ',' << row[2] << '\n';
}

EvalReport read_report(std::istream& in) {
  EvalReport r;
  std::string line;
  std::size_t line_no = 0;
  bool in_confusion = false;
  int confusion_row = 0;
  bool have_balanced = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (in_confusion) {
      if (confusion_row >= kNumStates) throw ParseError("extra confusion row", line_no);
      const auto f = split(t, ',');
      if (f.size() != kNumStates) throw ParseError("confusion rows need 3 values", line_no);
      for (int j = 0; j < kNumStates; ++j) r.confusion[confusion_row][j] = parse_uint(f[j], "count");
      ++confusion_row;
      continue;
    }
    if (t == "confusion:") {
      in_confusion = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const std::string key(t.substr(0, eq));
    const std::string value(t.substr(eq + 1));
    if (key == "balanced_accuracy") {
      r.balanced_accuracy = parse_double(value);
      have_balanced = true;
    } else if (key == "plain_accuracy") {
      r.plain_accuracy = parse_double(value);
    } else if (key.starts_with("recall.")) {
      const auto name = key.substr(7);
      for (int i = 0; i < kNumStates; ++i)
        if (name == to_string(label_from_code(i))) r.per_class_recall[i] = parse_double(value);
    } else {
      r.metadata.emplace_back(key, value);
    }
  }
  if (!have_balanced || confusion_row != kNumStates) throw ParseError("incomplete report");
  return r;
}

}  // namespace attn
