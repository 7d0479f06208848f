#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "attn/sweep.hpp"
#include "attn/text.hpp"

namespace attn {

const std::vector<std::string>& table_axes() {
  static const std::vector<std::string> axes{"d_l",      "w_l",      "w_s",     "w_ratio", "channels",
                                             "classifier", "paradigm", "subject", "seed"};
  return axes;
}

namespace {

std::string axis_value(const SweepRecord& r, const std::string& axis, double fs) {
  const auto& p = r.point;
  if (axis == "w_ratio") return format_double(static_cast<double>(p.w_s) / (p.w_l * fs));
  if (axis == "d_l") return p.d_l.to_string();
  if (axis == "w_l") return format_double(p.w_l);
  if (axis == "w_s") return std::to_string(p.w_s);
  if (axis == "channels") return p.channel_key();
  if (axis == "classifier") return model_kind(p.classifier);
  if (axis == "paradigm") return std::string(to_string(p.paradigm));
  if (axis == "subject") return r.test_subject;
  return std::to_string(r.seed);
}

struct Stats {
  double mean, best, std;
};

Stats summarize(const std::vector<double>& v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan, nan};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : nan;
  return {mean, *std::max_element(v.begin(), v.end()), sd};
}

}  // namespace

void emit_table(const SweepResult& result, const std::vector<std::string>& group_by, std::ostream& out,
                bool drowsy) {
  for (const auto& a : group_by)
    if (std::find(table_axes().begin(), table_axes().end(), a) == table_axes().end())
      throw ValidationError("unknown axis '" + a + "'");

  std::vector<std::string> header = group_by;
  header.insert(header.end(), {"runs", "mean_accuracy", "best_accuracy", "std_accuracy"});
  if (drowsy) header.insert(header.end(), {"mean_drowsy_recall", "best_drowsy_recall", "std_drowsy_recall"});
  out << join(header, ",") << '\n';

  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : result.records) {
    if (!r.report) continue;
    std::vector<std::string> key;
    for (const auto& a : group_by) key.push_back(axis_value(r, a, result.sample_rate_hz));
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.first.push_back(r.report->balanced_accuracy);
    const double dr = r.report->per_class_recall[code(StateLabel::Drowsy)];
    if (!std::isnan(dr)) it->second.second.push_back(dr);
  }
  for (const auto& key : order) {
    const auto& [acc, rec] = groups.at(key);
    std::vector<std::string> row = key;
    const auto a = summarize(acc);
    row.insert(row.end(), {std::to_string(acc.size()), format_double(a.mean), format_double(a.best),
                           format_double(a.std)});
    if (drowsy) {
      const auto d = summarize(rec);
      row.insert(row.end(), {format_double(d.mean), format_double(d.best), format_double(d.std)});
    }
    out << join(row, ",") << '\n';
  }
}

}  // namespace attn
