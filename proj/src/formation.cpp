#include "attn/formation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "attn/text.hpp"

namespace attn {

DrowsyLength DrowsyLength::minutes(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("d_L must be a positive number of minutes or 'max'");
  DrowsyLength d;
  d.minutes_ = m;
  return d;
}

DrowsyLength DrowsyLength::parse(std::string_view text) {
  text = trim(text);
  if (text == "max") return max();
  return minutes(parse_double(text, "d_L"));
}

std::string DrowsyLength::to_string() const { return minutes_ ? format_double(*minutes_) : "max"; }

void FormationParams::validate() const {
  if (channels.empty()) throw ValidationError("channel selection must not be empty");
  if (drop_first_trials < 0) throw ValidationError("drop_first_trials must be >= 0");
  std::set<std::string> seen;
  for (const auto& c : channels)
    if (!seen.insert(c).second) throw ValidationError("channel '" + c + "' selected twice");
}

std::size_t boundary_sample(double minutes, double fs) {
  return static_cast<std::size_t>(std::llround(minutes * 60.0 * fs));
}

namespace {

template <typename T, typename SubjectOf, typename TrialOf>
std::vector<T> drop_trials(const std::vector<T>& items, int drop_first, SubjectOf subject_of, TrialOf trial_of) {
  if (drop_first < 0) throw ValidationError("drop_first must be >= 0");
  std::vector<T> kept;
  std::map<std::string, int> remaining;
  for (const auto& item : items) {
    auto& count = remaining[subject_of(item)];
    if (trial_of(item) > drop_first) {
      kept.push_back(item);
      ++count;
    }
  }
  for (const auto& [subject, count] : remaining)
    if (count == 0)
      throw ValidationError("subject '" + subject + "' has no trials left after dropping the first " +
                            std::to_string(drop_first));
  return kept;
}

}  // namespace

Manifest select_trials(const Manifest& manifest, int drop_first) {
  Manifest out;
  out.entries = drop_trials(
      manifest.entries, drop_first, [](const ManifestEntry& e) { return e.subject_id; },
      [](const ManifestEntry& e) { return e.trial_index; });
  return out;
}

std::vector<RawRecording> select_trials(const std::vector<RawRecording>& recordings, int drop_first) {
  return drop_trials(
      recordings, drop_first, [](const RawRecording& r) { return r.subject_id; },
      [](const RawRecording& r) { return r.trial_index; });
}

LabeledRecording assign_labels(const RawRecording& rec, const FormationParams& params) {
  const double fs = rec.sample_rate_hz;
  const std::string who = rec.subject_id + "/trial " + std::to_string(rec.trial_index);
  const std::size_t b10 = boundary_sample(10.0, fs);
  const std::size_t b20 = boundary_sample(20.0, fs);
  const std::size_t n = rec.num_samples();
  if (n < b20)
    throw ValidationError(who + ": recording is " + format_double(rec.duration_minutes()) +
                          " min long, labeling needs at least 20 min");
  std::size_t end = n;
  if (!params.d_l.is_max()) end = std::min(n, boundary_sample(20.0 + params.d_l.minutes_value(), fs));
  if (end == b20) warn(who + ": no drowsy samples available for d_L = " + params.d_l.to_string());

  LabeledRecording out;
  out.recording.subject_id = rec.subject_id;
  out.recording.trial_index = rec.trial_index;
  out.recording.sample_rate_hz = fs;
  out.recording.channel_labels = rec.channel_labels;
  out.recording.samples.rows = end;
  out.recording.samples.cols = rec.samples.cols;
  out.recording.samples.values.assign(rec.samples.values.begin(),
                                      rec.samples.values.begin() + static_cast<std::ptrdiff_t>(end * rec.samples.cols));
  out.segments = {Segment{0, b10}, Segment{b10, b20}, Segment{b20, end}};
  out.labels.resize(end);
  for (int s = 0; s < kNumStates; ++s)
    std::fill(out.labels.begin() + static_cast<std::ptrdiff_t>(out.segments[s].begin),
              out.labels.begin() + static_cast<std::ptrdiff_t>(out.segments[s].end), label_from_code(s));
  return out;
}

LabeledRecording select_channels(const LabeledRecording& rec, std::span<const std::string> channels) {
  if (channels.empty()) throw ValidationError("channel selection must not be empty");
  std::vector<std::size_t> cols;
  cols.reserve(channels.size());
  for (const auto& c : channels) cols.push_back(rec.recording.channel_index(c));
  LabeledRecording out;
  out.recording.subject_id = rec.recording.subject_id;
  out.recording.trial_index = rec.recording.trial_index;
  out.recording.sample_rate_hz = rec.recording.sample_rate_hz;
  out.recording.channel_labels.assign(channels.begin(), channels.end());
  out.recording.samples = select_columns(rec.recording.samples, cols);
  out.labels = rec.labels;
  out.segments = rec.segments;
  return out;
}

LabeledRecording form_recording(const RawRecording& rec, const FormationParams& params) {
  params.validate();
  return select_channels(assign_labels(rec, params), params.channels);
}

void validate(const LabeledRecording& rec) {
  validate(rec.recording, false);
  if (rec.labels.size() != rec.recording.num_samples())
    throw ValidationError("label array length does not match sample count");
  std::size_t expected_begin = 0;
  for (int s = 0; s < kNumStates; ++s) {
    const auto& seg = rec.segments[s];
    if (seg.begin != expected_begin || seg.end < seg.begin) throw ValidationError("state segments are not contiguous");
    for (std::size_t i = seg.begin; i < seg.end; ++i)
      if (rec.labels[i] != label_from_code(s)) throw ValidationError("labels disagree with state segments");
    expected_begin = seg.end;
  }
  if (expected_begin != rec.labels.size()) throw ValidationError("state segments do not cover the recording");
}

}  // namespace attn
