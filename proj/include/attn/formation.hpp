#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attn/core.hpp"
#include "attn/ingest.hpp"

namespace attn {

/// Retained length of the drowsy segment: a number of minutes, or everything
/// up to the end of the recording.
class DrowsyLength {
 public:
  static DrowsyLength minutes(double m);
  static DrowsyLength max() { return DrowsyLength(); }
  /// Accepts "10", "20", ... or "max".
  static DrowsyLength parse(std::string_view text);

  bool is_max() const { return !minutes_; }
  double minutes_value() const { return *minutes_; }
  std::string to_string() const;

  bool operator==(const DrowsyLength&) const = default;

 private:
  DrowsyLength() = default;
  std::optional<double> minutes_;
};

struct FormationParams {
  DrowsyLength d_l = DrowsyLength::minutes(20.0);
  std::vector<std::string> channels = canonical_channels();
  int drop_first_trials = 2;

  void validate() const;
};

struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
};

/// Recording trimmed to the labeled timeline with one label per sample row.
struct LabeledRecording {
  RawRecording recording;
  std::vector<StateLabel> labels;
  std::array<Segment, kNumStates> segments;  // indexed by state code
};

/// Sample index of a timeline mark: round(minutes * 60 * fs).
std::size_t boundary_sample(double minutes, double fs);

Manifest select_trials(const Manifest& manifest, int drop_first);
std::vector<RawRecording> select_trials(const std::vector<RawRecording>& recordings, int drop_first);

/// Focused for [0, 10) min, Unfocused for [10, 20) min, Drowsy from 20 min up
/// to 20 + d_L min (or the recording end). Samples past that are dropped.
LabeledRecording assign_labels(const RawRecording& rec, const FormationParams& params);

LabeledRecording select_channels(const LabeledRecording& rec, std::span<const std::string> channels);

/// assign_labels followed by select_channels(params.channels).
LabeledRecording form_recording(const RawRecording& rec, const FormationParams& params);

void validate(const LabeledRecording& rec);

}  // namespace attn
