#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attn/core.hpp"

namespace attn {

inline constexpr double kCanonicalSampleRateHz = 128.0;
inline constexpr double kMinFullTrialMinutes = 30.0;

const std::vector<std::string>& canonical_channels();

/// One trial of multi-channel EEG, samples in microvolts, rows ascending in time.
struct RawRecording {
  std::string subject_id;
  int trial_index = 1;
  double sample_rate_hz = kCanonicalSampleRateHz;
  std::vector<std::string> channel_labels;
  Matrix samples;  // num_samples x num_channels

  std::size_t num_samples() const { return samples.rows; }
  std::size_t num_channels() const { return samples.cols; }
  double duration_minutes() const { return static_cast<double>(samples.rows) / sample_rate_hz / 60.0; }
  std::vector<double> channel(std::size_t c) const;
  std::size_t channel_index(const std::string& label) const;  // throws when absent
};

/// Checks the structural invariants. With `full_trial` set, also requires the
/// 30-minute minimum length.
void validate(const RawRecording& rec, bool full_trial);

struct ManifestEntry {
  std::string subject_id;
  int trial_index = 1;
  std::filesystem::path file_path;
  std::optional<double> duration_override_min;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<std::string> subjects() const;  // sorted, unique
};

/// `subject_id,trial_index,relative_path[,duration_minutes]` per line; blank
/// lines and lines starting with '#' are skipped. Relative paths resolve
/// against `base_dir`.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);
/// Sorts by (subject, trial) and checks uniqueness and contiguity from 1.
void normalize_manifest(Manifest& manifest);
void write_manifest(const Manifest& manifest, std::ostream& out, const std::filesystem::path& base_dir);

struct RecordingExpectation {
  std::optional<double> sample_rate_hz = kCanonicalSampleRateHz;
  std::optional<std::vector<std::string>> channels;
};

RawRecording read_recording(std::istream& in, const std::string& source_name);
RawRecording load_recording(const ManifestEntry& entry, const RecordingExpectation& expect = {});
void write_recording(const RawRecording& rec, std::ostream& out);
void write_recording(const RawRecording& rec, const std::filesystem::path& path);

// ---- synthetic corpus ---------------------------------------------------

struct BandProfile {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  double gain = 1.0;  // band power during the state relative to background
};

/// focused 12-18 Hz, unfocused 8-12 Hz, drowsy 1-7 Hz, each with gain 4.
std::array<BandProfile, kNumStates> default_band_profile();

struct SynthSpec {
  int num_subjects = 5;
  int trials_per_subject = 5;
  double trial_duration_min = 45.0;
  std::array<BandProfile, kNumStates> profile = default_band_profile();
  double subject_variability = 0.6;
  double noise_exponent = 1.0;
  std::uint64_t seed = 1;
  double sample_rate_hz = kCanonicalSampleRateHz;
  std::vector<std::string> channels = canonical_channels();
};

void validate(const SynthSpec& spec);

/// Per-subject band profile after the subject_variability perturbation.
std::array<BandProfile, kNumStates> subject_profile(const SynthSpec& spec, int subject_index);

/// subject_index is 0-based; ids are "s1".."sN" and trial indices run 1..trials_per_subject.
std::string synthetic_subject_id(int subject_index);
RawRecording generate_trial(const SynthSpec& spec, int subject_index, int trial_index);
std::vector<RawRecording> generate_synthetic(const SynthSpec& spec);

/// Content fingerprint of a set of recordings (identity + sample bits).
std::string corpus_hash(const std::vector<RawRecording>& recordings);

}  // namespace attn
