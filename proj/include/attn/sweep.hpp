#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attn/pipeline.hpp"

namespace attn {

/// Named axes of an experiment grid plus the settings shared by every point.
struct SweepGrid {
  std::vector<DrowsyLength> d_l{DrowsyLength::minutes(20.0)};
  std::vector<double> w_l{4.0};
  std::vector<std::size_t> w_s{128};
  std::vector<std::vector<std::string>> channel_sets{canonical_channels()};
  std::vector<ModelConfig> classifiers{SvmConfig{}};
  std::vector<Paradigm> paradigms{Paradigm::LeaveOneOut};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};

  double test_fraction = 0.2;
  int drop_first_trials = 2;
  BinningParams binning;
  SmoothingParams smoothing;
  double sample_rate_hz = kCanonicalSampleRateHz;

  void validate() const;
  /// Stable text form of every field; the basis of the grid fingerprint.
  std::string canonical_text() const;
};

/// Flat `key = comma-list` grammar, one key per line, '#' comments. Keys:
///   d_l, w_l, w_s, channels (subsets as A|B|C, or "all"), classifiers,
///   paradigms, seeds (values or a..b ranges), test_fraction,
///   drop_first_trials, bin_size, f_range (lo, hi), smoothing_s, fs,
///   rf.num_trees, rf.max_depth, rf.min_samples_leaf, svm.c, svm.epochs,
///   mlp.epochs, mlp.batch_size, mlp.learning_rate, mlp.dropout.
SweepGrid parse_grid(std::istream& in);
SweepGrid load_grid(const std::filesystem::path& path);

struct GridPoint {
  DrowsyLength d_l = DrowsyLength::max();
  double w_l = 4.0;
  std::size_t w_s = 128;
  std::vector<std::string> channels;
  ModelConfig classifier;
  Paradigm paradigm = Paradigm::LeaveOneOut;

  std::string channel_key() const;  // "F3|F4|..."
  /// Feature-defining part of the key (formation + spectral settings).
  std::string feature_key() const;
  std::string key() const;
};

struct SweepRecord {
  GridPoint point;
  std::string test_subject;  // "" for common-subject
  std::uint64_t seed = 0;         // seed-axis value
  std::uint64_t record_seed = 0;  // derived from (fingerprint, point key, seed)
  std::optional<EvalReport> report;
  std::string error;
  double seconds = 0.0;  // wall clock, not part of the canonical output

  std::string record_key() const;
};

struct SweepResult {
  std::string fingerprint;
  double sample_rate_hz = kCanonicalSampleRateHz;  // for the w_S / w_L ratio
  std::vector<SweepRecord> records;
};

struct SweepOptions {
  int workers = 1;
  bool fail_fast = false;
  std::optional<std::filesystem::path> cache_dir;
  /// Records with matching keys are reused when its fingerprint matches.
  const SweepResult* resume_from = nullptr;
  std::function<void(const SweepRecord&)> on_record;
};

/// Loaded recordings; run_sweep drops the first trials per the grid.
struct Corpus {
  std::vector<RawRecording> recordings;
  std::string content_hash;

  static Corpus from(std::vector<RawRecording> recordings);
  std::vector<std::string> subjects() const;
};

std::string grid_fingerprint(const SweepGrid& grid, const Corpus& corpus);
std::vector<GridPoint> expand_points(const SweepGrid& grid);
std::uint64_t record_seed(const std::string& fingerprint, const GridPoint& point, std::uint64_t seed);
FeatureParams feature_params(const SweepGrid& grid, const GridPoint& point);
FormationParams formation_params(const SweepGrid& grid, const GridPoint& point);

/// Every (point x seed x test subject) record, in canonical order.
SweepResult run_sweep(const Corpus& corpus, const SweepGrid& grid, const SweepOptions& options = {});

/// The single experiment a sweep record stands for.
ExperimentResult run_record(const FeatureMatrix& features, const SweepGrid& grid, const SweepRecord& record);

void write_results(const SweepResult& result, std::ostream& out);
SweepResult read_results(std::istream& in);

/// Axis names accepted by emit_table; w_ratio is w_S / (w_L * fs).
const std::vector<std::string>& table_axes();

/// One row per group: runs, mean/best/std of balanced accuracy (sample std),
/// and optionally the same for drowsy recall. Groups appear in first-seen order.
void emit_table(const SweepResult& result, const std::vector<std::string>& group_by, std::ostream& out,
                bool drowsy_recall = true);

}  // namespace attn
