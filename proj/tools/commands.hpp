#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace attn::cli {

struct SynthOptions {
  std::string out_dir;
  int subjects = 5;
  int trials = 5;
  double minutes = 45.0;
  std::uint64_t seed = 1;
  double variability = 0.6;
  double noise_exponent = 1.0;
};

// formation + spectral flags shared by featurize
struct FeatureOptions {
  std::string d_l = "20";
  std::string channels = "all";
  int drop_first_trials = 2;
  double w_l = 4.0;
  std::size_t w_s = 128;
  double bin_size = 0.5;
  double f_lo = 0.0;
  double f_hi = 18.0;
  double smoothing = 15.0;
};

struct FeaturizeOptions {
  std::string manifest;
  std::string out;
  FeatureOptions features;
};

struct ModelOptions {
  std::string model = "svm";
  std::optional<int> trees;
  std::optional<int> max_depth;
  std::optional<int> min_samples_leaf;
  std::optional<double> svm_c;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> dropout;
};

struct TrainOptions {
  std::string features;
  std::string model_out;
  std::string report;
  std::string paradigm = "common-subject";
  std::string subject;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  ModelOptions model;
};

struct EvalOptions {
  std::string model;
  std::string features;
  std::string report;
  std::string subject;
};

struct SweepOptions {
  std::string grid;
  std::string manifest;
  std::string out;
  int workers = 1;
  bool fail_fast = false;
  std::string cache_dir;
  bool resume = false;
  std::string tables_dir;
};

struct ReportOptions {
  std::string results;
  std::string eval_report;
  std::string group_by = "classifier,paradigm";
  std::string out;
  bool no_drowsy = false;
};

int run_synth(const SynthOptions& o);
int run_featurize(const FeaturizeOptions& o);
int run_train(const TrainOptions& o);
int run_eval(const EvalOptions& o);
int run_sweep(const SweepOptions& o);
int run_report(const ReportOptions& o);

/// Splices `--config <file>` contents into argv ahead of the explicit flags,
/// so flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace attn::cli
