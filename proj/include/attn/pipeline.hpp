#pragma once

#include <string>
#include <utility>
#include <vector>

#include "attn/features.hpp"
#include "attn/formation.hpp"
#include "attn/ingest.hpp"
#include "attn/metrics.hpp"
#include "attn/model.hpp"
#include "attn/spectral.hpp"
#include "attn/split.hpp"

namespace attn {

struct FeatureParams {
  StftParams stft;
  BinningParams binning;
  SmoothingParams smoothing;
  double db_floor = kDecibelFloor;
};

/// Every tunable of the toolchain with the defaults of the final pipeline:
/// d_L = 20 min, w_L = 4 s, w_S = 128, 0.5 Hz bins over (0, 18] Hz, 15 s
/// smoothing, standardization, all seven channels.
struct RunConfig {
  std::string subcommand;
  FormationParams formation;
  FeatureParams features;
  SplitSpec split;
  ModelConfig model = SvmConfig{};
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues describe(const FormationParams& p);
KeyValues describe(const FeatureParams& p);
KeyValues describe(const SplitSpec& s);
KeyValues describe(const RunConfig& c);

/// Drops the first trials per subject and loads the rest.
std::vector<RawRecording> load_corpus(const Manifest& manifest, int drop_first,
                                      const RecordingExpectation& expect = {});

/// Spectrogram, binning, running average, decibels and flattening of one trial.
FeatureMatrix featurize_trial(const LabeledRecording& rec, const FeatureParams& params);

/// Forms (labels, d_L trim, channel selection) and featurizes every recording,
/// concatenating rows in recording order. Trial selection is the caller's job.
FeatureMatrix featurize(const std::vector<RawRecording>& recordings, const FormationParams& formation,
                        const FeatureParams& params);

struct ExperimentResult {
  DatasetSplit split;
  TrainedModel model;  // carries the scaler fitted on the training rows
  EvalReport report;
};

/// split -> fit scaler on train -> standardize both sides -> train -> evaluate on test.
ExperimentResult run_experiment(const FeatureMatrix& features, const SplitSpec& split, const ModelConfig& model,
                                KeyValues metadata = {});

/// Evaluates a trained model (applying its scaler when present) on `rows`.
EvalReport evaluate_model(const TrainedModel& model, const FeatureMatrix& rows, KeyValues metadata = {});

}  // namespace attn
