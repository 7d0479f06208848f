#include "attn/pipeline.hpp"

#include "attn/text.hpp"

namespace attn {

KeyValues describe(const FormationParams& p) {
  return {{"d_l", p.d_l.to_string()},
          {"channels", join(p.channels, "|")},
          {"drop_first_trials", std::to_string(p.drop_first_trials)}};
}

KeyValues describe(const FeatureParams& p) {
  return {{"w_l", format_double(p.stft.window_seconds)},
          {"w_s", std::to_string(p.stft.shift_samples)},
          {"window", "blackman"},
          {"fs", format_double(p.stft.sample_rate_hz)},
          {"bin_size", format_double(p.binning.bin_size_hz)},
          {"f_range", "(" + format_double(p.binning.f_lo) + "," + format_double(p.binning.f_hi) + "]"},
          {"smoothing_s", format_double(p.smoothing.span_seconds)},
          {"db_floor", format_double(p.db_floor)},
          {"scaler", "standardization"}};
}

KeyValues describe(const SplitSpec& s) {
  KeyValues kv{{"paradigm", std::string(to_string(s.paradigm))}};
  if (s.paradigm != Paradigm::CommonSubject) kv.emplace_back("subject", s.subject);
  if (s.paradigm != Paradigm::LeaveOneOut) kv.emplace_back("test_fraction", format_double(s.test_fraction));
  kv.emplace_back("seed", std::to_string(s.seed));
  return kv;
}

KeyValues describe(const RunConfig& c) {
  KeyValues kv{{"subcommand", c.subcommand}};
  for (auto& e : describe(c.formation)) kv.push_back(std::move(e));
  for (auto& e : describe(c.features)) kv.push_back(std::move(e));
  for (auto& e : describe(c.split)) kv.push_back(std::move(e));
  for (auto& e : describe(c.model)) kv.push_back(std::move(e));
  return kv;
}

std::vector<RawRecording> load_corpus(const Manifest& manifest, int drop_first, const RecordingExpectation& expect) {
  const auto selected = select_trials(manifest, drop_first);
  std::vector<RawRecording> out;
  out.reserve(selected.entries.size());
  for (const auto& e : selected.entries) out.push_back(load_recording(e, expect));
  return out;
}

FeatureMatrix featurize_trial(const LabeledRecording& rec, const FeatureParams& params) {
  auto sg = spectrogram(rec, params.stft);
  sg = bin_frequencies(sg, params.binning);
  sg = running_average(sg, params.smoothing);
  sg = to_decibels(sg, params.db_floor);
  return flatten(sg);
}

FeatureMatrix featurize(const std::vector<RawRecording>& recordings, const FormationParams& formation,
                        const FeatureParams& params) {
  formation.validate();
  params.stft.validate();
  params.binning.validate();
  if (recordings.empty()) throw ValidationError("no recordings to featurize");
  FeatureMatrix out;
  for (const auto& rec : recordings) {
    if (rec.sample_rate_hz != params.stft.sample_rate_hz)
      throw ValidationError(rec.subject_id + "/trial " + std::to_string(rec.trial_index) + ": sample rate " +
                            format_double(rec.sample_rate_hz) + " Hz differs from the STFT setting " +
                            format_double(params.stft.sample_rate_hz) + " Hz");
    out.append(featurize_trial(form_recording(rec, formation), params));
  }
  out.validate();
  return out;
}

EvalReport evaluate_model(const TrainedModel& model, const FeatureMatrix& rows, KeyValues metadata) {
  const auto predictions = model.scaler ? predict(model, apply_scaler(*model.scaler, rows)) : predict(model, rows);
  return evaluate(rows.labels, predictions, std::move(metadata));
}

ExperimentResult run_experiment(const FeatureMatrix& features, const SplitSpec& split_spec, const ModelConfig& config,
                                KeyValues metadata) {
  ExperimentResult r;
  r.split = make_split(features, split_spec);
  const auto train_rows = features.subset(r.split.train);
  const auto test_rows = features.subset(r.split.test);
  auto scaler = fit_scaler(train_rows);
  r.model = train(config, apply_scaler(scaler, train_rows));
  r.model.scaler = std::move(scaler);
  for (auto& e : describe(split_spec)) metadata.push_back(std::move(e));
  for (auto& e : describe(config)) metadata.push_back(std::move(e));
  metadata.emplace_back("train_rows", std::to_string(r.split.train.size()));
  metadata.emplace_back("test_rows", std::to_string(r.split.test.size()));
  r.report = evaluate_model(r.model, test_rows, std::move(metadata));
  return r;
}

}  // namespace attn
