#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "attn/pipeline.hpp"
#include "attn/sweep.hpp"
#include "attn/text.hpp"

namespace fs = std::filesystem;

namespace attn::cli {

namespace {

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.what());
  } catch (const ChecksumError& e) {
    throw ChecksumError(name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  Fnv1a h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::vector<std::string> parse_channels(const std::string& text) {
  if (text == "all") return canonical_channels();
  return split_trimmed(text, ',');
}

FormationParams formation_from(const FeatureOptions& o) {
  FormationParams f;
  f.d_l = DrowsyLength::parse(o.d_l);
  f.channels = parse_channels(o.channels);
  f.drop_first_trials = o.drop_first_trials;
  f.validate();
  return f;
}

FeatureParams features_from(const FeatureOptions& o) {
  FeatureParams p;
  p.stft.window_seconds = o.w_l;
  p.stft.shift_samples = o.w_s;
  p.binning.bin_size_hz = o.bin_size;
  p.binning.f_lo = o.f_lo;
  p.binning.f_hi = o.f_hi;
  p.smoothing.span_seconds = o.smoothing;
  p.stft.validate();
  p.binning.validate();
  if (!(p.smoothing.span_seconds > 0.0)) throw ValidationError("smoothing span must be positive");
  return p;
}

ModelConfig model_from(const ModelOptions& o) {
  auto cfg = default_model_config(o.model);
  if (auto* rf = std::get_if<RfConfig>(&cfg)) {
    if (o.trees) rf->num_trees = *o.trees;
    if (o.max_depth) rf->max_depth = *o.max_depth;
    if (o.min_samples_leaf) rf->min_samples_leaf = *o.min_samples_leaf;
    rf->validate();
  } else if (auto* svm = std::get_if<SvmConfig>(&cfg)) {
    if (o.svm_c) svm->c = *o.svm_c;
    if (o.epochs) svm->epochs = *o.epochs;
    svm->validate();
  } else {
    auto& mlp = std::get<MlpConfig>(cfg);
    if (o.dropout && mlp.arch == MlpArch::Dnn6) mlp = MlpConfig::dnn6(*o.dropout);
    if (o.epochs) mlp.epochs = *o.epochs;
    if (o.batch_size) mlp.batch_size = *o.batch_size;
    if (o.learning_rate) mlp.learning_rate = *o.learning_rate;
    mlp.validate();
  }
  return cfg;
}

void print_report(const EvalReport& r, std::ostream& out) {
  out << "balanced accuracy " << format_double(r.balanced_accuracy) << "  plain accuracy "
      << format_double(r.plain_accuracy) << '\n';
  for (int c = 0; c < kNumStates; ++c)
    out << "  recall " << to_string(label_from_code(c)) << ' ' << format_double(r.per_class_recall[c]) << '\n';
}

}  // namespace

int run_synth(const SynthOptions& o) {
  SynthSpec spec;
  spec.num_subjects = o.subjects;
  spec.trials_per_subject = o.trials;
  spec.trial_duration_min = o.minutes;
  spec.seed = o.seed;
  spec.subject_variability = o.variability;
  spec.noise_exponent = o.noise_exponent;
  validate(spec);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  Manifest manifest;
  std::vector<RawRecording> all;
  for (int s = 0; s < spec.num_subjects; ++s) {
    for (int t = 1; t <= spec.trials_per_subject; ++t) {
      auto rec = generate_trial(spec, s, t);
      const auto name = rec.subject_id + "_t" + std::to_string(t) + ".csv";
      write_recording(rec, dir / name);
      ManifestEntry e{rec.subject_id, t, name, std::nullopt};
      if (spec.trial_duration_min < 30.0) e.duration_override_min = spec.trial_duration_min;
      manifest.entries.push_back(e);
      rec.samples.values.clear();
      rec.samples.values.shrink_to_fit();
      all.push_back(std::move(rec));
    }
  }
  normalize_manifest(manifest);

  auto out = open_out(dir / "manifest.csv");
  out << "# subcommand=synth subjects=" << spec.num_subjects << " trials=" << spec.trials_per_subject
      << " minutes=" << format_double(spec.trial_duration_min) << " seed=" << spec.seed
      << " variability=" << format_double(spec.subject_variability)
      << " noise_exponent=" << format_double(spec.noise_exponent) << " fs=" << format_double(spec.sample_rate_hz)
      << '\n';
  write_manifest(manifest, out, dir);
  std::cout << "wrote " << manifest.entries.size() << " recordings and manifest.csv to " << dir.string() << '\n';
  return 0;
}

int run_featurize(const FeaturizeOptions& o) {
  const auto formation = stage("config", [&] { return formation_from(o.features); });
  const auto params = stage("config", [&] { return features_from(o.features); });
  const auto recordings = stage("ingest", [&] {
    const auto manifest = load_manifest(o.manifest);
    return load_corpus(manifest, formation.drop_first_trials);
  });
  const auto m = stage("features", [&] { return featurize(recordings, formation, params); });

  Metadata meta{{"subcommand", "featurize"}};
  for (auto& kv : describe(formation)) meta.push_back(kv);
  for (auto& kv : describe(params)) meta.push_back(kv);
  meta.emplace_back("input_hash", corpus_hash(recordings));
  stage("output", [&] {
    write_feature_matrix(m, fs::path(o.out), meta);
    return 0;
  });
  const std::size_t bins = params.binning.num_bins();
  std::cout << m.num_rows() << " rows x " << m.num_features() << " features (" << formation.channels.size()
            << " channels x " << bins << " bins) from " << recordings.size() << " trials\n";
  return 0;
}

int run_train(const TrainOptions& o) {
  SplitSpec split;
  ModelConfig model;
  stage("config", [&] {
    split.paradigm = parse_paradigm(o.paradigm);
    split.subject = o.subject;
    split.test_fraction = o.test_fraction;
    split.seed = o.seed;
    if (split.paradigm != Paradigm::CommonSubject && split.subject.empty())
      throw ValidationError("--subject is required for " + o.paradigm);
    model = model_from(o.model);
    set_model_seed(model, mix_seed(o.seed, 1));
    return 0;
  });
  Metadata upstream;
  const auto features = stage("ingest", [&] { return read_feature_matrix(fs::path(o.features), &upstream); });

  KeyValues meta{{"subcommand", "train"}};
  for (const auto& [k, v] : upstream) {
    if (k == "subcommand") continue;
    meta.emplace_back(k == "input_hash" ? "corpus_hash" : k, v);
  }
  meta.emplace_back("input_hash", file_hash(o.features));
  const auto result = stage("train", [&] { return run_experiment(features, split, model, meta); });

  auto trained = result.model;
  trained.provenance = result.report.metadata;
  const auto report_path = o.report.empty() ? o.model_out + ".report" : o.report;
  stage("output", [&] {
    save_model(trained, fs::path(o.model_out));
    auto out = open_out(report_path);
    write_report(result.report, out);
    return 0;
  });
  std::cout << "trained " << model_kind(model) << " on " << result.split.train.size() << " rows, tested on "
            << result.split.test.size() << '\n';
  print_report(result.report, std::cout);
  return 0;
}

int run_eval(const EvalOptions& o) {
  const auto model = stage("ingest", [&] { return load_model(fs::path(o.model)); });
  Metadata upstream;
  auto features = stage("ingest", [&] { return read_feature_matrix(fs::path(o.features), &upstream); });
  if (!o.subject.empty()) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < features.num_rows(); ++i)
      if (features.provenance[i].subject_id == o.subject) keep.push_back(i);
    if (keep.empty()) throw ValidationError("eval: no rows for subject '" + o.subject + "'");
    features = features.subset(keep);
  }
  KeyValues meta{{"subcommand", "eval"}};
  for (const auto& [k, v] : model.provenance)
    if (k != "subcommand") meta.emplace_back("model." + k, v);
  for (const auto& [k, v] : describe(model.config)) meta.emplace_back(k, v);
  if (!o.subject.empty()) meta.emplace_back("subject", o.subject);
  meta.emplace_back("model_hash", file_hash(o.model));
  meta.emplace_back("input_hash", file_hash(o.features));
  meta.emplace_back("rows", std::to_string(features.num_rows()));
  const auto report = stage("eval", [&] { return evaluate_model(model, features, meta); });
  stage("output", [&] {
    auto out = open_out(o.report);
    write_report(report, out);
    return 0;
  });
  print_report(report, std::cout);
  return 0;
}

int run_sweep(const SweepOptions& o) {
  const auto grid = stage("grid " + o.grid, [&] { return load_grid(o.grid); });
  const auto corpus = stage("ingest", [&] {
    auto recordings = load_corpus(load_manifest(o.manifest), 0, RecordingExpectation{grid.sample_rate_hz, {}});
    return Corpus::from(std::move(recordings));
  });

  attn::SweepOptions opts;
  opts.workers = o.workers;
  opts.fail_fast = o.fail_fast;
  if (!o.cache_dir.empty()) opts.cache_dir = fs::path(o.cache_dir);
  std::optional<SweepResult> previous;
  if (o.resume && fs::exists(o.out)) {
    std::ifstream in(o.out);
    previous = stage("resume", [&] { return read_results(in); });
    opts.resume_from = &*previous;
  }
  std::size_t done = 0, failed = 0;
  opts.on_record = [&](const SweepRecord& r) {
    ++done;
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "record " << r.record_key() << " failed: " << r.error << '\n';
    }
  };
  const auto result = stage("sweep", [&] { return attn::run_sweep(corpus, grid, opts); });

  stage("output", [&] {
    auto out = open_out(o.out);
    out << "# subcommand=sweep corpus_hash=" << corpus.content_hash << " grid_hash=" << file_hash(o.grid) << '\n';
    std::istringstream canon(grid.canonical_text());
    for (std::string line; std::getline(canon, line);) out << "# grid." << line << '\n';
    write_results(result, out);

    auto timings = open_out(o.out + ".timings.csv");
    timings << "record,seconds\n";
    for (const auto& r : result.records) timings << '"' << r.record_key() << "\"," << format_double(r.seconds) << '\n';

    if (!o.tables_dir.empty()) {
      const std::vector<std::pair<std::string, std::vector<std::string>>> tables{
          {"by_classifier_paradigm.csv", {"classifier", "paradigm"}},
          {"by_d_l.csv", {"d_l", "classifier"}},
          {"by_window.csv", {"w_l", "w_s"}},
          {"by_window_ratio.csv", {"w_l", "w_ratio"}},
          {"by_channels.csv", {"channels", "classifier"}}};
      for (const auto& [name, axes] : tables) {
        auto t = open_out(fs::path(o.tables_dir) / name);
        emit_table(result, axes, t);
      }
    }
    return 0;
  });
  std::cout << result.records.size() << " records (" << done << " run, " << failed << " failed), fingerprint "
            << result.fingerprint << '\n';
  return 0;
}

int run_report(const ReportOptions& o) {
  if (o.results.empty() == o.eval_report.empty())
    throw ValidationError("report: give exactly one of --results or --eval-report");
  if (!o.eval_report.empty()) {
    std::ifstream in(o.eval_report);
    if (!in) throw Error("report: cannot open '" + o.eval_report + "'");
    const auto r = stage("report", [&] { return read_report(in); });
    for (const auto& [k, v] : r.metadata) std::cout << k << " = " << v << '\n';
    print_report(r, std::cout);
    return 0;
  }
  std::ifstream in(o.results);
  if (!in) throw Error("report: cannot open '" + o.results + "'");
  const auto result = stage("report", [&] { return read_results(in); });
  const auto axes = split_trimmed(o.group_by, ',');
  if (o.out.empty()) {
    stage("report", [&] {
      emit_table(result, axes, std::cout, !o.no_drowsy);
      return 0;
    });
  } else {
    auto out = open_out(o.out);
    stage("report", [&] {
      emit_table(result, axes, out, !o.no_drowsy);
      return 0;
    });
  }
  return 0;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  const std::string sub = args[1];
  std::optional<std::string> path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw Error("cannot open config file '" + *path + "'");
  std::vector<std::string> injected;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(*path + ": malformed section header", line_no);
      section = std::string(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    if (!section.empty() && section != sub) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(*path + ": expected 'key = value'", line_no);
    const std::string key(trim(t.substr(0, eq)));
    std::string value(trim(t.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out{args[0], args[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace attn::cli
