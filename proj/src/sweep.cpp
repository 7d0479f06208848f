#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include <omp.h>

#include "attn/sweep.hpp"
#include "attn/text.hpp"

namespace attn {

Corpus Corpus::from(std::vector<RawRecording> recordings) {
  Corpus c;
  c.content_hash = corpus_hash(recordings);
  c.recordings = std::move(recordings);
  return c;
}

std::vector<std::string> Corpus::subjects() const {
  std::vector<std::string> out;
  for (const auto& r : recordings)
    if (std::find(out.begin(), out.end(), r.subject_id) == out.end()) out.push_back(r.subject_id);
  std::sort(out.begin(), out.end());
  return out;
}

std::string grid_fingerprint(const SweepGrid& grid, const Corpus& corpus) {
  Fnv1a h;
  h.update(grid.canonical_text());
  h.update("corpus=" + corpus.content_hash);
  return h.hex();
}

std::uint64_t record_seed(const std::string& fingerprint, const GridPoint& point, std::uint64_t seed) {
  Fnv1a a, b;
  a.update(fingerprint);
  b.update(point.key());
  return mix_seed(a.digest(), b.digest(), seed);
}

ExperimentResult run_record(const FeatureMatrix& features, const SweepGrid& grid, const SweepRecord& record) {
  SplitSpec split;
  split.paradigm = record.point.paradigm;
  split.subject = record.test_subject;
  split.test_fraction = grid.test_fraction;
  split.seed = record.record_seed;
  auto model = record.point.classifier;
  set_model_seed(model, mix_seed(record.record_seed, 1));
  KeyValues meta{{"point", record.point.key()},
                 {"seed", std::to_string(record.seed)},
                 {"record_seed", std::to_string(record.record_seed)}};
  return run_experiment(features, split, model, std::move(meta));
}

namespace {

std::string file_safe(const std::string& key) {
  std::string out;
  for (char c : key) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '=' || c == '-') ? c : '_';
  return out;
}

std::string cache_fingerprint(const SweepGrid& grid, const Corpus& corpus) {
  Fnv1a h;
  h.update("corpus=" + corpus.content_hash);
  h.update(";drop_first=" + std::to_string(grid.drop_first_trials));
  h.update(";bins=" + format_double(grid.binning.bin_size_hz) + ":" + format_double(grid.binning.f_lo) + ":" +
           format_double(grid.binning.f_hi));
  h.update(";smoothing=" + format_double(grid.smoothing.span_seconds));
  h.update(";fs=" + format_double(grid.sample_rate_hz));
  return h.hex();
}

FeatureMatrix group_features(const std::vector<RawRecording>& selected, const SweepGrid& grid, const GridPoint& point,
                             const std::optional<std::filesystem::path>& cache_file) {
  if (cache_file && std::filesystem::exists(*cache_file)) return read_feature_matrix(*cache_file);
  auto m = featurize(selected, formation_params(grid, point), feature_params(grid, point));
  if (cache_file) {
    std::filesystem::create_directories(cache_file->parent_path());
    const auto tmp = cache_file->string() + ".tmp";
    write_feature_matrix(m, std::filesystem::path(tmp), {{"feature_key", point.feature_key()}});
    std::filesystem::rename(tmp, *cache_file);
  }
  return m;
}

}  // namespace

SweepResult run_sweep(const Corpus& corpus, const SweepGrid& grid, const SweepOptions& options) {
  grid.validate();
  if (options.workers < 1) throw ValidationError("workers must be at least 1");
  SweepResult result;
  result.fingerprint = grid_fingerprint(grid, corpus);
  result.sample_rate_hz = grid.sample_rate_hz;
  const auto selected = select_trials(corpus.recordings, grid.drop_first_trials);
  const auto subjects = Corpus::from(selected).subjects();

  // canonical record order: point, seed, subject
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> group_of;
  for (const auto& point : expand_points(grid)) {
    auto [it, fresh] = group_of.try_emplace(point.feature_key(), groups.size());
    if (fresh) groups.emplace_back();
    for (auto seed : grid.seeds) {
      const bool per_subject = point.paradigm != Paradigm::CommonSubject;
      const std::vector<std::string> tests = per_subject ? subjects : std::vector<std::string>{""};
      for (const auto& s : tests) {
        SweepRecord r;
        r.point = point;
        r.test_subject = s;
        r.seed = seed;
        r.record_seed = record_seed(result.fingerprint, point, seed);
        groups[it->second].push_back(result.records.size());
        result.records.push_back(std::move(r));
      }
    }
  }

  std::unordered_map<std::string, const SweepRecord*> previous;
  if (options.resume_from && options.resume_from->fingerprint == result.fingerprint)
    for (const auto& r : options.resume_from->records)
      if (r.report) previous.emplace(r.record_key(), &r);

  std::mutex mu;
  std::atomic<bool> stop{false};
  std::string first_error;
  const auto finish = [&](const SweepRecord& r) {
    std::lock_guard lock(mu);
    if (!r.error.empty() && options.fail_fast && first_error.empty()) {
      first_error = r.record_key() + ": " + r.error;
      stop = true;
    }
    if (options.on_record) options.on_record(r);
  };

  const auto cache_root =
      options.cache_dir ? std::optional(*options.cache_dir / cache_fingerprint(grid, corpus)) : std::nullopt;

  for (const auto& group : groups) {
    if (stop) break;
    std::vector<std::size_t> todo;
    for (auto i : group) {
      auto& r = result.records[i];
      if (auto it = previous.find(r.record_key()); it != previous.end()) {
        r.report = it->second->report;
        r.seconds = it->second->seconds;
      } else {
        todo.push_back(i);
      }
    }
    if (todo.empty()) continue;
    const auto& point = result.records[todo.front()].point;

    FeatureMatrix features;
    try {
      std::optional<std::filesystem::path> file;
      if (cache_root) file = *cache_root / (file_safe(point.feature_key()) + ".features");
      features = group_features(selected, grid, point, file);
    } catch (const std::exception& e) {
      for (auto i : todo) {
        result.records[i].error = e.what();
        finish(result.records[i]);
      }
      continue;
    }

#pragma omp parallel for schedule(dynamic) num_threads(options.workers)
    for (std::size_t k = 0; k < todo.size(); ++k) {
      if (stop) continue;
      auto& r = result.records[todo[k]];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r.report = run_record(features, grid, r).report;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      finish(r);
    }
  }
  if (!first_error.empty()) throw Error("sweep stopped: " + first_error);
  return result;
}

namespace {

constexpr const char* kResultsHeader =
    "d_l,w_l,w_s,channels,classifier,paradigm,test_subject,seed,record_seed,balanced_accuracy,plain_accuracy,"
    "recall_focused,recall_unfocused,recall_drowsy,c00,c01,c02,c10,c11,c12,c20,c21,c22,error";

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

}  // namespace

void write_results(const SweepResult& result, std::ostream& out) {
  out << "# fingerprint=" << result.fingerprint << '\n'
      << "# fs=" << format_double(result.sample_rate_hz) << '\n'
      << kResultsHeader << '\n';
  for (const auto& r : result.records) {
    const auto& p = r.point;
    out << p.d_l.to_string() << ',' << format_double(p.w_l) << ',' << p.w_s << ',' << p.channel_key() << ','
        << model_kind(p.classifier) << ',' << to_string(p.paradigm) << ',' << r.test_subject << ',' << r.seed << ','
        << r.record_seed << ',';
    if (r.report) {
      const auto& rep = *r.report;
      out << format_double(rep.balanced_accuracy) << ',' << format_double(rep.plain_accuracy);
      for (double v : rep.per_class_recall) out << ',' << format_double(v);
      for (const auto& row : rep.confusion)
        for (auto v : row) out << ',' << v;
    } else {
      out << ",,,,";
      for (int i = 0; i < 9; ++i) out << ',';
    }
    out << ',' << sanitize(r.error) << '\n';
  }
}

SweepResult read_results(std::istream& in) {
  SweepResult result;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# fingerprint=", 0) == 0) {
      result.fingerprint = line.substr(14);
      continue;
    }
    if (line.rfind("# fs=", 0) == 0) {
      try {
        result.sample_rate_hz = parse_double(line.substr(5), "fs");
      } catch (const Error& e) {
        throw ParseError(e.what(), line_no);
      }
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kResultsHeader) throw ParseError("unexpected results header", line_no);
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 24) throw ParseError("expected 24 fields, got " + std::to_string(f.size()), line_no);
    try {
      SweepRecord r;
      r.point.d_l = DrowsyLength::parse(f[0]);
      r.point.w_l = parse_double(f[1], "w_l");
      r.point.w_s = parse_uint(f[2], "w_s");
      r.point.channels = split_trimmed(f[3], '|');
      r.point.classifier = default_model_config(f[4]);
      r.point.paradigm = parse_paradigm(f[5]);
      r.test_subject = std::string(f[6]);
      r.seed = parse_uint(f[7], "seed");
      r.record_seed = parse_uint(f[8], "record_seed");
      if (!f[9].empty()) {
        EvalReport rep;
        rep.balanced_accuracy = parse_double(f[9]);
        rep.plain_accuracy = parse_double(f[10]);
        for (int c = 0; c < kNumStates; ++c) rep.per_class_recall[c] = parse_double(f[11 + c]);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) rep.confusion[i][j] = parse_uint(f[14 + 3 * i + j]);
        r.report = rep;
      }
      r.error = std::string(f[23]);
      result.records.push_back(std::move(r));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header) throw ParseError("missing results header");
  return result;
}

}  // namespace attn
