#include <fstream>
#include <set>
#include <sstream>

#include "attn/sweep.hpp"
#include "attn/text.hpp"

namespace attn {

void SweepGrid::validate() const {
  if (d_l.empty() || w_l.empty() || w_s.empty() || channel_sets.empty() || classifiers.empty() || paradigms.empty() ||
      seeds.empty())
    throw ValidationError("every sweep axis needs at least one value");
  for (double w : w_l)
    if (!(w >= 2.0 && w <= 60.0)) throw ValidationError("w_L = " + format_double(w) + " is outside [2, 60]");
  for (auto s : w_s)
    if (s < 4 || s > 1280) throw ValidationError("w_S = " + std::to_string(s) + " is outside [4, 1280]");
  for (const auto& set : channel_sets) {
    FormationParams f;
    f.channels = set;
    f.drop_first_trials = drop_first_trials;
    f.validate();
  }
  for (const auto& c : classifiers) {
    std::visit([](const auto& cfg) { cfg.validate(); }, c);
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test_fraction must lie in (0, 1)");
  binning.validate();
  if (!(smoothing.span_seconds > 0.0)) throw ValidationError("smoothing span must be positive");
}

std::string SweepGrid::canonical_text() const {
  std::ostringstream s;
  s << "d_l=";
  for (const auto& d : d_l) s << d.to_string() << ',';
  s << "\nw_l=";
  for (double w : w_l) s << format_double(w) << ',';
  s << "\nw_s=";
  for (auto w : w_s) s << w << ',';
  s << "\nchannels=";
  for (const auto& set : channel_sets) s << join(set, "|") << ',';
  s << "\nclassifiers=";
  for (const auto& c : classifiers) {
    for (const auto& [k, v] : describe(c)) s << k << ':' << v << ';';
    s << ',';
  }
  s << "\nparadigms=";
  for (auto p : paradigms) s << to_string(p) << ',';
  s << "\nseeds=";
  for (auto v : seeds) s << v << ',';
  s << "\ntest_fraction=" << format_double(test_fraction) << "\ndrop_first_trials=" << drop_first_trials
    << "\nbin_size=" << format_double(binning.bin_size_hz) << "\nf_range=" << format_double(binning.f_lo) << ','
    << format_double(binning.f_hi) << "\nsmoothing_s=" << format_double(smoothing.span_seconds)
    << "\nfs=" << format_double(sample_rate_hz) << '\n';
  return s.str();
}

namespace {

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& values) {
  std::vector<std::uint64_t> out;
  for (const auto& v : values) {
    const auto dots = v.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_uint(v, "seed"));
      continue;
    }
    const auto lo = parse_uint(std::string_view(v).substr(0, dots), "seed");
    const auto hi = parse_uint(std::string_view(v).substr(dots + 2), "seed");
    if (hi < lo) throw ParseError("seed range '" + v + "' is descending");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

}  // namespace

SweepGrid parse_grid(std::istream& in) {
  SweepGrid g;
  std::vector<std::string> classifier_names{"svm"};
  std::optional<int> rf_trees, rf_depth, rf_leaf, svm_epochs, mlp_epochs, mlp_batch;
  std::optional<double> svm_c, mlp_lr, mlp_dropout;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value[, value...]'", line_no);
    const std::string key(trim(t.substr(0, eq)));
    const auto values = split_trimmed(t.substr(eq + 1), ',');
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
    for (const auto& v : values)
      if (v.empty()) throw ParseError("empty value for key '" + key + "'", line_no);
    const auto single = [&]() -> const std::string& {
      if (values.size() != 1) throw ParseError("key '" + key + "' takes a single value", line_no);
      return values.front();
    };
    try {
      if (key == "d_l") {
        g.d_l.clear();
        for (const auto& v : values) g.d_l.push_back(DrowsyLength::parse(v));
      } else if (key == "w_l") {
        g.w_l.clear();
        for (const auto& v : values) {
          const double w = parse_double(v, "w_l");
          if (!(w >= 2.0 && w <= 60.0)) throw ParseError("w_L = " + v + " is outside [2, 60]");
          g.w_l.push_back(w);
        }
      } else if (key == "w_s") {
        g.w_s.clear();
        for (const auto& v : values) {
          const auto w = parse_uint(v, "w_s");
          if (w < 4 || w > 1280) throw ParseError("w_S = " + v + " is outside [4, 1280]");
          g.w_s.push_back(w);
        }
      } else if (key == "channels") {
        g.channel_sets.clear();
        for (const auto& v : values) g.channel_sets.push_back(v == "all" ? canonical_channels() : split_trimmed(v, '|'));
      } else if (key == "classifiers") {
        for (const auto& v : values) default_model_config(v);
        classifier_names = values;
      } else if (key == "paradigms") {
        g.paradigms.clear();
        for (const auto& v : values) g.paradigms.push_back(parse_paradigm(v));
      } else if (key == "seeds") {
        g.seeds = parse_seeds(values);
      } else if (key == "test_fraction") {
        g.test_fraction = parse_double(single(), key);
      } else if (key == "drop_first_trials") {
        g.drop_first_trials = static_cast<int>(parse_int(single(), key));
      } else if (key == "bin_size") {
        g.binning.bin_size_hz = parse_double(single(), key);
      } else if (key == "f_range") {
        if (values.size() != 2) throw ParseError("f_range takes two values: lo, hi", line_no);
        g.binning.f_lo = parse_double(values[0], key);
        g.binning.f_hi = parse_double(values[1], key);
      } else if (key == "smoothing_s") {
        g.smoothing.span_seconds = parse_double(single(), key);
      } else if (key == "fs") {
        g.sample_rate_hz = parse_double(single(), key);
      } else if (key == "rf.num_trees") {
        rf_trees = static_cast<int>(parse_int(single(), key));
      } else if (key == "rf.max_depth") {
        rf_depth = static_cast<int>(parse_int(single(), key));
      } else if (key == "rf.min_samples_leaf") {
        rf_leaf = static_cast<int>(parse_int(single(), key));
      } else if (key == "svm.c") {
        svm_c = parse_double(single(), key);
      } else if (key == "svm.epochs") {
        svm_epochs = static_cast<int>(parse_int(single(), key));
      } else if (key == "mlp.epochs") {
        mlp_epochs = static_cast<int>(parse_int(single(), key));
      } else if (key == "mlp.batch_size") {
        mlp_batch = static_cast<int>(parse_int(single(), key));
      } else if (key == "mlp.learning_rate") {
        mlp_lr = parse_double(single(), key);
      } else if (key == "mlp.dropout") {
        mlp_dropout = parse_double(single(), key);
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }

  g.classifiers.clear();
  for (const auto& name : classifier_names) {
    auto cfg = default_model_config(name);
    if (auto* rf = std::get_if<RfConfig>(&cfg)) {
      if (rf_trees) rf->num_trees = *rf_trees;
      if (rf_depth) rf->max_depth = *rf_depth;
      if (rf_leaf) rf->min_samples_leaf = *rf_leaf;
    } else if (auto* svm = std::get_if<SvmConfig>(&cfg)) {
      if (svm_c) svm->c = *svm_c;
      if (svm_epochs) svm->epochs = *svm_epochs;
    } else {
      auto& mlp = std::get<MlpConfig>(cfg);
      if (mlp_epochs) mlp.epochs = *mlp_epochs;
      if (mlp_batch) mlp.batch_size = *mlp_batch;
      if (mlp_lr) mlp.learning_rate = *mlp_lr;
      if (mlp_dropout && mlp.arch == MlpArch::Dnn6) mlp = [&] {
        auto d = MlpConfig::dnn6(*mlp_dropout);
        d.epochs = mlp.epochs;
        d.batch_size = mlp.batch_size;
        d.learning_rate = mlp.learning_rate;
        return d;
      }();
    }
    g.classifiers.push_back(cfg);
  }
  g.validate();
  return g;
}

SweepGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file '" + path.string() + "'");
  return parse_grid(in);
}

std::string GridPoint::channel_key() const { return join(channels, "|"); }

std::string GridPoint::feature_key() const {
  return "d_l=" + d_l.to_string() + ";w_l=" + format_double(w_l) + ";w_s=" + std::to_string(w_s) +
         ";channels=" + channel_key();
}

std::string GridPoint::key() const {
  return feature_key() + ";classifier=" + model_kind(classifier) + ";paradigm=" + std::string(to_string(paradigm));
}

std::string SweepRecord::record_key() const {
  return point.key() + ";subject=" + test_subject + ";seed=" + std::to_string(seed);
}

std::vector<GridPoint> expand_points(const SweepGrid& grid) {
  std::vector<GridPoint> points;
  for (const auto& d : grid.d_l)
    for (double wl : grid.w_l)
      for (auto ws : grid.w_s)
        for (const auto& ch : grid.channel_sets)
          for (const auto& c : grid.classifiers)
            for (auto p : grid.paradigms) points.push_back({d, wl, ws, ch, c, p});
  return points;
}

FeatureParams feature_params(const SweepGrid& grid, const GridPoint& point) {
  FeatureParams p;
  p.stft.window_seconds = point.w_l;
  p.stft.shift_samples = point.w_s;
  p.stft.sample_rate_hz = grid.sample_rate_hz;
  p.binning = grid.binning;
  p.smoothing = grid.smoothing;
  return p;
}

FormationParams formation_params(const SweepGrid& grid, const GridPoint& point) {
  FormationParams f;
  f.d_l = point.d_l;
  f.channels = point.channels;
  f.drop_first_trials = grid.drop_first_trials;
  return f;
}

}  // namespace attn
