#include <fstream>
#include <map>
#include <sstream>

#include "attn/model.hpp"
#include "attn/text.hpp"

namespace attn {

namespace {

constexpr std::string_view kMagic = "ATTN-MODEL";

template <typename Range>
std::string join_doubles(const Range& values) {
  std::string s;
  bool first = true;
  for (double v : values) {
    if (!first) s += ',';
    s += format_double(v);
    first = false;
  }
  return s;
}

std::vector<double> parse_doubles(std::string_view line) {
  std::vector<double> out;
  if (trim(line).empty()) return out;
  for (auto f : split(line, ',')) out.push_back(parse_double(f));
  return out;
}

void write_payload(const Forest& forest, std::ostream& out) {
  out << "trees=" << forest.trees.size() << '\n';
  for (const auto& tree : forest.trees) {
    out << "tree=" << tree.nodes.size() << '\n';
    for (const auto& n : tree.nodes)
      out << n.feature << ',' << format_double(n.threshold) << ',' << n.left << ',' << n.right << ',' << n.label << '\n';
  }
}

void write_payload(const LinearOvr& svm, std::ostream& out) {
  out << "weights=" << svm.weights.rows << ',' << svm.weights.cols << '\n';
  for (std::size_t r = 0; r < svm.weights.rows; ++r) out << join_doubles(svm.weights.row(r)) << '\n';
}

void write_payload(const Mlp& mlp, std::ostream& out) {
  out << "layers=" << mlp.layers.size() << '\n';
  for (const auto& l : mlp.layers) {
    out << "layer=" << l.weights.rows() << ',' << l.weights.cols() << ',' << format_double(l.dropout_after) << '\n';
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(l.weights.cols()));
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = l.weights(r, c);
      out << join_doubles(row) << '\n';
    }
    std::vector<double> bias(l.bias.data(), l.bias.data() + l.bias.size());
    out << join_doubles(bias) << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : rest_(text) {}

  std::string_view next() {
    if (rest_.empty()) throw ParseError("unexpected end of model file", line_);
    const auto nl = rest_.find('\n');
    const auto line = rest_.substr(0, nl);
    rest_ = nl == std::string_view::npos ? std::string_view{} : rest_.substr(nl + 1);
    ++line_;
    return line;
  }

  std::string_view value(std::string_view key) {
    const auto line = next();
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != '=')
      throw ParseError("expected '" + std::string(key) + "='", line_);
    return line.substr(key.size() + 1);
  }

  bool done() const { return trim(rest_).empty(); }
  std::size_t line() const { return line_; }

 private:
  std::string_view rest_;
  std::size_t line_ = 0;
};

std::size_t to_size(std::string_view s) { return static_cast<std::size_t>(parse_uint(s)); }

Forest read_forest(LineReader& in, std::size_t num_features) {
  Forest f;
  f.num_features = num_features;
  const auto n_trees = to_size(in.value("trees"));
  f.trees.resize(n_trees);
  for (auto& tree : f.trees) {
    const auto n_nodes = to_size(in.value("tree"));
    tree.nodes.resize(n_nodes);
    for (auto& node : tree.nodes) {
      const auto fields = split(in.next(), ',');
      if (fields.size() != 5) throw ParseError("malformed tree node", in.line());
      node.feature = static_cast<int>(parse_int(fields[0]));
      node.threshold = parse_double(fields[1]);
      node.left = static_cast<int>(parse_int(fields[2]));
      node.right = static_cast<int>(parse_int(fields[3]));
      node.label = static_cast<int>(parse_int(fields[4]));
      const auto limit = static_cast<int>(n_nodes);
      if (node.feature >= static_cast<int>(num_features) || node.label < 0 || node.label >= kNumStates ||
          (node.feature >= 0 && (node.left <= 0 || node.left >= limit || node.right <= 0 || node.right >= limit)))
        throw ParseError("tree node out of range", in.line());
    }
  }
  return f;
}

LinearOvr read_svm(LineReader& in, std::size_t num_features) {
  const auto dims = split(in.value("weights"), ',');
  if (dims.size() != 2) throw ParseError("malformed weights header", in.line());
  LinearOvr m;
  m.weights = Matrix(to_size(dims[0]), to_size(dims[1]));
  if (m.weights.rows != kNumStates || m.weights.cols != num_features + 1)
    throw ParseError("weight matrix shape does not match the model", in.line());
  for (std::size_t r = 0; r < m.weights.rows; ++r) {
    const auto row = parse_doubles(in.next());
    if (row.size() != m.weights.cols) throw ParseError("weight row has the wrong length", in.line());
    std::copy(row.begin(), row.end(), m.weights.row(r).begin());
  }
  return m;
}

Mlp read_mlp(LineReader& in, std::size_t num_features) {
  Mlp net;
  net.num_inputs = num_features;
  const auto n_layers = to_size(in.value("layers"));
  std::size_t expected_in = num_features;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto dims = split(in.value("layer"), ',');
    if (dims.size() != 3) throw ParseError("malformed layer header", in.line());
    const auto rows = static_cast<Eigen::Index>(to_size(dims[0]));
    const auto cols = static_cast<Eigen::Index>(to_size(dims[1]));
    if (static_cast<std::size_t>(cols) != expected_in) throw ParseError("layer input width mismatch", in.line());
    DenseLayer layer;
    layer.dropout_after = parse_double(dims[2]);
    layer.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto row = parse_doubles(in.next());
      if (row.size() != static_cast<std::size_t>(cols)) throw ParseError("weight row has the wrong length", in.line());
      for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = row[static_cast<std::size_t>(c)];
    }
    const auto bias = parse_doubles(in.next());
    if (bias.size() != static_cast<std::size_t>(rows)) throw ParseError("bias has the wrong length", in.line());
    layer.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), rows);
    net.layers.push_back(std::move(layer));
    expected_in = static_cast<std::size_t>(rows);
  }
  if (expected_in != kNumStates) throw ParseError("network output width must be 3", in.line());
  return net;
}

ModelConfig config_from(const std::map<std::string, std::string>& kv) {
  const auto get = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("model file lacks config key '" + key + "'");
    return it->second;
  };
  auto config = default_model_config(get("model"));
  if (auto* rf = std::get_if<RfConfig>(&config)) {
    rf->num_trees = static_cast<int>(parse_int(get("rf.num_trees")));
    rf->max_depth = static_cast<int>(parse_int(get("rf.max_depth")));
    rf->min_samples_leaf = static_cast<int>(parse_int(get("rf.min_samples_leaf")));
    rf->bootstrap = get("rf.bootstrap") == "true";
  } else if (auto* svm = std::get_if<SvmConfig>(&config)) {
    svm->c = parse_double(get("svm.c"));
    svm->epochs = static_cast<int>(parse_int(get("svm.epochs")));
  } else {
    auto& mlp = std::get<MlpConfig>(config);
    mlp.hidden.clear();
    mlp.dropout.clear();
    for (const auto& h : split_trimmed(get("mlp.hidden"), ';')) mlp.hidden.push_back(static_cast<int>(parse_int(h)));
    for (const auto& p : split_trimmed(get("mlp.dropout"), ';')) mlp.dropout.push_back(parse_double(p));
    mlp.learning_rate = parse_double(get("mlp.learning_rate"));
    mlp.batch_size = static_cast<int>(parse_int(get("mlp.batch_size")));
    mlp.epochs = static_cast<int>(parse_int(get("mlp.epochs")));
  }
  set_model_seed(config, parse_uint(get("model_seed")));
  return config;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  std::ostringstream body;
  body << kMagic << '\n' << "version=" << kModelFormatVersion << '\n';
  for (const auto& [k, v] : model.provenance) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos || v.find('\n') != std::string::npos)
      throw ValidationError("provenance entry '" + k + "' cannot be stored");
    body << "meta." << k << '=' << v << '\n';
  }
  for (const auto& [k, v] : describe(model.config)) body << "config." << k << '=' << v << '\n';
  body << "num_features=" << model.num_features << '\n';
  body << "classes_seen=" << model.classes_seen[0] << ',' << model.classes_seen[1] << ',' << model.classes_seen[2] << '\n';
  body << "scaler=" << (model.scaler ? 1 : 0) << '\n';
  if (model.scaler) {
    const auto& s = *model.scaler;
    body << "scaler.mean=" << join_doubles(s.mean) << '\n';
    body << "scaler.std=" << join_doubles(s.stddev) << '\n';
    std::string flags;
    for (std::size_t i = 0; i < s.degenerate.size(); ++i) {
      if (i) flags += ',';
      flags += s.degenerate[i] ? '1' : '0';
    }
    body << "scaler.degenerate=" << flags << '\n';
    body << "scaler.fitted_on=" << s.fitted_on << '\n';
  }
  body << "payload=" << model_kind(model.config) << '\n';
  std::visit([&](const auto& b) { write_payload(b, body); }, model.body);
  const auto text = body.str();
  out << text << "checksum=" << Fnv1a().update(text).hex() << '\n';
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  save_model(model, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

TrainedModel load_model(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!std::string_view(text).starts_with(kMagic)) throw Error("not a model file (bad magic)");
  const auto pos = text.rfind("checksum=");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw ChecksumError("model file has no checksum (truncated?)");
  const std::string_view payload(text.data(), pos);
  std::uint64_t stored = 0;
  try {
    stored = from_hex(trim(std::string_view(text).substr(pos + 9)));
  } catch (const ParseError&) {
    throw ChecksumError("model file checksum is unreadable");
  }
  if (Fnv1a().update(payload).digest() != stored) throw ChecksumError("model file checksum mismatch (corrupt or truncated)");

  LineReader reader(payload);
  reader.next();
  const auto version = parse_int(reader.value("version"));
  if (version != kModelFormatVersion)
    throw Error("unsupported model format version " + std::to_string(version) + " (expected " +
                std::to_string(kModelFormatVersion) + ")");
  std::map<std::string, std::string> config_kv;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::string_view line;
  while ((line = reader.next()).starts_with("meta.")) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("malformed meta line", reader.line());
    provenance.emplace_back(std::string(line.substr(5, eq - 5)), std::string(line.substr(eq + 1)));
  }
  for (; line.starts_with("config."); line = reader.next()) {
    const auto eq = line.find('=');
    config_kv.emplace(std::string(line.substr(7, eq - 7)), std::string(line.substr(eq + 1)));
  }
  TrainedModel model;
  model.config = config_from(config_kv);
  model.provenance = std::move(provenance);
  if (!line.starts_with("num_features=")) throw ParseError("expected num_features", reader.line());
  model.num_features = to_size(line.substr(13));
  const auto seen = split(reader.value("classes_seen"), ',');
  if (seen.size() != kNumStates) throw ParseError("malformed classes_seen", reader.line());
  for (int i = 0; i < kNumStates; ++i) model.classes_seen[i] = parse_int(seen[i]) != 0;
  if (parse_int(reader.value("scaler")) == 1) {
    Scaler s;
    s.mean = parse_doubles(reader.value("scaler.mean"));
    s.stddev = parse_doubles(reader.value("scaler.std"));
    for (auto f : split(reader.value("scaler.degenerate"), ',')) s.degenerate.push_back(trim(f) == "1");
    s.fitted_on = std::string(reader.value("scaler.fitted_on"));
    if (s.mean.size() != model.num_features || s.stddev.size() != model.num_features ||
        s.degenerate.size() != model.num_features)
      throw ParseError("scaler width does not match the model", reader.line());
    model.scaler = std::move(s);
  }
  const auto kind = reader.value("payload");
  if (kind != model_kind(model.config)) throw ParseError("payload kind does not match config", reader.line());
  if (kind == "rf") {
    model.body = read_forest(reader, model.num_features);
  } else if (kind == "svm") {
    model.body = read_svm(reader, model.num_features);
  } else {
    model.body = read_mlp(reader, model.num_features);
  }
  if (!reader.done()) throw ParseError("trailing data after model payload", reader.line());
  return model;
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

}  // namespace attn
