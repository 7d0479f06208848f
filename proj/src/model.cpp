#include "attn/model.hpp"

#include <cmath>

#include "attn/text.hpp"

namespace attn {

std::string model_kind(const ModelConfig& config) {
  if (std::holds_alternative<RfConfig>(config)) return "rf";
  if (std::holds_alternative<SvmConfig>(config)) return "svm";
  return std::get<MlpConfig>(config).arch == MlpArch::Dnn6 ? "dnn6" : "dnn4";
}

ModelConfig default_model_config(std::string_view kind) {
  kind = trim(kind);
  if (kind == "rf") return RfConfig{};
  if (kind == "svm") return SvmConfig{};
  if (kind == "dnn4") return MlpConfig::dnn4();
  if (kind == "dnn6") return MlpConfig::dnn6();
  throw ParseError("unknown model '" + std::string(kind) + "' (expected rf, svm, dnn4 or dnn6)");
}

std::uint64_t model_seed(const ModelConfig& config) {
  return std::visit([](const auto& c) { return c.seed; }, config);
}

void set_model_seed(ModelConfig& config, std::uint64_t seed) {
  std::visit([seed](auto& c) { c.seed = seed; }, config);
}

std::vector<std::pair<std::string, std::string>> describe(const ModelConfig& config) {
  std::vector<std::pair<std::string, std::string>> out{{"model", model_kind(config)}};
  if (const auto* rf = std::get_if<RfConfig>(&config)) {
    out.emplace_back("rf.num_trees", std::to_string(rf->num_trees));
    out.emplace_back("rf.max_depth", std::to_string(rf->max_depth));
    out.emplace_back("rf.min_samples_leaf", std::to_string(rf->min_samples_leaf));
    out.emplace_back("rf.features_per_split", "sqrt");
    out.emplace_back("rf.bootstrap", rf->bootstrap ? "true" : "false");
  } else if (const auto* svm = std::get_if<SvmConfig>(&config)) {
    out.emplace_back("svm.kernel", "linear");
    out.emplace_back("svm.c", format_double(svm->c));
    out.emplace_back("svm.epochs", std::to_string(svm->epochs));
  } else {
    const auto& mlp = std::get<MlpConfig>(config);
    std::vector<std::string> hidden, dropout;
    for (int h : mlp.hidden) hidden.push_back(std::to_string(h));
    for (double p : mlp.dropout) dropout.push_back(format_double(p));
    out.emplace_back("mlp.hidden", join(hidden, ";"));
    out.emplace_back("mlp.dropout", join(dropout, ";"));
    out.emplace_back("mlp.learning_rate", format_double(mlp.learning_rate));
    out.emplace_back("mlp.batch_size", std::to_string(mlp.batch_size));
    out.emplace_back("mlp.epochs", std::to_string(mlp.epochs));
  }
  out.emplace_back("model_seed", std::to_string(model_seed(config)));
  return out;
}

TrainedModel train(const ModelConfig& config, const Matrix& x, std::span<const StateLabel> y) {
  if (x.rows != y.size()) throw ValidationError("row and label counts differ");
  if (x.rows == 0) throw ValidationError("empty training set");
  for (double v : x.values)
    if (!std::isfinite(v)) throw ValidationError("training features contain a non-finite value");
  TrainedModel model;
  for (auto l : y) model.classes_seen[code(l)] = true;
  int classes = 0;
  for (bool seen : model.classes_seen) classes += seen ? 1 : 0;
  if (classes < 2)
    throw ValidationError("single-class training set: at least two classes are required");
  model.config = config;
  model.num_features = x.cols;
  if (const auto* rf = std::get_if<RfConfig>(&config)) {
    model.body = train_forest(x, y, *rf);
  } else if (const auto* svm = std::get_if<SvmConfig>(&config)) {
    model.body = train_svm(x, y, *svm);
  } else {
    model.body = train_mlp(x, y, std::get<MlpConfig>(config));
  }
  return model;
}

TrainedModel train(const ModelConfig& config, const FeatureMatrix& train_rows) {
  return train(config, train_rows.rows, train_rows.labels);
}

std::vector<StateLabel> predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols != model.num_features)
    throw ValidationError("width mismatch: model trained on " + std::to_string(model.num_features) +
                          " features, input has " + std::to_string(x.cols));
  return std::visit([&](const auto& body) { return attn::predict(body, x); }, model.body);
}

std::vector<StateLabel> predict(const TrainedModel& model, const FeatureMatrix& rows) {
  return predict(model, rows.rows);
}

}  // namespace attn
