#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "attn/features.hpp"
#include "attn/forest.hpp"
#include "attn/mlp.hpp"
#include "attn/svm.hpp"

namespace attn {

using ModelConfig = std::variant<RfConfig, SvmConfig, MlpConfig>;

/// "rf", "svm", "dnn4" or "dnn6".
std::string model_kind(const ModelConfig& config);
ModelConfig default_model_config(std::string_view kind);
std::uint64_t model_seed(const ModelConfig& config);
void set_model_seed(ModelConfig& config, std::uint64_t seed);
/// Flat key/value echo of every hyperparameter, used in reports and model files.
std::vector<std::pair<std::string, std::string>> describe(const ModelConfig& config);

struct TrainedModel {
  std::variant<Forest, LinearOvr, Mlp> body;
  ModelConfig config;
  std::size_t num_features = 0;
  std::array<bool, kNumStates> classes_seen{};
  std::optional<Scaler> scaler;  // standardization fitted with the model, if any
  std::vector<std::pair<std::string, std::string>> provenance;  // saved as meta.* lines
};

/// Rows must already be standardized. Throws on a single-class training set
/// or non-finite features.
TrainedModel train(const ModelConfig& config, const Matrix& x, std::span<const StateLabel> y);
TrainedModel train(const ModelConfig& config, const FeatureMatrix& train_rows);

std::vector<StateLabel> predict(const TrainedModel& model, const Matrix& x);
std::vector<StateLabel> predict(const TrainedModel& model, const FeatureMatrix& rows);

inline constexpr int kModelFormatVersion = 1;

/// Text container: magic line, format version, config echo, parameter payload
/// and a trailing FNV-1a checksum over everything before it.
void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace attn
