#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsearch/denoiser.hpp"
#include "dsearch/gmm_model.hpp"
#include "dsearch/noise_schedule.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/search.hpp"

namespace dsearch {

inline constexpr int kConfigSchemaVersion = 1;

enum class ModelKind { kGaussianMixture, kMaskedSequence };
enum class SequencePriorKind { kUniform, kRandom, kTable };

struct SequencePriorSpec {
  SequencePriorKind kind = SequencePriorKind::kUniform;
  double concentration = 1.0;  // random
  std::uint64_t seed = 0;      // random
  std::vector<std::vector<double>> probs;  // table
};

struct ModelSpec {
  ModelKind kind = ModelKind::kMaskedSequence;
  int steps = 12;
  // gaussian-mixture
  NoiseScheduleKind noise_schedule = NoiseScheduleKind::kLinearBeta;
  GaussianReverseKernel kernel = GaussianReverseKernel::kPosteriorMeanPlugIn;
  std::vector<GmmComponent> components;
  // masked-sequence
  int length = 6;
  int vocab = 4;
  std::uint64_t mask_order_seed = 0;
  SequencePriorSpec prior;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "run";
  ModelSpec model;
  std::string reward;
  SearchPlan plan;
  // Per-output denoiser budget used by compare and by C_bar sweeps.
  std::optional<double> c_bar;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";
  bool trace = false;
  // diagnose
  std::vector<int> checkpoints;
  int trajectories = 500;
};

// Strict: unknown keys and unresolvable names are kInvalidConfiguration
// errors whose field() is the dotted key path.
RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

std::unique_ptr<DenoiserModel> build_model(const ModelSpec& spec);
std::unique_ptr<RewardOracle> build_reward(const RunConfig& config);

std::string_view to_string(GaussianReverseKernel kernel);
GaussianReverseKernel parse_reverse_kernel(std::string_view name);

}  // namespace dsearch
