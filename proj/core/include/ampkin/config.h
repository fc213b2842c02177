#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ampkin/annotations.h"
#include "ampkin/body_model.h"
#include "ampkin/metrics.h"
#include "ampkin/synth.h"
#include "ampkin/tokenizer.h"

namespace ampkin {

/// Either a template file or the procedural toy template.
struct TemplateSpec {
  std::optional<std::filesystem::path> path;
  int toy_vertices = 512;
  std::uint64_t toy_seed = 0;
};

struct TokenizerConfig {
  int codebook_size = 256;
  int code_dim = 64;
  int tokens = 16;
  double ema_decay = 0.99;
  double reset_threshold = 1e-3;
  TokenizerLossWeights loss;

  /// Codebook 2048 x 256 with 320 tokens.
  static TokenizerConfig full_scale();
};

struct MetricConfig {
  /// Similarity (true) or rigid (false) Procrustes alignment.
  bool pa_scale = true;
  /// Keep ground-truth amputated joints/vertices in the metrics.
  bool include_amputated = false;
  KeypointNormalization kp2d_normalization = KeypointNormalization::kBbox;
};

struct SynthConfig {
  ImageSize image;
  double heatmap_sigma = kDefaultHeatmapSigma;
  NoiseModel noise_model = NoiseModel::kFraction;
  double noise_ratio = 0.0;
  /// Unset means 0.05 * bbox diagonal.
  std::optional<double> noise_sigma_px;
};

struct Config {
  std::uint64_t seed = 0;
  TemplateSpec template_spec;
  LossWeights loss_weights;
  TokenizerConfig tokenizer;
  MetricConfig metrics;
  SynthConfig synth;

  /// Throws ConfigurationError on any out-of-range value.
  void validate() const;
};

/// Missing keys keep their defaults. In strict mode unknown keys are
/// rejected. Throws ConfigurationError.
[[nodiscard]] Config config_from_json(const nlohmann::json& j, ParseMode mode = ParseMode::kStrict);
[[nodiscard]] nlohmann::ordered_json to_json(const Config& c);
[[nodiscard]] Config load_config(const std::filesystem::path& path,
                                 ParseMode mode = ParseMode::kStrict);

[[nodiscard]] BodyTemplate resolve_template(const TemplateSpec& spec);

}  // namespace ampkin
