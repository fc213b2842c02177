#include "ampkin/config.h"

#include <cmath>
#include <initializer_list>

#include "ampkin/errors.h"

namespace ampkin {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> keys,
                ParseMode mode) {
  if (!j.is_object()) {
    throw ConfigurationError("config: \"" + std::string(section) + "\" must be an object");
  }
  if (mode != ParseMode::kStrict) {
    return;
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || item.key() == k;
    if (!known) {
      throw ConfigurationError("config: unknown key \"" + item.key() + "\" in " + std::string(section));
    }
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigurationError("config: \"" + std::string(key) + "\" has the wrong type");
  }
}

NoiseModel parse_noise_model(const std::string& s) {
  if (s == "fraction") return NoiseModel::kFraction;
  if (s == "magnitude") return NoiseModel::kMagnitude;
  throw ConfigurationError("config: noise_model must be \"fraction\" or \"magnitude\"");
}

KeypointNormalization parse_normalization(const std::string& s) {
  if (s == "bbox") return KeypointNormalization::kBbox;
  if (s == "image") return KeypointNormalization::kImage;
  if (s == "none") return KeypointNormalization::kNone;
  throw ConfigurationError("config: kp2d_normalization must be bbox, image or none");
}

Reduction parse_reduction(const std::string& s) {
  if (s == "sum") return Reduction::kSum;
  if (s == "mean") return Reduction::kMean;
  throw ConfigurationError("config: reduction must be \"sum\" or \"mean\"");
}

std::string_view name_of(NoiseModel m) { return m == NoiseModel::kFraction ? "fraction" : "magnitude"; }
std::string_view name_of(Reduction r) { return r == Reduction::kSum ? "sum" : "mean"; }
std::string_view name_of(KeypointNormalization n) {
  switch (n) {
    case KeypointNormalization::kBbox: return "bbox";
    case KeypointNormalization::kImage: return "image";
    case KeypointNormalization::kNone: return "none";
  }
  return "bbox";
}

void require(bool ok, const char* message) {
  if (!ok) throw ConfigurationError(std::string("config: ") + message);
}

bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

TokenizerConfig TokenizerConfig::full_scale() {
  TokenizerConfig c;
  c.codebook_size = 2048;
  c.code_dim = 256;
  c.tokens = 320;
  return c;
}

void Config::validate() const {
  require(template_spec.path.has_value() || template_spec.toy_vertices >= kNumJoints,
          "template.toy.vertices must be >= 24");
  try {
    loss_weights.validate();
  } catch (const InvalidInputError&) {
    throw ConfigurationError("config: loss_weights must be finite and non-negative");
  }
  require(tokenizer.codebook_size >= 1 && tokenizer.code_dim >= 1 && tokenizer.tokens >= 1,
          "tokenizer sizes must be positive");
  require(tokenizer.ema_decay >= 0.0 && tokenizer.ema_decay < 1.0, "tokenizer.ema_decay must be in [0, 1)");
  require(non_negative(tokenizer.reset_threshold), "tokenizer.reset_threshold must be >= 0");
  require(non_negative(tokenizer.loss.mix) && non_negative(tokenizer.loss.codebook) &&
              non_negative(tokenizer.loss.commitment),
          "tokenizer loss weights must be finite and non-negative");
  require(synth.image.width >= 1 && synth.image.height >= 1, "synth image size must be positive");
  require(std::isfinite(synth.heatmap_sigma) && synth.heatmap_sigma > 0.0, "synth.heatmap_sigma must be > 0");
  require(synth.noise_ratio >= 0.0 && synth.noise_ratio <= 1.0, "synth.noise_ratio must be in [0, 1]");
  require(!synth.noise_sigma_px || non_negative(*synth.noise_sigma_px), "synth.noise_sigma_px must be >= 0");
}

Config config_from_json(const json& j, ParseMode mode) {
  Config c;
  check_keys(j, "config", {"seed", "template", "loss_weights", "tokenizer", "metrics", "synth"}, mode);
  read(j, "seed", c.seed);

  if (const auto it = j.find("template"); it != j.end()) {
    check_keys(*it, "template", {"path", "toy"}, mode);
    if (const auto p = it->find("path"); p != it->end()) {
      if (!p->is_string()) throw ConfigurationError("config: template.path must be a string");
      c.template_spec.path = p->get<std::string>();
    }
    if (const auto toy = it->find("toy"); toy != it->end()) {
      check_keys(*toy, "template.toy", {"vertices", "seed"}, mode);
      read(*toy, "vertices", c.template_spec.toy_vertices);
      read(*toy, "seed", c.template_spec.toy_seed);
    }
  }
  if (const auto it = j.find("loss_weights"); it != j.end()) {
    check_keys(*it, "loss_weights", {"theta", "beta", "kp2d", "kp3d", "cls"}, mode);
    read(*it, "theta", c.loss_weights.theta);
    read(*it, "beta", c.loss_weights.beta);
    read(*it, "kp2d", c.loss_weights.kp2d);
    read(*it, "kp3d", c.loss_weights.kp3d);
    read(*it, "cls", c.loss_weights.cls);
  }
  if (const auto it = j.find("tokenizer"); it != j.end()) {
    check_keys(*it, "tokenizer",
               {"codebook_size", "code_dim", "tokens", "ema_decay", "reset_threshold", "reduction",
                "loss_weights"},
               mode);
    read(*it, "codebook_size", c.tokenizer.codebook_size);
    read(*it, "code_dim", c.tokenizer.code_dim);
    read(*it, "tokens", c.tokenizer.tokens);
    read(*it, "ema_decay", c.tokenizer.ema_decay);
    read(*it, "reset_threshold", c.tokenizer.reset_threshold);
    std::string reduction{name_of(c.tokenizer.loss.reduction)};
    read(*it, "reduction", reduction);
    c.tokenizer.loss.reduction = parse_reduction(reduction);
    if (const auto w = it->find("loss_weights"); w != it->end()) {
      check_keys(*w, "tokenizer.loss_weights", {"mix", "codebook", "commitment"}, mode);
      read(*w, "mix", c.tokenizer.loss.mix);
      read(*w, "codebook", c.tokenizer.loss.codebook);
      read(*w, "commitment", c.tokenizer.loss.commitment);
    }
  }
  if (const auto it = j.find("metrics"); it != j.end()) {
    check_keys(*it, "metrics", {"pa_scale", "include_amputated", "kp2d_normalization"}, mode);
    read(*it, "pa_scale", c.metrics.pa_scale);
    read(*it, "include_amputated", c.metrics.include_amputated);
    std::string norm{name_of(c.metrics.kp2d_normalization)};
    read(*it, "kp2d_normalization", norm);
    c.metrics.kp2d_normalization = parse_normalization(norm);
  }
  if (const auto it = j.find("synth"); it != j.end()) {
    check_keys(*it, "synth",
               {"image_width", "image_height", "heatmap_sigma", "noise_model", "noise_ratio",
                "noise_sigma_px"},
               mode);
    read(*it, "image_width", c.synth.image.width);
    read(*it, "image_height", c.synth.image.height);
    read(*it, "heatmap_sigma", c.synth.heatmap_sigma);
    std::string model{name_of(c.synth.noise_model)};
    read(*it, "noise_model", model);
    c.synth.noise_model = parse_noise_model(model);
    read(*it, "noise_ratio", c.synth.noise_ratio);
    if (const auto s = it->find("noise_sigma_px"); s != it->end() && !s->is_null()) {
      double v = 0.0;
      read(*it, "noise_sigma_px", v);
      c.synth.noise_sigma_px = v;
    }
  }
  c.validate();
  return c;
}

ojson to_json(const Config& c) {
  ojson j;
  j["seed"] = c.seed;
  if (c.template_spec.path) {
    j["template"] = {{"path", c.template_spec.path->string()}};
  } else {
    j["template"] = {{"toy", {{"vertices", c.template_spec.toy_vertices}, {"seed", c.template_spec.toy_seed}}}};
  }
  j["loss_weights"] = {{"theta", c.loss_weights.theta}, {"beta", c.loss_weights.beta},
                       {"kp2d", c.loss_weights.kp2d},   {"kp3d", c.loss_weights.kp3d},
                       {"cls", c.loss_weights.cls}};
  j["tokenizer"] = {{"codebook_size", c.tokenizer.codebook_size},
                    {"code_dim", c.tokenizer.code_dim},
                    {"tokens", c.tokenizer.tokens},
                    {"ema_decay", c.tokenizer.ema_decay},
                    {"reset_threshold", c.tokenizer.reset_threshold},
                    {"reduction", name_of(c.tokenizer.loss.reduction)},
                    {"loss_weights",
                     {{"mix", c.tokenizer.loss.mix},
                      {"codebook", c.tokenizer.loss.codebook},
                      {"commitment", c.tokenizer.loss.commitment}}}};
  j["metrics"] = {{"pa_scale", c.metrics.pa_scale},
                  {"include_amputated", c.metrics.include_amputated},
                  {"kp2d_normalization", name_of(c.metrics.kp2d_normalization)}};
  ojson synth = {{"image_width", c.synth.image.width},
                 {"image_height", c.synth.image.height},
                 {"heatmap_sigma", c.synth.heatmap_sigma},
                 {"noise_model", name_of(c.synth.noise_model)},
                 {"noise_ratio", c.synth.noise_ratio}};
  synth["noise_sigma_px"] = c.synth.noise_sigma_px ? ojson(*c.synth.noise_sigma_px) : ojson(nullptr);
  j["synth"] = std::move(synth);
  return j;
}

Config load_config(const std::filesystem::path& path, ParseMode mode) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed config JSON: " + std::string(e.what()), e.byte);
  }
  return config_from_json(j, mode);
}

BodyTemplate resolve_template(const TemplateSpec& spec) {
  if (spec.path) {
    return load_template(*spec.path);
  }
  return make_toy_template(spec.toy_vertices, spec.toy_seed);
}

}  // namespace ampkin
