#include "commands.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ampkin/amputation.h"
#include "ampkin/annotations.h"
#include "ampkin/body_model.h"
#include "ampkin/config.h"
#include "ampkin/errors.h"
#include "ampkin/metrics.h"
#include "ampkin/pipeline.h"
#include "ampkin/synth.h"
#include "ampkin/tokenizer.h"
#include "parallel.h"

namespace ampkin::cli {

using ojson = nlohmann::ordered_json;

int thread_count() {
  if (const char* env = std::getenv("AMPKIN_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigurationError("AMPKIN_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(v, 1024));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct Context {
  Config config;
  ParseMode mode = ParseMode::kLenient;
  std::ostream& out;
  std::ostream& err;
  std::optional<BodyTemplate> tmpl;

  const BodyTemplate& body() {
    if (!tmpl) {
      tmpl = resolve_template(config.template_spec);
    }
    return *tmpl;
  }
};

bool is_stdout(const std::string& path) { return path.empty() || path == "-"; }

void emit_text(Context& ctx, const std::string& path, const std::string& text) {
  if (is_stdout(path)) {
    ctx.out << text;
  } else {
    write_text_file(path, text);
  }
}

void emit_json(Context& ctx, const std::string& path, const ojson& j) {
  emit_text(ctx, path, j.dump(2) + "\n");
}

ojson rows_json(const RowMajorX3& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  }
  return rows;
}

ojson matrix_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(what + ": expected a non-empty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) {
    throw SchemaError(what + ": rows must be non-empty arrays");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw SchemaError(what + ": row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw SchemaError(what + ": non-numeric entry at row " + std::to_string(r));
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Eigen::MatrixXd load_matrix(const std::string& path, const std::string& what) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what(), e.byte);
  }
  return matrix_from_json(j, what);
}

std::array<int, kNumLimbs> parse_binary_vector(const std::string& text) {
  std::array<int, kNumLimbs> y{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= y.size() || (item != "0" && item != "1")) {
      throw InvalidInputError("--yhat expects four comma-separated 0/1 values");
    }
    y[k++] = item == "1" ? 1 : 0;
  }
  if (k != y.size()) {
    throw InvalidInputError("--yhat expects four comma-separated 0/1 values");
  }
  return y;
}

CodebookKind parse_kind(const std::string& s) {
  if (s == "amp") {
    return CodebookKind::kAmp;
  }
  if (s == "non_amp") {
    return CodebookKind::kNonAmp;
  }
  throw InvalidInputError("unknown codebook kind '" + s + "' (expected amp or non_amp)");
}

std::vector<AnnotationRecord> input_records(Context& ctx, const std::string& path) {
  if (path.empty()) {
    return {};
  }
  return load_records(path, ctx.mode);
}

const AnnotationRecord& pick(const std::vector<AnnotationRecord>& records, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= records.size()) {
    throw InvalidInputError("--index " + std::to_string(index) + " out of range for " +
                            std::to_string(records.size()) + " record(s)");
  }
  return records[static_cast<std::size_t>(index)];
}

// forward ----------------------------------------------------------------

struct ForwardArgs {
  std::string input;
  std::string output;
  std::string label;
  std::string save_template;
};

int cmd_forward(Context& ctx, const ForwardArgs& a) {
  const BodyTemplate& tmpl = ctx.body();
  if (!a.save_template.empty()) {
    save_template(tmpl, a.save_template);
  }
  std::vector<AnnotationRecord> records = input_records(ctx, a.input);
  const bool from_input = !a.input.empty();
  if (!from_input) {
    records.emplace_back();
  }
  const std::optional<AmputationLabel> extra =
      a.label.empty() ? std::nullopt : std::optional<AmputationLabel>(parse_label(a.label));

  const auto meshes = parallel_map(records.size(), thread_count(), [&](std::size_t i) {
    const AnnotationRecord& rec = records[i];
    PoseParams pose = from_input ? rec.pose() : PoseParams::identity();
    if (extra) {
      pose = apply_mask(pose, *extra);
    }
    return forward(tmpl, pose, rec.betas);
  });

  ojson result = ojson::array();
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    ojson m;
    m["image"] = records[i].image;
    m["vertices"] = rows_json(meshes[i].vertices);
    m["joints"] = rows_json(meshes[i].joints_posed);
    result.push_back(std::move(m));
  }
  emit_json(ctx, a.output, result);
  return kExitOk;
}

// amputate ---------------------------------------------------------------

struct AmputateArgs {
  std::string input;
  std::string output;
  std::string label;
};

int cmd_amputate(Context& ctx, const AmputateArgs& a) {
  const BodyTemplate& tmpl = ctx.body();
  const AmputationLabel label = parse_label(a.label);
  std::vector<AnnotationRecord> records = input_records(ctx, a.input);
  if (a.input.empty()) {
    records.emplace_back();
  }
  const auto out = parallel_map(records.size(), thread_count(), [&](std::size_t i) {
    const AnnotationRecord& rec = records[i];
    const std::set<int> previously_masked = amputated_joints(rec.label);
    EmitOptions options;
    options.image = rec.image;
    options.bbox = rec.bbox;
    for (int j = 0; j < kNumJoints; ++j) {
      if (rec.kp2d(j, 2) == 0.0 && !previously_masked.contains(j) && !a.input.empty()) {
        options.occluded.insert(j);
      }
    }
    AnnotationRecord next = emit_record(tmpl, rec.unmasked_pose(), rec.betas, label, rec.camera, options);
    // relabelling never changes a rotation; skip the matrix round trip
    next.pose_aa = rec.pose_aa;
    return next;
  });
  emit_text(ctx, a.output, write_records(out) + "\n");
  return kExitOk;
}

// quantize ---------------------------------------------------------------

struct QuantizeArgs {
  std::string init;
  std::string kind = "non_amp";
  std::string codebook;
  std::string amp;
  std::string non_amp;
  std::string yhat;
  std::string latents;
  std::string logits;
  bool soft = false;
  std::string update;
  std::string output;
};

ojson quantize_json(CodebookKind kind, const QuantizeResult& q) {
  ojson j;
  j["codebook"] = std::string(to_string(kind));
  j["mode"] = "hard";
  j["indices"] = q.indices;
  j["latents"] = matrix_json(q.quantized);
  return j;
}

int cmd_quantize(Context& ctx, const QuantizeArgs& a) {
  const TokenizerConfig& tc = ctx.config.tokenizer;
  if (!a.init.empty()) {
    const Codebook cb = Codebook::random(tc.codebook_size, tc.code_dim, parse_kind(a.kind), ctx.config.seed);
    save_codebook(cb, a.init);
    ojson j;
    j["codebook"] = a.init;
    j["kind"] = std::string(to_string(cb.kind()));
    j["size"] = cb.size();
    j["dim"] = cb.dim();
    emit_json(ctx, a.output, j);
    return kExitOk;
  }

  const bool switched = !a.amp.empty() || !a.non_amp.empty();
  if (switched == !a.codebook.empty()) {
    throw InvalidInputError("give either --codebook or both --amp and --non-amp");
  }
  if (switched && (a.amp.empty() || a.non_amp.empty() || a.yhat.empty())) {
    throw InvalidInputError("switching needs --amp, --non-amp and --yhat");
  }
  if (a.soft == a.logits.empty() || a.soft == !a.latents.empty()) {
    throw InvalidInputError("hard mode needs --latents; --soft needs --logits");
  }
  if (!a.update.empty() && (a.soft || switched)) {
    throw InvalidInputError("--update applies to hard quantization with a single --codebook");
  }

  if (a.soft) {
    const Eigen::MatrixXd logits = load_matrix(a.logits, "logits");
    ojson j;
    if (switched) {
      const SwitchedDecode d = switch_and_decode(logits, parse_binary_vector(a.yhat),
                                                 load_codebook(a.amp), load_codebook(a.non_amp));
      j["codebook"] = std::string(to_string(d.used));
      j["mode"] = "soft";
      j["latents"] = matrix_json(d.latents);
    } else {
      const Codebook cb = load_codebook(a.codebook);
      j["codebook"] = std::string(to_string(cb.kind()));
      j["mode"] = "soft";
      j["latents"] = matrix_json(soft_decode(logits, cb));
    }
    emit_json(ctx, a.output, j);
    return kExitOk;
  }

  const Eigen::MatrixXd z = load_matrix(a.latents, "latents");
  if (switched) {
    const auto [q, used] = switch_and_quantize(z, parse_binary_vector(a.yhat), load_codebook(a.amp),
                                               load_codebook(a.non_amp));
    emit_json(ctx, a.output, quantize_json(used, q));
    return kExitOk;
  }
  const Codebook cb = load_codebook(a.codebook);
  const QuantizeResult q = quantize(z, cb);
  if (!a.update.empty()) {
    Codebook updated = ema_update(cb, z, q.indices, tc.ema_decay);
    updated = reset_dead_codes(std::move(updated), z, tc.reset_threshold, ctx.config.seed);
    save_codebook(updated, a.update);
  }
  emit_json(ctx, a.output, quantize_json(cb.kind(), q));
  return kExitOk;
}

// eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string output;
};

struct SampleMetrics {
  double mve = 0.0;
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
};

constexpr double kMillimetres = 1000.0;

ojson stats_json(const ConfusionMatrix& cm) {
  ojson j;
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < cm.counts().rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < cm.counts().cols(); ++c) {
      row.push_back(cm.counts()(r, c));
    }
    rows.push_back(std::move(row));
  }
  j["counts"] = std::move(rows);
  if (cm.total() == 0) {
    return j;
  }
  const ConfusionStats s = confusion_stats(cm);
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["accuracy"] = s.accuracy;
  j["precision"] = vec(s.precision);
  j["recall"] = vec(s.recall);
  j["f1"] = vec(s.f1);
  j["macro_f1"] = s.macro_f1;
  j["column_percent"] = matrix_json(s.column_percent);
  return j;
}

int cmd_eval(Context& ctx, const EvalArgs& a) {
  const BodyTemplate& tmpl = ctx.body();
  const std::vector<AnnotationRecord> pred = load_records(a.pred, ctx.mode);
  const std::vector<AnnotationRecord> gt = load_records(a.gt, ctx.mode);
  if (pred.size() != gt.size()) {
    throw DimensionMismatchError("prediction and ground-truth sets differ in size (" +
                                 std::to_string(pred.size()) + " vs " + std::to_string(gt.size()) + ")");
  }
  if (gt.empty()) {
    throw InvalidInputError("no records to evaluate");
  }
  const MetricConfig& mc = ctx.config.metrics;

  const auto per_sample = parallel_map(gt.size(), thread_count(), [&](std::size_t i) {
    const AnnotationRecord& p = pred[i];
    const AnnotationRecord& g = gt[i];
    const std::set<int> excluded = mc.include_amputated ? std::set<int>{} : amputated_joints(g.label);

    JointSet pj{p.joints3d, std::vector<bool>(kNumJoints, true)};
    JointSet gj{g.joints3d, std::vector<bool>(kNumJoints, true)};
    for (int j : excluded) {
      pj.valid[static_cast<std::size_t>(j)] = false;
      gj.valid[static_cast<std::size_t>(j)] = false;
    }
    const MeshResult pm = forward(tmpl, p.pose(), p.betas);
    const MeshResult gm = forward(tmpl, g.pose(), g.betas);
    std::vector<bool> include = mc.include_amputated ? std::vector<bool>(static_cast<std::size_t>(tmpl.num_vertices()), true)
                                                     : surviving_vertices(tmpl, g.label);
    const std::unique_ptr<bool[]> flags(new bool[include.size()]);
    std::copy(include.begin(), include.end(), flags.get());

    SampleMetrics m;
    m.mve = kMillimetres * mve(pm.vertices, gm.vertices, tmpl, std::span<const bool>(flags.get(), include.size()));
    m.mpjpe = kMillimetres * mpjpe(pj, gj);
    m.pa_mpjpe = kMillimetres * pa_mpjpe(pj, gj, mc.pa_scale);
    return m;
  });

  SampleMetrics mean;
  ojson samples = ojson::array();
  for (std::size_t i = 0; i < per_sample.size(); ++i) {
    const SampleMetrics& m = per_sample[i];
    mean.mve += m.mve;
    mean.mpjpe += m.mpjpe;
    mean.pa_mpjpe += m.pa_mpjpe;
    ojson s;
    s["index"] = i;
    s["image"] = gt[i].image;
    s["mve_mm"] = m.mve;
    s["mpjpe_mm"] = m.mpjpe;
    s["pa_mpjpe_mm"] = m.pa_mpjpe;
    samples.push_back(std::move(s));
  }
  const double n = static_cast<double>(per_sample.size());

  std::array<ConfusionMatrix, kNumLimbs> per_limb = {ConfusionMatrix(kNumLevels), ConfusionMatrix(kNumLevels),
                                                     ConfusionMatrix(kNumLevels), ConfusionMatrix(kNumLevels)};
  ConfusionMatrix binary(2);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t l = 0; l < kNumLimbs; ++l) {
      const int t = gt[i].label.levels()[l];
      const int p = pred[i].label.levels()[l];
      per_limb[l].add(t, p);
      binary.add(t > 0 ? 1 : 0, p > 0 ? 1 : 0);
    }
  }

  ojson report;
  report["count"] = per_sample.size();
  report["metrics"] = {{"mve_mm", mean.mve / n}, {"mpjpe_mm", mean.mpjpe / n}, {"pa_mpjpe_mm", mean.pa_mpjpe / n}};
  ojson cls;
  for (std::size_t l = 0; l < kNumLimbs; ++l) {
    cls[std::string(limb_token(kAllLimbs[l]))] = stats_json(per_limb[l]);
  }
  cls["binary"] = stats_json(binary);
  report["classification"] = std::move(cls);
  report["samples"] = std::move(samples);
  emit_json(ctx, a.output, report);
  return kExitOk;
}

// synth ------------------------------------------------------------------

struct SynthArgs {
  int count = 1;
  std::string output;
  std::string images_dir;
  std::string heatmaps_dir;
  std::string background;
};

std::string sample_name(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 6) {
    digits.insert(0, 6 - digits.size(), '0');
  }
  return "synth_" + digits;
}

int cmd_synth(Context& ctx, const SynthArgs& a) {
  if (a.count < 0) {
    throw InvalidInputError("--count must be non-negative");
  }
  const BodyTemplate& tmpl = ctx.body();
  const SynthConfig& sc = ctx.config.synth;
  const bool render = !a.images_dir.empty();
  RgbImage background;
  if (render) {
    background = a.background.empty()
                     ? gradient_background(sc.image.width, sc.image.height, {90, 110, 140}, {30, 35, 45})
                     : read_png(a.background);
    if (background.width() != sc.image.width || background.height() != sc.image.height) {
      throw DimensionMismatchError("background size does not match the configured image size");
    }
    std::filesystem::create_directories(a.images_dir);
  }
  if (!a.heatmaps_dir.empty()) {
    std::filesystem::create_directories(a.heatmaps_dir);
  }

  const int threads = thread_count();
  const auto total = static_cast<std::size_t>(a.count);
  const std::size_t batch = std::max<std::size_t>(1, static_cast<std::size_t>(threads) * 4);
  std::vector<AnnotationRecord> records;
  records.reserve(total);
  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t n = std::min(batch, total - start);
    auto samples = parallel_map(n, threads, [&](std::size_t k) {
      const std::size_t i = start + k;
      return synthesize_sample(tmpl, sc, sample_seed(ctx.config.seed, i), sample_name(i) + ".png",
                               render ? &background : nullptr);
    });
    for (std::size_t k = 0; k < n; ++k) {
      const std::string name = sample_name(start + k);
      if (render) {
        write_png(samples[k].image, std::filesystem::path(a.images_dir) / (name + ".png"));
      }
      if (!a.heatmaps_dir.empty()) {
        const auto path = std::filesystem::path(a.heatmaps_dir) / (name + ".hm");
        std::ofstream f(path, std::ios::binary);
        if (!f) {
          throw IoError("cannot open " + path.string() + " for writing");
        }
        write_heatmaps(samples[k].heatmaps, f);
        if (!f.flush()) {
          throw IoError("failed writing " + path.string());
        }
      }
      records.push_back(std::move(samples[k].record));
    }
  }
  emit_text(ctx, a.output, write_records(records) + "\n");
  return kExitOk;
}

// export-obj -------------------------------------------------------------

struct ExportArgs {
  std::string input;
  int index = 0;
  std::string output;
};

int cmd_export_obj(Context& ctx, const ExportArgs& a) {
  const BodyTemplate& tmpl = ctx.body();
  AnnotationRecord rec;
  PoseParams pose = PoseParams::identity();
  if (!a.input.empty()) {
    const std::vector<AnnotationRecord> records = load_records(a.input, ctx.mode);
    rec = pick(records, a.index);
    pose = rec.pose();
  }
  const MeshResult mesh = forward(tmpl, pose, rec.betas);
  if (is_stdout(a.output)) {
    write_obj(mesh.vertices, tmpl.faces, ctx.out);
  } else {
    save_obj(mesh.vertices, tmpl.faces, a.output);
  }
  return kExitOk;
}

// validate ---------------------------------------------------------------

struct ValidateArgs {
  std::string input;
  std::string output;
};

int cmd_validate(Context& ctx, const ValidateArgs& a) {
  const BodyTemplate& tmpl = ctx.body();
  const std::vector<AnnotationRecord> records = load_records(a.input, ctx.mode);
  const auto results = parallel_map(records.size(), thread_count(),
                                    [&](std::size_t i) { return validate_record(records[i], &tmpl); });
  ojson failures = ojson::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].empty()) {
      ojson f;
      f["index"] = i;
      f["image"] = records[i].image;
      f["violations"] = violations_to_json(results[i]);
      failures.push_back(std::move(f));
    }
  }
  ojson report;
  report["records"] = records.size();
  report["valid"] = failures.empty();
  report["failures"] = std::move(failures);
  emit_json(ctx, a.output, report);
  return report["valid"].get<bool>() ? kExitOk : kExitValidation;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  std::optional<std::size_t> byte = std::nullopt) {
  ojson j;
  j["error"] = kind;
  j["message"] = message;
  if (byte) {
    j["byte_offset"] = *byte;
  }
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Amputation-aware body model toolkit", "ampkin"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_flag("--strict", strict, "Reject unknown JSON fields");

  ForwardArgs fwd;
  auto* forward_cmd = app.add_subcommand("forward", "Pose the body model and print vertices and joints");
  forward_cmd->add_option("--input,-i", fwd.input, "Annotation records (identity pose when omitted)");
  forward_cmd->add_option("--output,-o", fwd.output, "Output JSON path (default stdout)");
  forward_cmd->add_option("--label", fwd.label, "Extra amputation mask, e.g. Rleg:2");
  forward_cmd->add_option("--save-template", fwd.save_template, "Also write the resolved template");

  AmputateArgs amp;
  auto* amputate_cmd = app.add_subcommand("amputate", "Re-emit records with an amputation label applied");
  amputate_cmd->add_option("--label", amp.label, "Label text such as Larm:0,Rarm:0,Lleg:0,Rleg:2")->required();
  amputate_cmd->add_option("--input,-i", amp.input, "Annotation records (identity pose when omitted)");
  amputate_cmd->add_option("--output,-o", amp.output, "Output records path (default stdout)");

  QuantizeArgs qa;
  auto* quantize_cmd = app.add_subcommand("quantize", "Codebook initialisation, quantization and decoding");
  quantize_cmd->add_option("--init", qa.init, "Write a random codebook of the configured size and exit");
  quantize_cmd->add_option("--kind", qa.kind, "Codebook kind for --init (amp or non_amp)");
  quantize_cmd->add_option("--codebook", qa.codebook, "Single codebook");
  quantize_cmd->add_option("--amp", qa.amp, "Amputee codebook for switching");
  quantize_cmd->add_option("--non-amp", qa.non_amp, "Non-amputee codebook for switching");
  quantize_cmd->add_option("--yhat", qa.yhat, "Binary limb decisions, e.g. 0,0,0,1");
  quantize_cmd->add_option("--latents", qa.latents, "JSON matrix of latent tokens (hard mode)");
  quantize_cmd->add_option("--logits", qa.logits, "JSON matrix of code logits (soft mode)");
  quantize_cmd->add_flag("--soft", qa.soft, "Softmax-weighted decoding instead of nearest code");
  quantize_cmd->add_option("--update", qa.update, "Write the codebook after one EMA step and dead-code reset");
  quantize_cmd->add_option("--output,-o", qa.output, "Output JSON path (default stdout)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compare predicted records against ground truth");
  eval_cmd->add_option("--pred", ev.pred, "Predicted records")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth records")->required();
  eval_cmd->add_option("--output,-o", ev.output, "Report path (default stdout)");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic annotated samples");
  synth_cmd->add_option("--count,-n", sy.count, "Number of samples");
  synth_cmd->add_option("--output,-o", sy.output, "Records path (default stdout)");
  synth_cmd->add_option("--images-dir", sy.images_dir, "Write PNG overlays here");
  synth_cmd->add_option("--heatmaps-dir", sy.heatmaps_dir, "Write keypoint heatmaps here");
  synth_cmd->add_option("--background", sy.background, "PNG background (gradient when omitted)");

  ExportArgs ex;
  auto* export_cmd = app.add_subcommand("export-obj", "Write a posed mesh as Wavefront OBJ");
  export_cmd->add_option("--input,-i", ex.input, "Annotation records (identity pose when omitted)");
  export_cmd->add_option("--index", ex.index, "Record index");
  export_cmd->add_option("--output,-o", ex.output, "OBJ path (default stdout)");

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check records against the annotation invariants");
  validate_cmd->add_option("--input,-i", va.input, "Annotation records")->required();
  validate_cmd->add_option("--output,-o", va.output, "Report path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitError;
  }

  try {
    Context ctx{Config{}, strict ? ParseMode::kStrict : ParseMode::kLenient, out, err, std::nullopt};
    if (!config_path.empty()) {
      ctx.config = load_config(config_path, ctx.mode);
    }
    if (seed) {
      ctx.config.seed = *seed;
    }
    ctx.config.validate();

    if (forward_cmd->parsed()) {
      return cmd_forward(ctx, fwd);
    }
    if (amputate_cmd->parsed()) {
      return cmd_amputate(ctx, amp);
    }
    if (quantize_cmd->parsed()) {
      return cmd_quantize(ctx, qa);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(ctx, ev);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(ctx, sy);
    }
    if (export_cmd->parsed()) {
      return cmd_export_obj(ctx, ex);
    }
    return cmd_validate(ctx, va);
  } catch (const ParseError& e) {
    report_error(err, e.kind(), e.what(), e.byte_offset());
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, "io", e.what());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
  }
  return kExitError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, out, err);
}

}  // namespace ampkin::cli
