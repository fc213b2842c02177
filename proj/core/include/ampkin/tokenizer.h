#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ampkin/body_model.h"

namespace ampkin {

/// Which training population a codebook was learned from.
enum class CodebookKind : std::uint8_t { kNonAmp = 0, kAmp = 1 };

[[nodiscard]] std::string_view to_string(CodebookKind kind);

/// S x d latent tokens, one token per row.
using LatentTokens = Eigen::MatrixXd;
/// S x M logits over codebook entries.
using TokenLogits = Eigen::MatrixXd;

/// Usage below this is treated as "no data" by the EMA update.
inline constexpr double kUsageEpsilon = 1e-9;

/// M x d code vectors with the EMA bookkeeping (usage counts and
/// accumulated sums) needed to re-estimate them.
class Codebook {
 public:
  /// Fresh codebook: usage 1 per code, ema_sum equal to the codes.
  Codebook(Eigen::MatrixXd codes, CodebookKind kind);
  /// Throws InvalidInputError when shapes disagree, values are non-finite
  /// or a usage is negative.
  Codebook(Eigen::MatrixXd codes, Eigen::VectorXd usage, Eigen::MatrixXd ema_sum,
           CodebookKind kind);

  /// Codes drawn uniformly from [-scale, scale].
  static Codebook random(int size, int dim, CodebookKind kind, std::uint64_t seed,
                         double scale = 1.0);

  [[nodiscard]] const Eigen::MatrixXd& codes() const { return codes_; }
  [[nodiscard]] const Eigen::VectorXd& usage() const { return usage_; }
  [[nodiscard]] const Eigen::MatrixXd& ema_sum() const { return ema_sum_; }
  [[nodiscard]] CodebookKind kind() const { return kind_; }
  [[nodiscard]] int size() const { return static_cast<int>(codes_.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(codes_.cols()); }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.kind_ == b.kind_ && a.codes_ == b.codes_ && a.usage_ == b.usage_ &&
           a.ema_sum_ == b.ema_sum_;
  }

 private:
  friend Codebook ema_update(Codebook, const LatentTokens&, const std::vector<int>&, double);
  friend Codebook reset_dead_codes(Codebook, const LatentTokens&, double, std::uint64_t);

  Eigen::MatrixXd codes_;
  Eigen::VectorXd usage_;
  Eigen::MatrixXd ema_sum_;
  CodebookKind kind_;
};

struct QuantizeResult {
  std::vector<int> indices;
  /// Selected code per token (S x d).
  LatentTokens quantized;
  /// Euclidean distance from each token to its code.
  Eigen::VectorXd distances;
};

/// Nearest code per token; ties go to the lowest code index.
[[nodiscard]] QuantizeResult quantize(const LatentTokens& z, const Codebook& cb);

/// Row-wise softmax over entries, then weighted sum of codes.
[[nodiscard]] LatentTokens soft_decode(const TokenLogits& logits, const Codebook& cb);

struct SwitchedDecode {
  LatentTokens latents;
  CodebookKind used;
};

/// Decodes with `amp` when any limb is predicted amputated, else with
/// `non_amp`. Throws ConfigurationError if the codebook kinds are swapped.
[[nodiscard]] SwitchedDecode switch_and_decode(const TokenLogits& logits,
                                               const std::array<int, 4>& y_hat,
                                               const Codebook& amp, const Codebook& non_amp);

/// Same branch rule with hard nearest-code quantization of caller latents.
[[nodiscard]] std::pair<QuantizeResult, CodebookKind> switch_and_quantize(
    const LatentTokens& z, const std::array<int, 4>& y_hat, const Codebook& amp,
    const Codebook& non_amp);

enum class Reduction { kSum, kMean };

struct TokenizerLossWeights {
  double mix = 100.0;
  double codebook = 1.0;
  double commitment = 1.0;
  /// Reduction of the two latent quadratic terms.
  Reduction reduction = Reduction::kSum;
};

/// One side of the reconstruction comparison.
struct PoseReconstruction {
  VertexMatrix vertices;
  RowMajorX3 joints;
  PoseParams pose;
};

struct TokenizerLoss {
  double total = 0.0;
  double mix = 0.0;
  double codebook = 0.0;
  double commitment = 0.0;
};

/// Mixed reconstruction term (vertex, joint and 6D-pose mean squared errors,
/// summed) plus codebook and commitment terms. Without gradients both
/// latent terms equal ||Z - Z~||^2 and are reported separately.
[[nodiscard]] TokenizerLoss tokenizer_loss(const LatentTokens& z, const LatentTokens& z_quantized,
                                           const PoseReconstruction& predicted,
                                           const PoseReconstruction& target,
                                           const TokenizerLossWeights& weights = {});

/// One exponential-moving-average step:
///   usage   <- gamma * usage   + (1 - gamma) * count
///   ema_sum <- gamma * ema_sum + (1 - gamma) * sum of assigned latents
///   code    <- ema_sum / usage   (only where usage > kUsageEpsilon)
[[nodiscard]] Codebook ema_update(Codebook cb, const LatentTokens& z,
                                  const std::vector<int>& indices, double gamma);

/// Indices of codes whose usage is below `threshold`.
[[nodiscard]] std::vector<int> dead_codes(const Codebook& cb, double threshold);

/// Replaces every code with usage below `threshold` by a latent row drawn
/// with a seeded generator; replaced codes restart with usage 1.
[[nodiscard]] Codebook reset_dead_codes(Codebook cb, const LatentTokens& z, double threshold,
                                        std::uint64_t seed);

/// Codebook file ("AMPCB01").
void write_codebook(const Codebook& cb, std::ostream& out);
void save_codebook(const Codebook& cb, const std::filesystem::path& path);
[[nodiscard]] Codebook read_codebook(std::istream& in);
[[nodiscard]] Codebook load_codebook(const std::filesystem::path& path);

}  // namespace ampkin
