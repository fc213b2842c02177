#include "ampkin/tokenizer.h"

#include <cmath>
#include <limits>

#include "ampkin/errors.h"
#include "ampkin/random.h"

namespace ampkin {
namespace {

void check_dims(const LatentTokens& z, const Codebook& cb) {
  if (z.rows() < 1) {
    throw InvalidInputError("latent tokens: need at least one token");
  }
  if (z.cols() != cb.dim()) {
    throw DimensionMismatchError("latent dimension " + std::to_string(z.cols()) +
                                 " does not match codebook dimension " +
                                 std::to_string(cb.dim()));
  }
}

void check_kinds(const Codebook& amp, const Codebook& non_amp) {
  if (amp.kind() != CodebookKind::kAmp || non_amp.kind() != CodebookKind::kNonAmp) {
    throw ConfigurationError("codebook switch needs an amp and a non_amp codebook");
  }
}

bool any_amputated(const std::array<int, 4>& y_hat) {
  int sum = 0;
  for (int y : y_hat) sum += y;
  return sum > 0;
}

double sum_sq(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.squaredNorm(); }

double mean_sq(const Eigen::Ref<const Eigen::MatrixXd>& diff) {
  return diff.size() == 0 ? 0.0 : diff.squaredNorm() / static_cast<double>(diff.size());
}

Eigen::Matrix<double, kNumJoints, 6> pose_6d(const PoseParams& pose) {
  Eigen::Matrix<double, kNumJoints, 6> out;
  for (int j = 0; j < kNumJoints; ++j) {
    const Rot6D r = matrix_to_6d(pose[j]);
    out.row(j) << r.a.transpose(), r.b.transpose();
  }
  return out;
}

}  // namespace

std::string_view to_string(CodebookKind kind) {
  return kind == CodebookKind::kAmp ? "amp" : "non_amp";
}

Codebook::Codebook(Eigen::MatrixXd codes, CodebookKind kind)
    : Codebook(codes, Eigen::VectorXd::Ones(codes.rows()), codes, kind) {}

Codebook::Codebook(Eigen::MatrixXd codes, Eigen::VectorXd usage, Eigen::MatrixXd ema_sum,
                   CodebookKind kind)
    : codes_(std::move(codes)), usage_(std::move(usage)), ema_sum_(std::move(ema_sum)), kind_(kind) {
  if (codes_.rows() < 1 || codes_.cols() < 1) {
    throw InvalidInputError("codebook needs M >= 1 and d >= 1");
  }
  if (usage_.size() != codes_.rows() || ema_sum_.rows() != codes_.rows() ||
      ema_sum_.cols() != codes_.cols()) {
    throw InvalidInputError("codebook usage/ema_sum shapes do not match codes");
  }
  if (!codes_.allFinite() || !usage_.allFinite() || !ema_sum_.allFinite()) {
    throw InvalidInputError("codebook contains non-finite values");
  }
  if ((usage_.array() < 0.0).any()) {
    throw InvalidInputError("codebook usage must be non-negative");
  }
  if (kind_ != CodebookKind::kAmp && kind_ != CodebookKind::kNonAmp) {
    throw InvalidInputError("unknown codebook kind");
  }
}

Codebook Codebook::random(int size, int dim, CodebookKind kind, std::uint64_t seed, double scale) {
  if (size < 1 || dim < 1) {
    throw InvalidInputError("codebook needs M >= 1 and d >= 1");
  }
  Rng rng(seed);
  Eigen::MatrixXd codes(size, dim);
  for (int m = 0; m < size; ++m) {
    for (int k = 0; k < dim; ++k) {
      codes(m, k) = rng.uniform(-scale, scale);
    }
  }
  return Codebook(std::move(codes), kind);
}

QuantizeResult quantize(const LatentTokens& z, const Codebook& cb) {
  check_dims(z, cb);
  const auto& codes = cb.codes();
  QuantizeResult out;
  out.indices.resize(static_cast<std::size_t>(z.rows()));
  out.quantized.resize(z.rows(), z.cols());
  out.distances.resize(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < codes.rows(); ++m) {
      const double d2 = (z.row(i) - codes.row(m)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(m);
      }
    }
    out.indices[static_cast<std::size_t>(i)] = best;
    out.quantized.row(i) = codes.row(best);
    out.distances[i] = std::sqrt(best_d2);
  }
  return out;
}

LatentTokens soft_decode(const TokenLogits& logits, const Codebook& cb) {
  if (logits.cols() != cb.size()) {
    throw DimensionMismatchError("token logits have " + std::to_string(logits.cols()) +
                                 " columns, codebook has " + std::to_string(cb.size()) +
                                 " entries");
  }
  if (!logits.allFinite()) {
    throw InvalidInputError("token logits must be finite");
  }
  Eigen::MatrixXd weights(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    weights.row(i) = (logits.row(i).array() - peak).exp();
    weights.row(i) /= weights.row(i).sum();
  }
  return weights * cb.codes();
}

SwitchedDecode switch_and_decode(const TokenLogits& logits, const std::array<int, 4>& y_hat,
                                 const Codebook& amp, const Codebook& non_amp) {
  check_kinds(amp, non_amp);
  if (any_amputated(y_hat)) {
    return {soft_decode(logits, amp), CodebookKind::kAmp};
  }
  return {soft_decode(logits, non_amp), CodebookKind::kNonAmp};
}

std::pair<QuantizeResult, CodebookKind> switch_and_quantize(const LatentTokens& z,
                                                            const std::array<int, 4>& y_hat,
                                                            const Codebook& amp,
                                                            const Codebook& non_amp) {
  check_kinds(amp, non_amp);
  if (any_amputated(y_hat)) {
    return {quantize(z, amp), CodebookKind::kAmp};
  }
  return {quantize(z, non_amp), CodebookKind::kNonAmp};
}

TokenizerLoss tokenizer_loss(const LatentTokens& z, const LatentTokens& z_quantized,
                             const PoseReconstruction& predicted,
                             const PoseReconstruction& target,
                             const TokenizerLossWeights& weights) {
  if (z.rows() != z_quantized.rows() || z.cols() != z_quantized.cols()) {
    throw DimensionMismatchError("latents and quantized latents differ in shape");
  }
  if (predicted.vertices.rows() != target.vertices.rows() ||
      predicted.joints.rows() != target.joints.rows()) {
    throw DimensionMismatchError("reconstruction and target differ in shape");
  }
  TokenizerLoss loss;
  loss.mix = mean_sq(predicted.vertices - target.vertices) +
             mean_sq(predicted.joints - target.joints) +
             mean_sq(pose_6d(predicted.pose) - pose_6d(target.pose));
  const Eigen::MatrixXd residual = z - z_quantized;
  const double quad = weights.reduction == Reduction::kSum ? sum_sq(residual) : mean_sq(residual);
  loss.codebook = quad;
  loss.commitment = quad;
  loss.total = weights.mix * loss.mix + weights.codebook * loss.codebook +
               weights.commitment * loss.commitment;
  return loss;
}

Codebook ema_update(Codebook cb, const LatentTokens& z, const std::vector<int>& indices,
                    double gamma) {
  check_dims(z, cb);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidInputError("EMA decay must be in [0, 1)");
  }
  if (indices.size() != static_cast<std::size_t>(z.rows())) {
    throw DimensionMismatchError("one code index per latent token required");
  }
  if (!z.allFinite()) {
    throw InvalidInputError("latent tokens must be finite");
  }
  const Eigen::Index m_count = cb.codes_.rows();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m_count);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m_count, cb.codes_.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int m = indices[i];
    if (m < 0 || m >= m_count) {
      throw InvalidInputError("code index out of range: " + std::to_string(m));
    }
    counts[m] += 1.0;
    sums.row(m) += z.row(static_cast<Eigen::Index>(i));
  }
  cb.usage_ = gamma * cb.usage_ + (1.0 - gamma) * counts;
  cb.ema_sum_ = gamma * cb.ema_sum_ + (1.0 - gamma) * sums;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    // Codes without assignments keep their value exactly.
    if (counts[m] > 0.0 && cb.usage_[m] > kUsageEpsilon) {
      cb.codes_.row(m) = cb.ema_sum_.row(m) / cb.usage_[m];
    }
  }
  return cb;
}

std::vector<int> dead_codes(const Codebook& cb, double threshold) {
  std::vector<int> out;
  for (int m = 0; m < cb.size(); ++m) {
    if (cb.usage()[m] < threshold) {
      out.push_back(m);
    }
  }
  return out;
}

Codebook reset_dead_codes(Codebook cb, const LatentTokens& z, double threshold,
                          std::uint64_t seed) {
  check_dims(z, cb);
  Rng rng(seed);
  for (int m : dead_codes(cb, threshold)) {
    const auto row = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(z.rows())));
    cb.codes_.row(m) = z.row(row);
    cb.ema_sum_.row(m) = z.row(row);
    cb.usage_[m] = 1.0;
  }
  return cb;
}

}  // namespace ampkin
