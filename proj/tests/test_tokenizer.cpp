#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ampkin/body_model.h"
#include "ampkin/errors.h"
#include "ampkin/random.h"
#include "ampkin/tokenizer.h"
#include "linear_decoder.h"
#include "oracles.h"

using namespace ampkin;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = scale * rng.normal();
    }
  }
  return m;
}

}  // namespace

TEST(Quantize, NearestByInspection) {
  Eigen::MatrixXd codes(2, 2);
  codes << 0, 0, 1, 1;
  Eigen::MatrixXd z(1, 2);
  z << 0.1, 0.2;
  const QuantizeResult q = quantize(z, Codebook(codes, CodebookKind::kNonAmp));
  EXPECT_EQ(q.indices, std::vector<int>{0});
}

TEST(Quantize, ExactCodeHasZeroDistance) {
  Rng rng(1);
  const Codebook cb(random_matrix(rng, 8, 4), CodebookKind::kNonAmp);
  const Eigen::MatrixXd z = cb.codes().row(3);
  const QuantizeResult q = quantize(z, cb);
  EXPECT_EQ(q.indices[0], 3);
  EXPECT_EQ(q.quantized.row(0), cb.codes().row(3));
  EXPECT_EQ(q.distances[0], 0.0);
}

TEST(Quantize, TiesGoToLowestIndex) {
  Eigen::MatrixXd codes(3, 1);
  codes << 1.0, -1.0, 1.0;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_EQ(quantize(z, Codebook(codes, CodebookKind::kNonAmp)).indices[0], 0);
}

TEST(Quantize, MatchesExhaustiveScan) {
  Rng rng(2);
  const Codebook cb = Codebook::random(256, 64, CodebookKind::kAmp, 7);
  const Eigen::MatrixXd z = random_matrix(rng, 200, 64, 0.6);
  const QuantizeResult q = quantize(z, cb);
  for (int i = 0; i < z.rows(); ++i) {
    const int ref = oracle::nearest_code(cb.codes(), z.row(i));
    EXPECT_EQ(q.indices[static_cast<std::size_t>(i)], ref);
    const double d = (z.row(i) - cb.codes().row(q.indices[static_cast<std::size_t>(i)])).norm();
    for (int m = 0; m < cb.size(); ++m) {
      EXPECT_LE(d, (z.row(i) - cb.codes().row(m)).norm());
    }
  }
}

TEST(Quantize, DimensionMismatch) {
  const Codebook cb = Codebook::random(4, 3, CodebookKind::kAmp, 0);
  EXPECT_THROW((void)quantize(Eigen::MatrixXd::Zero(2, 4), cb), DimensionMismatchError);
}

TEST(SoftDecode, UniformLogitsGiveColumnMean) {
  Rng rng(3);
  const Codebook cb(random_matrix(rng, 5, 3), CodebookKind::kNonAmp);
  const Eigen::MatrixXd out = soft_decode(Eigen::MatrixXd::Constant(2, 5, 0.7), cb);
  for (int r = 0; r < 2; ++r) {
    EXPECT_LE((out.row(r) - cb.codes().colwise().mean()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SoftDecode, SaturatedLogitEqualsHardChoice) {
  Rng rng(4);
  const Codebook cb(random_matrix(rng, 16, 6), CodebookKind::kNonAmp);
  const Eigen::MatrixXd z = random_matrix(rng, 10, 6);
  const QuantizeResult q = quantize(z, cb);
  Eigen::MatrixXd logits = random_matrix(rng, 10, 16);
  for (int s = 0; s < 10; ++s) {
    logits(s, q.indices[static_cast<std::size_t>(s)]) += 1e6;
  }
  EXPECT_LE((soft_decode(logits, cb) - q.quantized).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SoftDecode, MatchesLoopOracleAndStaysInHull) {
  Rng rng(5);
  const Codebook cb(random_matrix(rng, 12, 5), CodebookKind::kNonAmp);
  const Eigen::MatrixXd logits = random_matrix(rng, 9, 12, 3.0);
  const Eigen::MatrixXd out = soft_decode(logits, cb);
  EXPECT_LE((out - oracle::softmax_decode(logits, cb.codes())).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::RowVectorXd lo = cb.codes().colwise().minCoeff();
  const Eigen::RowVectorXd hi = cb.codes().colwise().maxCoeff();
  for (int r = 0; r < out.rows(); ++r) {
    EXPECT_TRUE(((out.row(r) - lo).array() >= -1e-12).all());
    EXPECT_TRUE(((hi - out.row(r)).array() >= -1e-12).all());
  }
}

TEST(Switch, BranchDependsOnlyOnAnyAmputation) {
  Rng rng(6);
  const Codebook amp = Codebook::random(8, 4, CodebookKind::kAmp, 1);
  const Codebook non = Codebook::random(8, 4, CodebookKind::kNonAmp, 2);
  const Eigen::MatrixXd logits = random_matrix(rng, 3, 8);
  const Eigen::MatrixXd amp_out = soft_decode(logits, amp);
  const Eigen::MatrixXd non_out = soft_decode(logits, non);
  for (int bits = 0; bits < 16; ++bits) {
    const std::array<int, 4> y = {bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1};
    const SwitchedDecode d = switch_and_decode(logits, y, amp, non);
    EXPECT_EQ(d.used, bits == 0 ? CodebookKind::kNonAmp : CodebookKind::kAmp);
    EXPECT_EQ(d.latents, bits == 0 ? non_out : amp_out);
  }
  EXPECT_THROW((void)switch_and_decode(logits, {0, 0, 0, 0}, non, amp), ConfigurationError);
}

TEST(Switch, IdenticalCodebooksIgnoreBranch) {
  Rng rng(7);
  const Eigen::MatrixXd codes = random_matrix(rng, 6, 3);
  const Codebook amp(codes, CodebookKind::kAmp);
  const Codebook non(codes, CodebookKind::kNonAmp);
  const Eigen::MatrixXd logits = random_matrix(rng, 4, 6);
  EXPECT_EQ(switch_and_decode(logits, {0, 0, 0, 0}, amp, non).latents,
            switch_and_decode(logits, {0, 1, 1, 0}, amp, non).latents);
}

TEST(TokenizerLoss, SumConventionAndZero) {
  const BodyTemplate tmpl = make_toy_template(128);
  const MeshResult m = forward(tmpl, PoseParams::identity(), {});
  const PoseReconstruction recon{m.vertices, m.joints_posed, PoseParams::identity()};
  const int s = 16;
  const int d = 64;
  const Eigen::MatrixXd z = Eigen::MatrixXd::Constant(s, d, 0.25);
  EXPECT_EQ(tokenizer_loss(z, z, recon, recon).total, 0.0);

  const TokenizerLoss l = tokenizer_loss(z, z.array() - 1.0, recon, recon);
  EXPECT_EQ(l.mix, 0.0);
  EXPECT_EQ(l.codebook, s * d);
  EXPECT_EQ(l.commitment, s * d);
  EXPECT_EQ(l.total, 2.0 * s * d);

  TokenizerLossWeights mean_weights;
  mean_weights.reduction = Reduction::kMean;
  EXPECT_EQ(tokenizer_loss(z, z.array() - 1.0, recon, recon, mean_weights).total, 2.0);
}

TEST(TokenizerLoss, WeightsApplyPerComponent) {
  const BodyTemplate tmpl = make_toy_template(128);
  const MeshResult a = forward(tmpl, PoseParams::identity(), {});
  PoseParams bent;
  bent[kRightKnee] = axis_angle_to_matrix({Vec3(0.5, 0, 0)});
  const MeshResult b = forward(tmpl, bent, {});
  const PoseReconstruction pa{a.vertices, a.joints_posed, PoseParams::identity()};
  const PoseReconstruction pb{b.vertices, b.joints_posed, bent};
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 3);
  Eigen::MatrixXd zq = Eigen::MatrixXd::Constant(4, 3, 0.5);
  const TokenizerLoss l = tokenizer_loss(z, zq, pa, pb);
  EXPECT_GT(l.mix, 0.0);
  EXPECT_DOUBLE_EQ(l.total, 100.0 * l.mix + l.codebook + l.commitment);
  EXPECT_DOUBLE_EQ(l.codebook, 12 * 0.25);
}

TEST(TokenizerLoss, LinearDecoderRoundTrip) {
  const BodyTemplate tmpl = make_toy_template(128);
  const testing_support::LinearDecoder decoder(8, 21);
  Rng rng(9);
  const Eigen::MatrixXd z = random_matrix(rng, kNumJoints, 8);
  Eigen::MatrixXd codes(kNumJoints + 4, 8);
  codes << z, random_matrix(rng, 4, 8, 5.0);
  const Codebook cb(codes, CodebookKind::kNonAmp);
  const QuantizeResult q = quantize(z, cb);
  const auto target = decoder.reconstruct(tmpl, z);
  const auto recon = decoder.reconstruct(tmpl, q.quantized);
  EXPECT_EQ(tokenizer_loss(z, q.quantized, recon, target).total, 0.0);

  const Codebook coarse(random_matrix(rng, 6, 8), CodebookKind::kNonAmp);
  const QuantizeResult q2 = quantize(z, coarse);
  const TokenizerLoss l = tokenizer_loss(z, q2.quantized, decoder.reconstruct(tmpl, q2.quantized), target);
  EXPECT_GT(l.total, 0.0);
  EXPECT_GT(l.mix, 0.0);
}

TEST(Ema, DecayZeroSnapsToBatchMean) {
  Eigen::MatrixXd codes(1, 2);
  codes << 5.0, 5.0;
  Eigen::MatrixXd z(3, 2);
  z << 1, 2, 1, 2, 1, 2;
  const Codebook out = ema_update(Codebook(codes, CodebookKind::kNonAmp), z, {0, 0, 0}, 0.0);
  EXPECT_EQ(out.codes().row(0), Eigen::RowVector2d(1, 2));
}

TEST(Ema, UnassignedCodeUnchanged) {
  Rng rng(10);
  const Codebook cb(random_matrix(rng, 3, 2), CodebookKind::kNonAmp);
  const Eigen::MatrixXd z = random_matrix(rng, 4, 2);
  const Codebook out = ema_update(cb, z, {0, 0, 2, 2}, 0.9);
  EXPECT_EQ(out.codes().row(1), cb.codes().row(1));
  EXPECT_TRUE(out.codes().allFinite());
}

TEST(Ema, RejectsBadArguments) {
  const Codebook cb = Codebook::random(3, 2, CodebookKind::kNonAmp, 0);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW((void)ema_update(cb, z, {0, 1}, 1.0), InvalidInputError);
  EXPECT_THROW((void)ema_update(cb, z, {0, 3}, 0.5), InvalidInputError);
  EXPECT_THROW((void)ema_update(cb, z, {0}, 0.5), DimensionMismatchError);
}

TEST(Ema, StarvedUsageNeverDivides) {
  Eigen::MatrixXd codes(2, 1);
  codes << 1.0, 2.0;
  Eigen::VectorXd usage(2);
  usage << 0.0, 1.0;
  const Codebook cb(codes, usage, codes, CodebookKind::kNonAmp);
  const Codebook out = ema_update(cb, Eigen::MatrixXd::Constant(1, 1, 3.0), {1}, 0.5);
  EXPECT_EQ(out.codes()(0, 0), 1.0);
  EXPECT_TRUE(out.codes().allFinite());
}

TEST(Ema, GeometricConvergence) {
  const double gamma = 0.99;
  Eigen::MatrixXd codes(1, 2);
  codes << 4.0, -3.0;
  Eigen::MatrixXd z(2, 2);
  z << 1.0, 1.0, -1.0, 1.0;
  const Eigen::RowVector2d mean(0.0, 1.0);
  Codebook cb(codes, Eigen::VectorXd::Constant(1, 2.0), 2.0 * codes, CodebookKind::kNonAmp);
  const double d0 = (cb.codes().row(0) - mean).norm();
  for (int t = 1; t <= 3000; ++t) {
    cb = ema_update(std::move(cb), z, {0, 0}, gamma);
    if (t % 100 == 0) {
      EXPECT_NEAR((cb.codes().row(0) - mean).norm(), d0 * std::pow(gamma, t), 1e-9);
    }
  }
  EXPECT_LE((cb.codes().row(0) - mean).norm(), 1e-9);
}

TEST(DeadCodes, ResetRules) {
  Rng rng(12);
  Eigen::MatrixXd codes = random_matrix(rng, 5, 3);
  Eigen::VectorXd usage(5);
  usage << 1.0, 1e-6, 0.5, 0.0, 2.0;
  const Codebook cb(codes, usage, codes, CodebookKind::kAmp);
  EXPECT_EQ(dead_codes(cb, 1e-3), (std::vector<int>{1, 3}));
  EXPECT_EQ(reset_dead_codes(cb, random_matrix(rng, 4, 3), 0.0, 1), cb);

  const Eigen::MatrixXd one = random_matrix(rng, 1, 3);
  const Codebook r = reset_dead_codes(cb, one, 1e-3, 5);
  EXPECT_EQ(r.codes().row(1), one.row(0));
  EXPECT_EQ(r.codes().row(3), one.row(0));
  EXPECT_EQ(r.usage()[1], 1.0);
  EXPECT_EQ(r.codes().row(0), codes.row(0));

  const Eigen::MatrixXd batch = random_matrix(rng, 50, 3);
  EXPECT_EQ(reset_dead_codes(cb, batch, 1e-3, 77), reset_dead_codes(cb, batch, 1e-3, 77));
}

TEST(CodebookIo, RoundTripAndLayout) {
  Rng rng(13);
  Codebook cb = Codebook::random(7, 3, CodebookKind::kAmp, 3);
  cb = ema_update(std::move(cb), random_matrix(rng, 5, 3), {0, 1, 1, 4, 6}, 0.9);
  std::stringstream buf;
  write_codebook(cb, buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 7), "AMPCB01");
  EXPECT_EQ(bytes.size(), 7U + 4U + 4U + 1U + 8U * (7U * 3U * 2U + 7U));
  EXPECT_EQ(static_cast<unsigned char>(bytes[15]), 1U);
  EXPECT_EQ(read_codebook(buf), cb);

  std::stringstream truncated(bytes.substr(0, 40));
  EXPECT_THROW((void)read_codebook(truncated), SchemaError);
  std::string bad_kind = bytes;
  bad_kind[15] = 9;
  std::stringstream bk(bad_kind);
  EXPECT_THROW((void)read_codebook(bk), SchemaError);
}
