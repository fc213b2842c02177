#include <benchmark/benchmark.h>

#include "ampkin/amputation.h"
#include "ampkin/body_model.h"
#include "ampkin/metrics.h"
#include "ampkin/random.h"
#include "ampkin/synth.h"
#include "ampkin/tokenizer.h"

using namespace ampkin;

namespace {

PoseParams random_pose(Rng& rng) {
  PoseParams pose;
  for (int j = 0; j < kNumJoints; ++j) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    pose[j] = axis_angle_to_matrix({0.5 * v});
  }
  return pose;
}

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = rng.normal();
    }
  }
  return m;
}

void BM_Forward(benchmark::State& state) {
  const BodyTemplate tmpl = make_toy_template(static_cast<int>(state.range(0)));
  Rng rng(1);
  const PoseParams pose = random_pose(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(tmpl, pose, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(512)->Arg(2048)->Arg(6890);

void BM_ForwardAmputated(benchmark::State& state) {
  const BodyTemplate tmpl = make_toy_template(512);
  Rng rng(2);
  const PoseParams pose = apply_mask(random_pose(rng), AmputationLabel::single(LimbClass::make(Limb::kLeftLeg, 3)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(tmpl, pose, {}));
  }
}
BENCHMARK(BM_ForwardAmputated);

void BM_Quantize(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const int s = static_cast<int>(state.range(2));
  const Codebook cb = Codebook::random(m, d, CodebookKind::kNonAmp, 3);
  Rng rng(4);
  const Eigen::MatrixXd z = random_matrix(rng, s, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantize(z, cb));
  }
  state.SetItemsProcessed(state.iterations() * s);
}
BENCHMARK(BM_Quantize)->Args({256, 64, 16})->Args({2048, 256, 320});

void BM_SoftDecode(benchmark::State& state) {
  const Codebook cb = Codebook::random(2048, 256, CodebookKind::kAmp, 5);
  Rng rng(6);
  const Eigen::MatrixXd logits = random_matrix(rng, 320, 2048);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_decode(logits, cb));
  }
}
BENCHMARK(BM_SoftDecode);

void BM_PaMpjpe(benchmark::State& state) {
  Rng rng(7);
  RowMajorX3 a(24, 3);
  RowMajorX3 b(24, 3);
  for (int i = 0; i < 24; ++i) {
    a.row(i) << rng.normal(), rng.normal(), rng.normal();
    b.row(i) << rng.normal(), rng.normal(), rng.normal();
  }
  const JointSet pa = JointSet::all_valid(a);
  const JointSet pb = JointSet::all_valid(b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pa_mpjpe(pa, pb));
  }
}
BENCHMARK(BM_PaMpjpe);

void BM_Heatmaps(benchmark::State& state) {
  Keypoints2D k(kNumJoints, 3);
  Rng rng(8);
  for (int j = 0; j < kNumJoints; ++j) {
    k.row(j) << rng.uniform(0, 256), rng.uniform(0, 256), 1.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize_heatmaps(k, {256, 256}));
  }
}
BENCHMARK(BM_Heatmaps);

}  // namespace

BENCHMARK_MAIN();
