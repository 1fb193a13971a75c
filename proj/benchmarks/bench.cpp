#include <benchmark/benchmark.h>

#include "salrank/descriptors.hpp"
#include "salrank/fusion.hpp"
#include "salrank/localization.hpp"
#include "salrank/metrics.hpp"
#include "salrank/proposals.hpp"
#include "salrank/ranker.hpp"
#include "salrank/rng.hpp"

namespace {

using namespace salrank;

std::vector<float> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

GrayImage random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  return img;
}

// Forward pass of the full-width branch (8192 -> 1024 -> 2048 -> 2048 -> 1024 -> 1024 -> 1) and
// of a narrow one; the argument is the input dimension.
void BM_Forward(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const bool full = dim == 8192;
  std::vector<std::size_t> dims{dim};
  const std::vector<std::size_t> hidden = full ? kDefaultHidden : std::vector<std::size_t>{64, 32};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  const auto model = RankerModel::random(dims, 1);
  const auto x = random_vector(dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(8192)->Unit(benchmark::kMicrosecond);

void BM_PairGradient(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto model = RankerModel::random({dim, 64, 32, 1}, 3);
  const auto f1 = random_vector(dim, 4), f2 = random_vector(dim, 5);
  auto grad = MlpParams<float>::zeros(model.dims());
  for (auto _ : state) {
    benchmark::DoNotOptimize(accumulate_pair_gradient<float>(model, f1, f2, 1, 10.0, HingeForm::kMargin, grad));
  }
}
BENCHMARK(BM_PairGradient)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Gist(benchmark::State& state) {
  const auto img = random_image(320, 240, 6);
  for (auto _ : state) benchmark::DoNotOptimize(gist_descriptor(img));
}
BENCHMARK(BM_Gist)->Unit(benchmark::kMillisecond);

void BM_Hog(benchmark::State& state) {
  const auto img = random_image(320, 240, 7);
  for (auto _ : state) benchmark::DoNotOptimize(hog_descriptor(img));
}
BENCHMARK(BM_Hog)->Unit(benchmark::kMillisecond);

void BM_EvaluateMap(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto pred = random_image(side, side, 8);
  SaliencyMap gt(side, side, 0.0f);
  for (int y = side / 4; y < 3 * side / 4; ++y) {
    for (int x = side / 4; x < 3 * side / 4; ++x) gt.at(x, y) = 1.0f;
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_map(pred, gt));
}
BENCHMARK(BM_EvaluateMap)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  const int side = 256;
  std::vector<SaliencyMap> sals;
  for (int m = 0; m < 5; ++m) sals.push_back(random_image(side, side, 10 + m));
  const std::vector<BBox> boxes{{10, 10, 100, 80}, {90, 60, 120, 150}, {200, 20, 50, 50}};
  const auto ic = build_coarse_mask(side, side, boxes);
  for (auto _ : state) {
    const auto conf = confidence_matrix(sals, ic, boxes);
    benchmark::DoNotOptimize(fuse(sals, conf, boxes));
  }
}
BENCHMARK(BM_Fuse)->Unit(benchmark::kMillisecond);

void BM_FilterProposals(benchmark::State& state) {
  Rng rng(12);
  std::vector<ObjectProposal> props(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < props.size(); ++i) {
    const int x = static_cast<int>(rng.below(200)), y = static_cast<int>(rng.below(200));
    props[i].id = "p" + std::to_string(i);
    props[i].box = {x, y, 1 + static_cast<int>(rng.below(100)), 1 + static_cast<int>(rng.below(100))};
    props[i].confidence = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(filter_proposals(props));
}
BENCHMARK(BM_FilterProposals)->Arg(50)->Arg(500)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
