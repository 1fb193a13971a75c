#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "salrank/descriptors.hpp"
#include "salrank/retrieval.hpp"
#include "salrank/rng.hpp"
#include "test_support.hpp"

namespace salrank {
namespace {

GrayImage stripes(bool horizontal, int period = 8) {
  GrayImage img(kCanonicalSize, kCanonicalSize);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int t = horizontal ? y : x;
      img.at(x, y) = static_cast<float>(0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * t / period));
    }
  }
  return img;
}

GrayImage noise_image(std::uint64_t seed, int w = kCanonicalSize, int h = kCanonicalSize) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (auto& v : img.data) v = static_cast<float>(0.2 + 0.6 * rng.uniform());
  return img;
}

std::vector<double> energy_by_orientation(const std::vector<float>& gist) {
  std::vector<double> e(8, 0.0);
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < 8; ++k) {
      for (int c = 0; c < 16; ++c) e[k] += gist[(s * 8 + k) * 16 + c];
    }
  }
  return e;
}

TEST(Gist, ConstantImageHasZeroEnergy) {
  const auto g = gist_descriptor(GrayImage(100, 60, 0.37f));
  ASSERT_EQ(g.size(), static_cast<std::size_t>(kGistDim));
  for (float v : g) EXPECT_NEAR(v, 0.0f, 1e-5f);
}

TEST(Gist, Deterministic) {
  const auto img = noise_image(4, 90, 70);
  EXPECT_EQ(gist_descriptor(img), gist_descriptor(img));
}

TEST(Gist, StripeOrientationsLandInOrthogonalBins) {
  const auto eh = energy_by_orientation(gist_descriptor(stripes(true)));
  const auto ev = energy_by_orientation(gist_descriptor(stripes(false)));
  const auto kh = std::max_element(eh.begin(), eh.end()) - eh.begin();
  const auto kv = std::max_element(ev.begin(), ev.end()) - ev.begin();
  EXPECT_EQ((kh - kv + 8) % 8, 4);
}

TEST(Gist, InvariantToIntensityOffset) {
  const auto img = noise_image(9);
  GrayImage shifted = img;
  for (auto& v : shifted.data) v += 0.1f;
  const auto a = gist_descriptor(img);
  const auto b = gist_descriptor(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-4f * (1.0f + std::fabs(a[i])));
}

TEST(Hog, ConstantImageHasZeroHistograms) {
  const auto h = hog_cell_histograms(GrayImage(128, 128, 0.8f));
  for (float v : h) EXPECT_EQ(v, 0.0f);
  const auto d = hog_descriptor(GrayImage(128, 128, 0.8f));
  ASSERT_EQ(d.size(), static_cast<std::size_t>(kHogDim));
  for (float v : d) EXPECT_EQ(v, 0.0f);
}

TEST(Hog, GradientFlipGivesSameUnsignedHistograms) {
  const auto img = noise_image(2);
  GrayImage inverted = img;
  for (auto& v : inverted.data) v = 1.0f - v;
  const auto a = hog_descriptor(img);
  const auto b = hog_descriptor(inverted);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-5f);
}

TEST(Hog, VerticalEdgeConcentratesInHorizontalGradientBin) {
  GrayImage img(128, 128, 0.1f);
  for (int y = 0; y < 128; ++y) {
    for (int x = 60; x < 128; ++x) img.at(x, y) = 0.9f;
  }
  const auto h = hog_cell_histograms(img);
  std::vector<double> per_bin(kHogBins, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) per_bin[i % kHogBins] += h[i];
  const double total = std::accumulate(per_bin.begin(), per_bin.end(), 0.0);
  ASSERT_GT(total, 0.0);
  EXPECT_GT(per_bin[0] / total, 0.9);
}

TEST(Hog, InvariantToIntensityOffset) {
  const auto img = noise_image(3);
  GrayImage shifted = img;
  for (auto& v : shifted.data) v += 0.25f;
  const auto a = hog_descriptor(img);
  const auto b = hog_descriptor(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-5f);
}

TEST(Scene, UnitNormHalves) {
  const auto d = scene_descriptor(noise_image(6, 77, 51));
  ASSERT_EQ(d.size(), static_cast<std::size_t>(kGistDim + kHogDim));
  double g = 0, h = 0;
  for (int i = 0; i < kGistDim; ++i) g += d[i] * d[i];
  for (int i = kGistDim; i < kGistDim + kHogDim; ++i) h += d[i] * d[i];
  EXPECT_NEAR(g, 1.0, 1e-5);
  EXPECT_NEAR(h, 1.0, 1e-5);
}

struct Pool {
  std::vector<std::vector<float>> sem, scene;
  std::vector<RetrievalItem> items;
  void add(std::string id, std::vector<float> s, std::vector<float> c) {
    sem.push_back(std::move(s));
    scene.push_back(std::move(c));
    ids.push_back(std::move(id));
  }
  void finalize() {
    items.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) items.push_back({ids[i], sem[i], scene[i]});
  }
  std::vector<std::string> ids;
};

Pool random_pool(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Pool p;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> a(6), b(5);
    for (auto& v : a) v = static_cast<float>(rng.normal());
    for (auto& v : b) v = static_cast<float>(rng.normal());
    p.add("im" + std::to_string(100 + i), a, b);
  }
  p.finalize();
  return p;
}

TEST(Retrieval, PoolOfExactlyKReturnsAll) {
  Pool p = random_pool(6, 1);
  const RetrievalConfig cfg;
  const RetrievalItem q = p.items[0];
  const auto out = retrieve_hybrid(q, p.items, cfg);
  ASSERT_EQ(out.size(), 5u);
  std::set<std::string> got(out.begin(), out.end());
  EXPECT_EQ(got.size(), 5u);
  EXPECT_FALSE(got.count(q.id));
}

TEST(Retrieval, SemanticDuplicateRanksFirst) {
  Pool p = random_pool(12, 2);
  p.sem[7] = p.sem[0];
  p.finalize();
  const auto out = retrieve_hybrid(p.items[0], p.items, RetrievalConfig{});
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0], p.ids[7]);
}

TEST(Retrieval, MatchesBruteForceSort) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Pool p = random_pool(15, 100 + seed);
    const RetrievalConfig cfg;
    const std::size_t qi = seed % 15;
    const auto out = retrieve_hybrid(p.items[qi], p.items, cfg);

    auto nearest = [&](const std::vector<std::vector<float>>& feat, const std::set<std::string>& skip, std::size_t k) {
      std::vector<std::pair<double, std::string>> d;
      for (std::size_t i = 0; i < p.ids.size(); ++i) {
        if (i == qi || skip.count(p.ids[i])) continue;
        d.push_back({euclidean_distance(feat[qi], feat[i]), p.ids[i]});
      }
      std::sort(d.begin(), d.end());
      std::vector<std::string> r;
      for (std::size_t i = 0; i < k && i < d.size(); ++i) r.push_back(d[i].second);
      return r;
    };
    auto expected = nearest(p.sem, {}, cfg.k_semantic);
    const auto scene = nearest(p.scene, std::set<std::string>(expected.begin(), expected.end()), cfg.k_scene);
    expected.insert(expected.end(), scene.begin(), scene.end());
    EXPECT_EQ(out, expected);
  }
}

TEST(Retrieval, EmptyPoolGivesEmptyResult) {
  Pool p = random_pool(1, 3);
  EXPECT_TRUE(retrieve_hybrid(p.items[0], p.items, RetrievalConfig{}).empty());
}

TEST(Retrieval, PoolPermutationDoesNotChangeResult) {
  Pool p = random_pool(20, 5);
  const auto base = retrieve_hybrid(p.items[3], p.items, RetrievalConfig{});
  auto shuffled = p.items;
  Rng rng(6);
  rng.shuffle(shuffled);
  EXPECT_EQ(retrieve_hybrid(p.items[3], shuffled, RetrievalConfig{}), base);
}

TEST(Retrieval, TableRoundTrip) {
  testing::TempDir dir;
  write_retrieval_table({"a", "b"}, {{"b", "c"}, {"a"}}, dir.file("r.tsv"));
  const auto t = read_retrieval_table(dir.file("r.tsv"));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("a"), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(t.at("b"), (std::vector<std::string>{"a"}));
}

}  // namespace
}  // namespace salrank
