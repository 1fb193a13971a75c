#include <gtest/gtest.h>

#include <algorithm>

#include "salrank/proposals.hpp"
#include "salrank/rng.hpp"

namespace salrank {
namespace {

ObjectProposal prop(std::string id, BBox box, double conf) {
  ObjectProposal p;
  p.id = std::move(id);
  p.box = box;
  p.confidence = conf;
  return p;
}

BBox random_box(Rng& rng, int w, int h) {
  const int x = static_cast<int>(rng.below(w - 1));
  const int y = static_cast<int>(rng.below(h - 1));
  const int bw = 1 + static_cast<int>(rng.below(w - x));
  const int bh = 1 + static_cast<int>(rng.below(h - y));
  return {x, y, bw, bh};
}

TEST(Iou, IdenticalIsOne) { EXPECT_DOUBLE_EQ(iou({3, 4, 10, 7}, {3, 4, 10, 7}), 1.0); }

TEST(Iou, DisjointIsZero) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 5, 5}, {10, 10, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 5, 5}, {5, 0, 5, 5}), 0.0);  // touching edges
}

TEST(Iou, PartialOverlap) { EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 5, 10, 10}), 25.0 / 175.0, 1e-12); }

TEST(Iou, SymmetricOnRandomPairs) {
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    const BBox a = random_box(rng, 64, 48);
    const BBox b = random_box(rng, 64, 48);
    EXPECT_EQ(iou(a, b), iou(b, a));
  }
}

TEST(Filter, EmptyInput) { EXPECT_TRUE(filter_proposals({}).empty()); }

TEST(Filter, IdenticalBoxesKeepHigherConfidence) {
  const auto out = filter_proposals({prop("a", {0, 0, 10, 10}, 0.4), prop("b", {0, 0, 10, 10}, 0.9)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "b");
}

TEST(Filter, FullTieDropsLaterProposal) {
  const auto out = filter_proposals({prop("first", {0, 0, 10, 10}, 0.5), prop("second", {0, 0, 10, 10}, 0.5)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "first");
}

TEST(Filter, SmallerOverlappingBoxIsDropped) {
  // IOU 0.81 between a 10x10 and a 9x9 box; the smaller one goes even with higher confidence.
  const auto out = filter_proposals({prop("small", {0, 0, 9, 9}, 0.99), prop("big", {0, 0, 10, 10}, 0.1)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "big");
}

TEST(Filter, TwelveDisjointKeepsTopTenByConfidence) {
  std::vector<ObjectProposal> in;
  for (int i = 0; i < 12; ++i) {
    in.push_back(prop("p" + std::to_string(i), {i * 10, 0, 8, 8}, ((i * 7) % 12) / 12.0 + 0.01));
  }
  const auto out = filter_proposals(in);
  ASSERT_EQ(out.size(), 10u);
  std::vector<double> all;
  for (const auto& p : in) all.push_back(p.confidence);
  std::sort(all.rbegin(), all.rend());
  for (std::size_t k = 0; k < out.size(); ++k) EXPECT_EQ(out[k].confidence, all[k]);
}

TEST(Filter, PropertiesOnRandomSets) {
  Rng rng(21);
  const FilterConfig cfg;
  for (int t = 0; t < 300; ++t) {
    std::vector<ObjectProposal> in;
    const int n = 1 + static_cast<int>(rng.below(30));
    for (int i = 0; i < n; ++i) in.push_back(prop("p" + std::to_string(i), random_box(rng, 50, 40), rng.uniform()));
    const auto out = filter_proposals(in, cfg);
    ASSERT_LE(out.size(), static_cast<std::size_t>(cfg.max_proposals));
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) EXPECT_LT(iou(out[i].box, out[j].box), cfg.iou_threshold);
      if (i > 0) {
        EXPECT_GE(out[i - 1].confidence, out[i].confidence);
      }
    }
    const auto again = filter_proposals(out, cfg);
    ASSERT_EQ(again.size(), out.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(again[i].id, out[i].id);
  }
}

TEST(Enlarge, FactorOneIsIdentity) { EXPECT_EQ(enlarge({7, 9, 13, 5}, 1.0, 50, 50), (BBox{7, 9, 13, 5})); }

TEST(Enlarge, CenterPreserving) { EXPECT_EQ(enlarge({40, 40, 20, 20}, 1.5, 200, 200), (BBox{35, 35, 30, 30})); }

TEST(Enlarge, ClampedToImageWhenTooLarge) { EXPECT_EQ(enlarge({0, 0, 20, 20}, 1.5, 24, 24), (BBox{0, 0, 24, 24})); }

TEST(Enlarge, ShiftsInwardWithoutShrinking) {
  EXPECT_EQ(enlarge({0, 0, 10, 10}, 1.5, 100, 100), (BBox{0, 0, 15, 15}));
  EXPECT_EQ(enlarge({90, 90, 10, 10}, 1.5, 100, 100), (BBox{85, 85, 15, 15}));
}

TEST(Enlarge, StaysInsideAndNeverShrinks) {
  Rng rng(8);
  for (int t = 0; t < 2000; ++t) {
    const int w = 10 + static_cast<int>(rng.below(100));
    const int h = 10 + static_cast<int>(rng.below(100));
    const BBox b = random_box(rng, w, h);
    const double f = 1.0 + rng.uniform() * 2.0;
    const BBox e = enlarge(b, f, w, h);
    ASSERT_TRUE(box_within(e, w, h));
    EXPECT_GE(e.area(), b.area());
  }
}

}  // namespace
}  // namespace salrank
