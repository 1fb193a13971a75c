#include "salrank/localization.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "salrank/errors.hpp"

namespace salrank {

std::vector<long> count_wins(std::span<const float> own, std::span<const float> partners) {
  std::vector<long> wins(own.size(), 0);
  for (std::size_t i = 0; i < own.size(); ++i) {
    for (std::size_t j = 0; j < own.size(); ++j) {
      if (j != i && own[i] - own[j] > 0.0f) ++wins[i];
    }
    for (float p : partners) {
      if (own[i] - p > 0.0f) ++wins[i];
    }
  }
  return wins;
}

ScoreTable make_score_table(const ImageRecord& image, std::span<const float> own_outputs,
                            std::span<const float> partner_outputs) {
  if (own_outputs.size() != image.proposals.size()) {
    throw ValidationError("image '" + image.id + "': score count does not match proposals");
  }
  const auto wins = count_wins(own_outputs, partner_outputs);
  ScoreTable t;
  for (std::size_t i = 0; i < wins.size(); ++i) {
    t.entries.push_back({image.proposals[i].id, i, own_outputs[i], wins[i]});
  }
  t.xi = wins;
  std::sort(t.xi.begin(), t.xi.end(), std::greater<>());
  return t;
}

ScoreTable score_all(const RankerModel& model, const FeatureStore& features, const ImageRecord& image,
                     std::span<const ImageRecord* const> retrieved) {
  std::vector<float> own, partners;
  for (const auto& p : image.proposals) own.push_back(score(model, features, feature_ref(p)));
  for (const ImageRecord* r : retrieved) {
    for (const auto& p : r->proposals) partners.push_back(score(model, features, feature_ref(p)));
  }
  return make_score_table(image, own, partners);
}

std::size_t select_q(const ScoreTable& table) {
  if (table.empty()) throw ValidationError("select_q: empty score table");
  const auto& xi = table.xi;
  std::size_t q = 1;
  long best = xi.size() > 1 ? xi[0] - xi[1] : 0;
  for (std::size_t i = 2; i < xi.size(); ++i) {
    const long drop = xi[i - 1] - xi[i];
    if (drop > best) {
      best = drop;
      q = i;
    }
  }
  return q;
}

std::vector<std::size_t> top_q(const ScoreTable& table, std::size_t q) {
  std::vector<std::size_t> order(table.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.entries[a].score > table.entries[b].score;
  });
  order.resize(std::min(q, order.size()));
  std::vector<std::size_t> out;
  for (std::size_t k : order) out.push_back(table.entries[k].index);
  return out;
}

SaliencyMap build_coarse_mask(int width, int height, std::span<const BBox> boxes) {
  SaliencyMap m(width, height, 0.0f);
  for (const auto& b : boxes) {
    if (!box_within(b, width, height)) throw ValidationError("coarse mask: box outside the image");
    for (int y = b.y; y < b.bottom(); ++y) {
      for (int x = b.x; x < b.right(); ++x) m.at(x, y) = 1.0f;
    }
  }
  return m;
}

}  // namespace salrank
