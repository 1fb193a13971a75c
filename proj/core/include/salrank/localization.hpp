#ifndef SALRANK_LOCALIZATION_HPP
#define SALRANK_LOCALIZATION_HPP

#include <span>
#include <string>
#include <vector>

#include "salrank/feature_blob.hpp"
#include "salrank/ranker.hpp"
#include "salrank/types.hpp"

namespace salrank {

struct ScoreEntry {
  std::string proposal_id;
  std::size_t index = 0;  // position in the image's proposal list
  float branch_output = 0.0f;
  long score = 0;
};

struct ScoreTable {
  std::vector<ScoreEntry> entries;  // in proposal order
  std::vector<long> xi;             // scores, descending

  [[nodiscard]] bool empty() const { return entries.empty(); }
};

/// Win counts: for each own output, how many other outputs (own or partner)
/// it strictly exceeds.
std::vector<long> count_wins(std::span<const float> own, std::span<const float> partners);

ScoreTable make_score_table(const ImageRecord& image, std::span<const float> own_outputs,
                            std::span<const float> partner_outputs);

/// Scores every proposal of `image` against all proposals of `image` and of
/// the retrieved images.
ScoreTable score_all(const RankerModel& model, const FeatureStore& features, const ImageRecord& image,
                     std::span<const ImageRecord* const> retrieved);

/// Cut position at the largest drop of the descending score sequence (first
/// such position on ties); 1 for a single entry or a flat sequence.
std::size_t select_q(const ScoreTable& table);

/// Indices (into the proposal list) of the q highest scores, earlier
/// proposals first among equal scores.
std::vector<std::size_t> top_q(const ScoreTable& table, std::size_t q);

/// Binary map that is 1 exactly on the union of the boxes.
SaliencyMap build_coarse_mask(int width, int height, std::span<const BBox> boxes);

}  // namespace salrank

#endif  // SALRANK_LOCALIZATION_HPP
