#ifndef SALRANK_PROPOSALS_HPP
#define SALRANK_PROPOSALS_HPP

#include <vector>

#include "salrank/types.hpp"

namespace salrank {

struct FilterConfig {
  double iou_threshold = 0.5;
  int max_proposals = 10;

  void validate() const;
};

double iou(const BBox& a, const BBox& b);

/// Removes overlapping proposals, keeping the larger box of any pair whose IOU
/// reaches the threshold (ties: higher confidence, then earlier position).
/// Survivors are capped at `max_proposals` by confidence and returned in
/// descending confidence order.
std::vector<ObjectProposal> filter_proposals(const std::vector<ObjectProposal>& proposals,
                                             const FilterConfig& cfg = {});

/// Box with the same center scaled by `factor` in each direction, moved inside
/// the image and cropped only if it is larger than the image.
BBox enlarge(const BBox& box, double factor, int image_width, int image_height);

}  // namespace salrank

#endif  // SALRANK_PROPOSALS_HPP
