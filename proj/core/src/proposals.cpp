#include "salrank/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salrank/errors.hpp"

namespace salrank {

void FilterConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("filter.iou_threshold must lie in (0, 1]");
  }
  if (max_proposals < 1) throw ValidationError("filter.max_proposals must be positive");
}

double iou(const BBox& a, const BBox& b) {
  const long long ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const long long iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const long long inter = ix * iy;
  if (inter == 0) return 0.0;
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<ObjectProposal> filter_proposals(const std::vector<ObjectProposal>& proposals,
                                             const FilterConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  // Larger boxes win; area ties go to confidence, then input position.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = proposals[i];
    const auto& b = proposals[j];
    if (a.box.area() != b.box.area()) return a.box.area() > b.box.area();
    return a.confidence > b.confidence;
  });

  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(proposals[i].box, proposals[k].box) < cfg.iou_threshold;
    });
    if (clear) kept.push_back(i);
  }

  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t i, std::size_t j) {
    if (proposals[i].confidence != proposals[j].confidence) {
      return proposals[i].confidence > proposals[j].confidence;
    }
    return i < j;
  });
  if (kept.size() > static_cast<std::size_t>(cfg.max_proposals)) kept.resize(cfg.max_proposals);

  std::vector<ObjectProposal> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(proposals[i]);
  return out;
}

namespace {

// Places a span of length `len` centered at `center` inside [0, limit).
void place(double center, int len, int limit, int& start, int& size) {
  if (len >= limit) {
    start = 0;
    size = limit;
    return;
  }
  int s = static_cast<int>(std::lround(center - len / 2.0));
  s = std::clamp(s, 0, limit - len);
  start = s;
  size = len;
}

}  // namespace

BBox enlarge(const BBox& box, double factor, int image_width, int image_height) {
  if (!(factor >= 1.0)) throw ValidationError("enlarge factor must be >= 1");
  const int w = static_cast<int>(std::lround(factor * box.w));
  const int h = static_cast<int>(std::lround(factor * box.h));
  const double cx = box.x + box.w / 2.0;
  const double cy = box.y + box.h / 2.0;
  BBox out;
  place(cx, w, image_width, out.x, out.w);
  place(cy, h, image_height, out.y, out.h);
  return out;
}

}  // namespace salrank
