#include "salrank/types.hpp"

namespace salrank {

bool box_within(const BBox& box, int width, int height) {
  return box.w >= 1 && box.h >= 1 && box.x >= 0 && box.y >= 0 && box.right() <= width &&
         box.bottom() <= height;
}

SaliencyMap binarize_mask(const SaliencyMap& map) {
  SaliencyMap out(map.width, map.height);
  constexpr float kCut = 127.0f / 255.0f;
  for (std::size_t i = 0; i < map.data.size(); ++i) out.data[i] = map.data[i] > kCut ? 1.0f : 0.0f;
  return out;
}

}  // namespace salrank
