#ifndef SALRANK_TYPES_HPP
#define SALRANK_TYPES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace salrank {

/// Axis-aligned pixel rectangle. (x, y) is the top-left corner.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  [[nodiscard]] long long area() const { return static_cast<long long>(w) * h; }
  [[nodiscard]] int right() const { return x + w; }
  [[nodiscard]] int bottom() const { return y + h; }
  [[nodiscard]] bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// True when the box has positive extent and lies inside a width x height image.
bool box_within(const BBox& box, int width, int height);

/// Row-major grid of intensities in [0,1]. Used for saliency maps, GT masks,
/// coarse masks and grayscale input images alike.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  SaliencyMap() = default;
  SaliencyMap(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] bool empty() const { return data.empty(); }
  [[nodiscard]] float at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  [[nodiscard]] bool same_shape(const SaliencyMap& o) const {
    return width == o.width && height == o.height;
  }

  friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;
};

using GrayImage = SaliencyMap;
using FeatureVector = std::vector<float>;

/// Binary {0,1} copy of a map, foreground where value > 127/255.
SaliencyMap binarize_mask(const SaliencyMap& map);

struct ObjectProposal {
  std::string id;
  BBox box;
  double confidence = 0.0;
  // Indices into the dataset feature blob: the box itself and its enlarged context.
  std::uint32_t feature_ref = 0;
  std::uint32_t enlarged_feature_ref = 0;
};

struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<ObjectProposal> proposals;
  // Paths are stored resolved (absolute or relative to the working directory).
  std::optional<std::string> image_path;
  std::optional<std::string> gt_path;
  std::vector<std::string> candidate_map_paths;
  std::optional<std::uint32_t> image_feature_ref;
  // GIST+HOG scene vector; empty until computed by the retrieval module.
  std::vector<float> scene_descriptor;
};

}  // namespace salrank

#endif  // SALRANK_TYPES_HPP
