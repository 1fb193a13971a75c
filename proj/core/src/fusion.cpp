#include "salrank/fusion.hpp"

#include <algorithm>

#include "salrank/errors.hpp"

namespace salrank {

void FusionConfig::validate() const {
  if (!(lambda >= 0.0)) throw ValidationError("fusion.lambda must be non-negative");
  if (!(c > 0.0)) throw ValidationError("fusion.c must be positive");
}

double confidence(const SaliencyMap& sal, const SaliencyMap& ic, const BBox& box, const FusionConfig& cfg) {
  cfg.validate();
  if (!sal.same_shape(ic)) throw ValidationError("confidence: saliency map and coarse mask differ in size");
  if (!box_within(box, sal.width, sal.height)) throw ValidationError("confidence: box outside the map");

  double local = 0.0;
  for (int y = box.y; y < box.bottom(); ++y) {
    for (int x = box.x; x < box.right(); ++x) {
      const double m = ic.at(x, y);
      if (m <= 0.0) throw ValidationError("confidence: box leaves the coarse-mask foreground");
      local += sal.at(x, y) / m;
    }
  }
  local /= static_cast<double>(box.area());

  double global = 0.0;
  for (std::size_t i = 0; i < sal.size(); ++i) {
    const double s = sal.data[i];
    const double m = ic.data[i];
    global += (s * m + cfg.c) / (s + m + cfg.c);
  }
  global /= static_cast<double>(sal.size());
  return local + cfg.lambda * global;
}

ConfMatrix confidence_matrix(std::span<const SaliencyMap> sals, const SaliencyMap& ic,
                             std::span<const BBox> boxes, const FusionConfig& cfg) {
  ConfMatrix conf;
  for (const auto& s : sals) {
    std::vector<double> row;
    for (const auto& b : boxes) row.push_back(confidence(s, ic, b, cfg));
    conf.push_back(std::move(row));
  }
  return conf;
}

SaliencyMap fuse(std::span<const SaliencyMap> sals, const ConfMatrix& conf, std::span<const BBox> boxes,
                 const FusionConfig& cfg) {
  if (sals.empty()) throw ValidationError("fuse: no candidate maps");
  const int w = sals.front().width;
  const int h = sals.front().height;
  if (conf.size() != sals.size()) throw ValidationError("fuse: confidence rows do not match the map count");
  for (const auto& s : sals) {
    if (s.width != w || s.height != h) throw ValidationError("fuse: candidate maps differ in size");
  }
  for (const auto& row : conf) {
    if (row.size() != boxes.size()) throw ValidationError("fuse: confidence columns do not match the box count");
  }

  std::vector<double> raw(static_cast<std::size_t>(w) * h, 0.0);
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    const BBox& b = boxes[j];
    if (!box_within(b, w, h)) throw ValidationError("fuse: box outside the map");
    for (std::size_t i = 0; i < sals.size(); ++i) {
      const double c = conf[i][j];
      for (int y = b.y; y < b.bottom(); ++y) {
        for (int x = b.x; x < b.right(); ++x) raw[static_cast<std::size_t>(y) * w + x] += c * sals[i].at(x, y);
      }
    }
  }

  const double peak = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  SaliencyMap out(w, h, 0.0f);
  const bool scale = cfg.normalization == FusionNormalization::kMax && peak > 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.data[k] = static_cast<float>(scale ? raw[k] / peak : raw[k]);
  }
  return out;
}

}  // namespace salrank
