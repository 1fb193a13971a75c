#ifndef SALRANK_FUSION_HPP
#define SALRANK_FUSION_HPP

#include <span>
#include <vector>

#include "salrank/types.hpp"

namespace salrank {

enum class FusionNormalization { kMax, kNone };

struct FusionConfig {
  double lambda = 0.5;  // weight of the global agreement term
  double c = 1e-6;      // keeps the agreement ratio finite where both maps are zero
  FusionNormalization normalization = FusionNormalization::kMax;

  void validate() const;
};

/// Conf[model][box].
using ConfMatrix = std::vector<std::vector<double>>;

/// Local term: mean of sal/ic over the box. Global term: mean over the image
/// of (sal*ic + C) / (sal + ic + C). Returns local + lambda * global.
double confidence(const SaliencyMap& sal, const SaliencyMap& ic, const BBox& box, const FusionConfig& cfg = {});

ConfMatrix confidence_matrix(std::span<const SaliencyMap> sals, const SaliencyMap& ic,
                             std::span<const BBox> boxes, const FusionConfig& cfg = {});

/// sum_i sum_j Conf(i,j) * mask_j * sal_i, zero outside the boxes, divided by
/// its maximum (kMax) when that is positive.
SaliencyMap fuse(std::span<const SaliencyMap> sals, const ConfMatrix& conf, std::span<const BBox> boxes,
                 const FusionConfig& cfg = {});

}  // namespace salrank

#endif  // SALRANK_FUSION_HPP
