#ifndef SALRANK_METRICS_HPP
#define SALRANK_METRICS_HPP

#include <span>
#include <vector>

#include "salrank/types.hpp"

namespace salrank {

struct MetricConfig {
  double beta_sq = 0.3;
  int thresholds = 256;
  double alpha = 0.5;              // S-measure object/region balance
  double overlap_threshold = 0.5;  // box IOU needed for a localization hit

  void validate() const;
};

enum class ThresholdMode { kAdaptive, kMean, kMax };

double mae(const SaliencyMap& pred, const SaliencyMap& gt);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Binarized at `pred >= threshold` (inclusive) or `pred > threshold`.
PrecisionRecall precision_recall(const SaliencyMap& pred, const SaliencyMap& gt, double threshold, bool inclusive);

/// (1 + b2) P R / (b2 P + R); 0 when the denominator vanishes.
double f_from_pr(double precision, double recall, double beta_sq);

/// Adaptive: threshold min(2 * mean(pred), 1), inclusive. Mean / max: over the
/// grid pred > k / thresholds, k = 0 .. thresholds - 1.
double f_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg, ThresholdMode mode);

double s_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg = {});
// The two structural terms, for GT with both foreground and background.
double s_measure_object(const SaliencyMap& pred, const SaliencyMap& gt);
double s_measure_region(const SaliencyMap& pred, const SaliencyMap& gt);

/// Enhanced alignment of a binary foreground map against the GT, averaged
/// over pixels.
double enhanced_alignment(const std::vector<bool>& foreground, const SaliencyMap& gt);

double e_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg, ThresholdMode mode);

/// Tight bounding rectangles of the 4-connected foreground components, in
/// raster order of their first pixel.
std::vector<BBox> gt_object_boxes(const SaliencyMap& gt);

struct LocalizationCounts {
  std::size_t true_positives = 0;
  std::size_t selected = 0;
  std::size_t objects = 0;
};

/// Greedy best-IOU-first one-to-one matching; a hit needs IOU > threshold.
LocalizationCounts match_boxes(std::span<const BBox> selected, std::span<const BBox> objects, double threshold);

struct LocalizationPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Counts pooled over all images, F with cfg.beta_sq.
LocalizationPrf localization_prf(const std::vector<std::vector<BBox>>& selected, std::span<const SaliencyMap> gts,
                                 const MetricConfig& cfg = {});

struct ImageMetrics {
  double mae = 0;
  double max_f = 0, mean_f = 0, adp_f = 0;
  double s = 0;
  double max_e = 0, mean_e = 0, adp_e = 0;
};

ImageMetrics evaluate_map(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg = {});

}  // namespace salrank

#endif  // SALRANK_METRICS_HPP
