#include "salrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "salrank/errors.hpp"
#include "salrank/proposals.hpp"

namespace salrank {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_pair(const SaliencyMap& pred, const SaliencyMap& gt, const char* what) {
  if (!pred.same_shape(gt) || pred.size() != gt.size()) {
    throw ValidationError(std::string(what) + ": prediction is " + std::to_string(pred.width) + "x" +
                          std::to_string(pred.height) + ", GT is " + std::to_string(gt.width) + "x" +
                          std::to_string(gt.height));
  }
}

bool fg(float v) { return v > 0.5f; }

double mean_of(const SaliencyMap& m) {
  double s = 0.0;
  for (float v : m.data) s += v;
  return m.data.empty() ? 0.0 : s / static_cast<double>(m.data.size());
}

double adaptive_threshold(const SaliencyMap& pred) { return std::min(2.0 * mean_of(pred), 1.0); }

std::vector<bool> binarize(const SaliencyMap& pred, double t, bool inclusive) {
  std::vector<bool> out(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) out[i] = inclusive ? pred.data[i] >= t : pred.data[i] > t;
  return out;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion_of(const std::vector<bool>& bin, const SaliencyMap& gt) {
  Confusion c;
  for (std::size_t i = 0; i < bin.size(); ++i) {
    const bool g = fg(gt.data[i]);
    if (bin[i]) {
      ++(g ? c.tp : c.fp);
    } else {
      ++(g ? c.fn : c.tn);
    }
  }
  return c;
}

// Number of grid thresholds k / t (k = 0 .. t-1) that v strictly exceeds.
int thresholds_exceeded(float v, int t) {
  const double x = v;
  int c = static_cast<int>(std::clamp(std::ceil(x * t), 0.0, static_cast<double>(t)));
  while (c > 0 && !(x > static_cast<double>(c - 1) / t)) --c;
  while (c < t && x > static_cast<double>(c) / t) ++c;
  return c;
}

// Applies `at` to the confusion counts of each binarization and reduces by mode.
// The grid is evaluated from per-pixel exceedance histograms in one pass.
template <typename Fn>
double aggregate(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg, ThresholdMode mode,
                 Fn&& at) {
  if (mode == ThresholdMode::kAdaptive) return at(confusion_of(binarize(pred, adaptive_threshold(pred), true), gt));
  const int t = cfg.thresholds;
  std::vector<std::size_t> fg_hist(t + 1, 0), bg_hist(t + 1, 0);
  std::size_t fg_total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int c = thresholds_exceeded(pred.data[i], t);
    if (fg(gt.data[i])) {
      ++fg_hist[c];
      ++fg_total;
    } else {
      ++bg_hist[c];
    }
  }
  const std::size_t bg_total = pred.size() - fg_total;
  // Pixels with exceedance count > k are predicted foreground at threshold k.
  std::size_t fg_above = fg_total - fg_hist[0], bg_above = bg_total - bg_hist[0];
  double sum = 0.0, best = 0.0;
  for (int k = 0; k < t; ++k) {
    const Confusion c{fg_above, bg_above, fg_total - fg_above, bg_total - bg_above};
    const double v = at(c);
    sum += v;
    best = std::max(best, v);
    fg_above -= fg_hist[k + 1];
    bg_above -= bg_hist[k + 1];
  }
  return mode == ThresholdMode::kMax ? best : sum / t;
}

PrecisionRecall pr_of(const Confusion& c) {
  PrecisionRecall pr;
  const std::size_t pos = c.tp + c.fp, truth = c.tp + c.fn;
  pr.precision = pos == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(pos);
  pr.recall = truth == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(truth);
  return pr;
}

// Enhanced alignment from counts: a binary map against a binary GT only has
// four distinct (prediction, truth) pixel kinds.
double enhanced_alignment_of(const Confusion& c) {
  const std::size_t n = c.tp + c.fp + c.fn + c.tn;
  if (n == 0) return 0.0;
  const std::size_t gt_count = c.tp + c.fn, fm_count = c.tp + c.fp;
  if (gt_count == 0) return static_cast<double>(n - fm_count) / static_cast<double>(n);
  if (gt_count == n) return static_cast<double>(fm_count) / static_cast<double>(n);
  const double mu_fm = static_cast<double>(fm_count) / static_cast<double>(n);
  const double mu_gt = static_cast<double>(gt_count) / static_cast<double>(n);
  auto phi = [&](double f, double g) {
    const double a = f - mu_fm, b = g - mu_gt;
    const double align = 2.0 * a * b / (a * a + b * b + kEps);
    return (align + 1.0) * (align + 1.0) / 4.0;
  };
  const double sum = static_cast<double>(c.tp) * phi(1, 1) + static_cast<double>(c.fp) * phi(1, 0) +
                     static_cast<double>(c.fn) * phi(0, 1) + static_cast<double>(c.tn) * phi(0, 0);
  return sum / static_cast<double>(n);
}

// Region statistics for the structural similarity term.
double region_ssim(const SaliencyMap& pred, const SaliencyMap& gt, int x0, int y0, int x1, int y1) {
  const double n = static_cast<double>(x1 - x0) * (y1 - y0);
  if (n <= 0.0) return 0.0;
  double mx = 0.0, my = 0.0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      mx += pred.at(x, y);
      my += gt.at(x, y);
    }
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cxy = 0.0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double dx = pred.at(x, y) - mx;
      const double dy = gt.at(x, y) - my;
      vx += dx * dx;
      vy += dy * dy;
      cxy += dx * dy;
    }
  }
  vx /= (n - 1 + kEps);
  vy /= (n - 1 + kEps);
  cxy /= (n - 1 + kEps);
  const double a = 4.0 * mx * my * cxy;
  const double b = (mx * mx + my * my) * (vx + vy);
  if (a != 0.0) return a / (b + kEps);
  return b == 0.0 ? 1.0 : 0.0;
}

double s_region(const SaliencyMap& pred, const SaliencyMap& gt) {
  const int w = gt.width, h = gt.height;
  double total = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double g = gt.at(x, y);
      total += g;
      sx += g * (x + 1);
      sy += g * (y + 1);
    }
  }
  int cx, cy;
  if (total == 0.0) {
    cx = static_cast<int>(std::lround(w / 2.0));
    cy = static_cast<int>(std::lround(h / 2.0));
  } else {
    cx = static_cast<int>(std::lround(sx / total));
    cy = static_cast<int>(std::lround(sy / total));
  }
  const double area = static_cast<double>(w) * h;
  const double w1 = static_cast<double>(cx) * cy / area;
  const double w2 = static_cast<double>(w - cx) * cy / area;
  const double w3 = static_cast<double>(cx) * (h - cy) / area;
  const double w4 = 1.0 - w1 - w2 - w3;
  return w1 * region_ssim(pred, gt, 0, 0, cx, cy) + w2 * region_ssim(pred, gt, cx, 0, w, cy) +
         w3 * region_ssim(pred, gt, 0, cy, cx, h) + w4 * region_ssim(pred, gt, cx, cy, w, h);
}

// 2 mu / (mu^2 + 1 + sigma) over the selected pixels of `values`.
double object_score(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mu = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mu) * (v - mu);
  const double sigma = values.size() > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return 2.0 * mu / (mu * mu + 1.0 + sigma + kEps);
}

double s_object(const SaliencyMap& pred, const SaliencyMap& gt) {
  std::vector<double> fg_vals, bg_vals;
  std::size_t fg_count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (fg(gt.data[i])) {
      fg_vals.push_back(pred.data[i]);
      ++fg_count;
    } else {
      bg_vals.push_back(1.0 - pred.data[i]);
    }
  }
  const double u = static_cast<double>(fg_count) / static_cast<double>(pred.size());
  return u * object_score(fg_vals) + (1.0 - u) * object_score(bg_vals);
}

}  // namespace

void MetricConfig::validate() const {
  if (!(beta_sq > 0.0)) throw ValidationError("metrics.beta_sq must be positive");
  if (thresholds < 2) throw ValidationError("metrics.thresholds must be at least 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("metrics.alpha must lie in [0, 1]");
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw ValidationError("metrics.overlap_threshold must lie in [0, 1]");
  }
}

double mae(const SaliencyMap& pred, const SaliencyMap& gt) {
  check_pair(pred, gt, "mae");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::fabs(static_cast<double>(pred.data[i]) - gt.data[i]);
  return s / static_cast<double>(pred.size());
}

PrecisionRecall precision_recall(const SaliencyMap& pred, const SaliencyMap& gt, double threshold, bool inclusive) {
  check_pair(pred, gt, "precision_recall");
  return pr_of(confusion_of(binarize(pred, threshold, inclusive), gt));
}

double f_from_pr(double precision, double recall, double beta_sq) {
  const double den = beta_sq * precision + recall;
  return den <= 0.0 ? 0.0 : (1.0 + beta_sq) * precision * recall / den;
}

double f_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg, ThresholdMode mode) {
  cfg.validate();
  check_pair(pred, gt, "f_measure");
  return aggregate(pred, gt, cfg, mode, [&](const Confusion& c) {
    const auto pr = pr_of(c);
    return f_from_pr(pr.precision, pr.recall, cfg.beta_sq);
  });
}

double s_measure_object(const SaliencyMap& pred, const SaliencyMap& gt) {
  check_pair(pred, gt, "s_measure_object");
  return s_object(pred, gt);
}

double s_measure_region(const SaliencyMap& pred, const SaliencyMap& gt) {
  check_pair(pred, gt, "s_measure_region");
  return s_region(pred, gt);
}

double s_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(pred, gt, "s_measure");
  const double y = [&] {
    std::size_t n = 0;
    for (float v : gt.data) n += fg(v);
    return static_cast<double>(n) / static_cast<double>(gt.size());
  }();
  if (y == 0.0) return 1.0 - mean_of(pred);
  if (y == 1.0) return mean_of(pred);
  const SaliencyMap g = binarize_mask(gt);
  const double q = cfg.alpha * s_object(pred, g) + (1.0 - cfg.alpha) * s_region(pred, g);
  return std::clamp(q, 0.0, 1.0);
}

double enhanced_alignment(const std::vector<bool>& foreground, const SaliencyMap& gt) {
  if (foreground.size() != gt.size()) throw ValidationError("enhanced_alignment: size mismatch");
  return enhanced_alignment_of(confusion_of(foreground, gt));
}

double e_measure(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg, ThresholdMode mode) {
  cfg.validate();
  check_pair(pred, gt, "e_measure");
  return aggregate(pred, gt, cfg, mode, enhanced_alignment_of);
}

std::vector<BBox> gt_object_boxes(const SaliencyMap& gt) {
  const int w = gt.width, h = gt.height;
  std::vector<char> seen(gt.size(), 0);
  std::vector<BBox> boxes;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t k0 = static_cast<std::size_t>(y0) * w + x0;
      if (seen[k0] || !fg(gt.data[k0])) continue;
      int minx = x0, maxx = x0, miny = y0, maxy = y0;
      seen[k0] = 1;
      stack.push_back({x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int d = 0; d < 4; ++d) {
          if (nx[d] < 0 || ny[d] < 0 || nx[d] >= w || ny[d] >= h) continue;
          const std::size_t k = static_cast<std::size_t>(ny[d]) * w + nx[d];
          if (!seen[k] && fg(gt.data[k])) {
            seen[k] = 1;
            stack.push_back({nx[d], ny[d]});
          }
        }
      }
      boxes.push_back({minx, miny, maxx - minx + 1, maxy - miny + 1});
    }
  }
  return boxes;
}

LocalizationCounts match_boxes(std::span<const BBox> selected, std::span<const BBox> objects, double threshold) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    for (std::size_t j = 0; j < objects.size(); ++j) {
      const double v = iou(selected[i], objects[j]);
      if (v > threshold) cand.emplace_back(v, i, j);
    }
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<char> used_sel(selected.size(), 0), used_obj(objects.size(), 0);
  LocalizationCounts c{0, selected.size(), objects.size()};
  for (const auto& [v, i, j] : cand) {
    if (used_sel[i] || used_obj[j]) continue;
    used_sel[i] = used_obj[j] = 1;
    ++c.true_positives;
  }
  return c;
}

LocalizationPrf localization_prf(const std::vector<std::vector<BBox>>& selected, std::span<const SaliencyMap> gts,
                                 const MetricConfig& cfg) {
  cfg.validate();
  if (selected.size() != gts.size()) throw ValidationError("localization_prf: image count mismatch");
  std::size_t tp = 0, sel = 0, obj = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const auto objects = gt_object_boxes(gts[i]);
    const auto c = match_boxes(selected[i], objects, cfg.overlap_threshold);
    tp += c.true_positives;
    sel += c.selected;
    obj += c.objects;
  }
  LocalizationPrf r;
  r.precision = sel == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(sel);
  r.recall = obj == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(obj);
  r.f_measure = f_from_pr(r.precision, r.recall, cfg.beta_sq);
  return r;
}

ImageMetrics evaluate_map(const SaliencyMap& pred, const SaliencyMap& gt, const MetricConfig& cfg) {
  ImageMetrics m;
  m.mae = mae(pred, gt);
  m.max_f = f_measure(pred, gt, cfg, ThresholdMode::kMax);
  m.mean_f = f_measure(pred, gt, cfg, ThresholdMode::kMean);
  m.adp_f = f_measure(pred, gt, cfg, ThresholdMode::kAdaptive);
  m.s = s_measure(pred, gt, cfg);
  m.max_e = e_measure(pred, gt, cfg, ThresholdMode::kMax);
  m.mean_e = e_measure(pred, gt, cfg, ThresholdMode::kMean);
  m.adp_e = e_measure(pred, gt, cfg, ThresholdMode::kAdaptive);
  return m;
}

}  // namespace salrank
