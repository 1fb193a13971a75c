#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "salrank/errors.hpp"
#include "salrank/manifest.hpp"
#include "salrank/pgm.hpp"
#include "salrank/proposals.hpp"
#include "salrank/rng.hpp"

namespace salrank::app {

namespace fs = std::filesystem;

namespace {

std::vector<float> unit_direction(std::size_t n, Rng& rng) {
  std::vector<float> u(n);
  double ss = 0.0;
  for (auto& v : u) {
    v = static_cast<float>(rng.normal());
    ss += static_cast<double>(v) * v;
  }
  for (auto& v : u) v = static_cast<float>(v / std::sqrt(ss));
  return u;
}

double project(const std::vector<float>& u, std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(u[i]) * a[i];
  for (std::size_t i = 0; i < b.size(); ++i) s += static_cast<double>(u[a.size() + i]) * b[i];
  return s;
}

std::string padded(const char* prefix, std::size_t i, int width) {
  std::ostringstream os;
  os << prefix << std::setw(width) << std::setfill('0') << i;
  return os.str();
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SyntheticTruth generate_synthetic_fixture(const SyntheticConfig& cfg, const std::string& dir) {
  if (cfg.images == 0 || cfg.proposals == 0 || cfg.feature_dim == 0 || cfg.scene_classes == 0) {
    throw ValidationError("synthetic: images, proposals, feature_dim and scene_classes must be positive");
  }
  if (cfg.noise < 0.0) throw ValidationError("synthetic: noise must be non-negative");
  const std::size_t gx = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.proposals))));
  const std::size_t gy = (cfg.proposals + gx - 1) / gx;
  const int cell_w = cfg.width / static_cast<int>(gx);
  const int cell_h = cfg.height / static_cast<int>(gy);
  if (cell_w < 8 || cell_h < 8) throw ValidationError("synthetic: image too small for the proposal count");

  const fs::path root(dir);
  for (const char* sub : {"images", "gt", "maps"}) fs::create_directories(root / sub);

  Rng rng(cfg.seed);
  const std::size_t d = cfg.feature_dim;
  SyntheticTruth truth;
  truth.direction = unit_direction(2 * d, rng);

  std::vector<std::vector<float>> prototypes;
  std::vector<double> orientations;
  for (std::size_t c = 0; c < cfg.scene_classes; ++c) {
    std::vector<float> p(d);
    for (auto& v : p) v = static_cast<float>(rng.normal());
    prototypes.push_back(std::move(p));
    orientations.push_back(std::numbers::pi * static_cast<double>(c) / static_cast<double>(cfg.scene_classes));
  }

  FeatureStore store(cfg.feature_dim);
  std::vector<ImageRecord> records;
  const int id_width = cfg.images > 1000 ? 5 : 3;

  for (std::size_t i = 0; i < cfg.images; ++i) {
    ImageRecord r;
    r.id = padded("img", i, id_width);
    r.width = cfg.width;
    r.height = cfg.height;
    const std::size_t cls = rng.below(cfg.scene_classes);

    std::vector<float> semantic(d);
    for (std::size_t k = 0; k < d; ++k) semantic[k] = prototypes[cls][k] + static_cast<float>(0.3 * rng.normal());
    r.image_feature_ref = store.append(semantic);

    std::vector<std::size_t> cells(gx * gy);
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
    rng.shuffle(cells);
    cells.resize(cfg.proposals);
    std::sort(cells.begin(), cells.end());

    std::vector<double> latent;
    for (std::size_t p = 0; p < cfg.proposals; ++p) {
      const int cx = static_cast<int>(cells[p] % gx) * cell_w;
      const int cy = static_cast<int>(cells[p] / gx) * cell_h;
      const int bw = cell_w / 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cell_w - cell_w / 2 - 1)));
      const int bh = cell_h / 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cell_h - cell_h / 2 - 1)));
      const int ox = cx + static_cast<int>(rng.below(static_cast<std::uint64_t>(cell_w - bw)));
      const int oy = cy + static_cast<int>(rng.below(static_cast<std::uint64_t>(cell_h - bh)));
      ObjectProposal prop;
      prop.id = padded("p", p, 2);
      prop.box = {ox, oy, bw, bh};
      prop.confidence = std::round(rng.uniform(0.5, 1.0) * 1000.0) / 1000.0;

      std::vector<float> local(d), context(d);
      for (auto& v : local) v = static_cast<float>(rng.normal());
      for (std::size_t k = 0; k < d; ++k) context[k] = static_cast<float>(0.6 * local[k] + 0.8 * rng.normal());
      prop.feature_ref = store.append(local);
      prop.enlarged_feature_ref = store.append(context);
      latent.push_back(project(truth.direction, local, context));
      r.proposals.push_back(std::move(prop));
    }

    for (std::size_t e = 0; e < cfg.overlapping_extras; ++e) {
      const auto& host = r.proposals[rng.below(cfg.proposals)];
      ObjectProposal extra;
      extra.id = padded("x", e, 2);
      const int w = std::max(1, static_cast<int>(std::lround(host.box.w * 0.85)));
      const int h = std::max(1, static_cast<int>(std::lround(host.box.h * 0.85)));
      extra.box = {host.box.x + (host.box.w - w) / 2, host.box.y + (host.box.h - h) / 2, w, h};
      extra.confidence = std::round(rng.uniform(0.0, 0.5) * 1000.0) / 1000.0;
      std::vector<float> v(d);
      for (auto& x : v) x = static_cast<float>(rng.normal());
      extra.feature_ref = store.append(v);
      for (auto& x : v) x = static_cast<float>(rng.normal());
      extra.enlarged_feature_ref = store.append(v);
      r.proposals.push_back(std::move(extra));
    }

    const std::size_t top = static_cast<std::size_t>(std::max_element(latent.begin(), latent.end()) - latent.begin());

    SaliencyMap gt(cfg.width, cfg.height, 0.0f);
    const BBox& gbox = r.proposals[top].box;
    for (int y = gbox.y; y < gbox.bottom(); ++y) {
      for (int x = gbox.x; x < gbox.right(); ++x) gt.at(x, y) = 1.0f;
    }
    const std::string gt_path = (root / "gt" / (r.id + ".pgm")).string();
    write_map(gt, gt_path);
    r.gt_path = gt_path;

    // Map levels follow the latent rank, spaced well above the 8-bit step so
    // that noise-free maps order the boxes exactly as the latent does.
    std::vector<double> rank_level(cfg.proposals, 1.0);
    for (std::size_t p = 0; p < cfg.proposals && cfg.proposals > 1; ++p) {
      const auto below = std::count_if(latent.begin(), latent.end(), [&](double v) { return v < latent[p]; });
      rank_level[p] = 0.1 + 0.9 * static_cast<double>(below) / static_cast<double>(cfg.proposals - 1);
    }

    for (std::size_t m = 0; m < cfg.maps; ++m) {
      SaliencyMap map(cfg.width, cfg.height, 0.0f);
      for (std::size_t p = 0; p < cfg.proposals; ++p) {
        const BBox& b = r.proposals[p].box;
        const double level = rank_level[p] + cfg.noise * rng.normal();
        for (int y = b.y; y < b.bottom(); ++y) {
          for (int x = b.x; x < b.right(); ++x) map.at(x, y) = static_cast<float>(level);
        }
      }
      if (cfg.noise > 0.0) {
        for (auto& v : map.data) v = static_cast<float>(v + cfg.noise * rng.normal());
      }
      for (auto& v : map.data) v = std::clamp(v, 0.0f, 1.0f);
      const std::string path = (root / "maps" / (r.id + "_m" + std::to_string(m) + ".pgm")).string();
      write_map(map, path);
      r.candidate_map_paths.push_back(path);
    }

    GrayImage img(cfg.width, cfg.height);
    const double theta = orientations[cls];
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        const double phase = 2.0 * std::numbers::pi * (x * std::cos(theta) + y * std::sin(theta)) / 12.0;
        img.at(x, y) = static_cast<float>(0.45 + 0.2 * std::sin(phase) + 0.05 * rng.normal());
      }
    }
    for (std::size_t p = 0; p < cfg.proposals; ++p) {
      const BBox& b = r.proposals[p].box;
      const float lift = static_cast<float>(0.3 * logistic(latent[p]));
      for (int y = b.y; y < b.bottom(); ++y) {
        for (int x = b.x; x < b.right(); ++x) img.at(x, y) += lift;
      }
    }
    for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
    const std::string img_path = (root / "images" / (r.id + ".pgm")).string();
    write_map(img, img_path);
    r.image_path = img_path;

    truth.image_ids.push_back(r.id);
    truth.salient_proposal.push_back(r.proposals[top].id);
    truth.latent.push_back(std::move(latent));
    records.push_back(std::move(r));
  }

  const std::string blob = (root / "features.srf").string();
  write_feature_blob(store, blob);
  write_manifest(Dataset(std::move(records), cfg.feature_dim, blob), (root / "manifest.json").string());

  std::ofstream t(root / "truth.tsv", std::ios::trunc);
  if (!t) throw IoError("cannot write " + (root / "truth.tsv").string());
  t << "image\tsalient\tlatent\n";
  t << std::setprecision(9);
  for (std::size_t i = 0; i < truth.image_ids.size(); ++i) {
    t << truth.image_ids[i] << '\t' << truth.salient_proposal[i];
    for (double v : truth.latent[i]) t << '\t' << v;
    t << '\n';
  }

  PipelineConfig pc;
  pc.manifest = "manifest.json";
  pc.out = "out";
  pc.seed = cfg.seed;
  pc.enlarge_factor = cfg.enlarge_factor;
  pc.train.hidden = {64, 32};
  pc.train.epochs = 8;
  pc.train.learning_rate = 1e-3;
  std::ofstream c(root / "config.json", std::ios::trunc);
  if (!c) throw IoError("cannot write " + (root / "config.json").string());
  c << config_to_json(pc).dump(2) << '\n';
  return truth;
}

LatentPairTask make_latent_pair_task(std::size_t train_pairs, std::size_t holdout_pairs, std::uint32_t feature_dim,
                                     double latent_scale, double min_gap, std::uint64_t seed) {
  Rng rng(seed);
  LatentPairTask task;
  task.features = FeatureStore(feature_dim);
  const std::vector<float> u = unit_direction(2 * std::size_t{feature_dim}, rng);
  const std::size_t objects = std::max<std::size_t>(64, (train_pairs + holdout_pairs) / 4);
  std::vector<FeatureRef> refs;
  std::vector<double> latent;
  std::vector<float> a(feature_dim), b(feature_dim);
  for (std::size_t o = 0; o < objects; ++o) {
    for (auto& v : a) v = static_cast<float>(rng.normal());
    for (auto& v : b) v = static_cast<float>(rng.normal());
    FeatureRef r{task.features.append(a), task.features.append(b)};
    refs.push_back(r);
    latent.push_back(latent_scale * project(u, a, b));
  }
  // Train and holdout use disjoint halves of the objects.
  const std::size_t half = objects / 2;
  auto draw = [&](std::size_t lo, std::size_t hi, std::size_t n, std::vector<TrainingPair>& out) {
    while (out.size() < n) {
      const std::size_t i = lo + rng.below(hi - lo);
      const std::size_t j = lo + rng.below(hi - lo);
      if (i == j || std::fabs(latent[i] - latent[j]) < min_gap) continue;
      out.push_back({refs[i], refs[j], latent[i] > latent[j] ? 1 : -1, provenance::kIntra});
    }
  };
  draw(0, half, train_pairs, task.train);
  draw(half, objects, holdout_pairs, task.holdout);
  return task;
}

}  // namespace salrank::app
