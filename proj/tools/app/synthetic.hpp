#ifndef SALRANK_APP_SYNTHETIC_HPP
#define SALRANK_APP_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "salrank/feature_blob.hpp"
#include "salrank/pairgen.hpp"

namespace salrank::app {

/// Parameters of a generated dataset. Every proposal gets random features; a
/// fixed unit direction over the multi-scale feature defines its planted
/// latent saliency. The GT mask is the box with the highest latent, and each
/// pseudo-model map paints every box with logistic(latent) plus noise.
struct SyntheticConfig {
  std::size_t images = 20;
  std::size_t proposals = 5;
  // Extra small boxes nested in real ones (IOU >= 0.5), removed by filtering.
  std::size_t overlapping_extras = 1;
  int width = 96;
  int height = 96;
  std::uint32_t feature_dim = 32;
  std::size_t maps = 5;
  double noise = 0.1;
  std::size_t scene_classes = 4;
  double enlarge_factor = 1.5;
  std::uint64_t seed = 0;
};

struct SyntheticTruth {
  std::vector<std::string> image_ids;
  std::vector<std::vector<double>> latent;  // [image][proposal], excluding extras
  std::vector<std::string> salient_proposal;
  std::vector<float> direction;
};

/// Writes manifest.json, features.srf, images/, gt/, maps/, truth.tsv and a
/// matching config.json into `dir`. Byte-identical for a fixed config.
SyntheticTruth generate_synthetic_fixture(const SyntheticConfig& cfg, const std::string& dir);

/// Pairwise task over random objects whose order is a planted linear
/// functional of their multi-scale feature. Pairs closer than `min_gap` in
/// latent are not drawn.
struct LatentPairTask {
  FeatureStore features;
  std::vector<TrainingPair> train;
  std::vector<TrainingPair> holdout;
};

LatentPairTask make_latent_pair_task(std::size_t train_pairs, std::size_t holdout_pairs, std::uint32_t feature_dim,
                                     double latent_scale, double min_gap, std::uint64_t seed);

}  // namespace salrank::app

#endif  // SALRANK_APP_SYNTHETIC_HPP
