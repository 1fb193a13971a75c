#ifndef SALRANK_RETRIEVAL_HPP
#define SALRANK_RETRIEVAL_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "salrank/manifest.hpp"

namespace salrank {

struct RetrievalConfig {
  std::size_t k = 5;
  std::size_t k_semantic = 2;
  std::size_t k_scene = 3;

  void validate() const;
};

struct RetrievalItem {
  std::string id;
  std::span<const float> semantic;
  std::span<const float> scene;
};

double euclidean_distance(std::span<const float> a, std::span<const float> b);

/// The k_semantic nearest pool items by semantic feature, then the k_scene
/// nearest by scene descriptor among those not yet chosen. The query id is
/// never returned; distance ties go to the smaller id.
std::vector<std::string> retrieve_hybrid(const RetrievalItem& query, std::span<const RetrievalItem> pool,
                                         const RetrievalConfig& cfg);

/// Scene descriptors for every image of the dataset (grayscale image required).
std::vector<std::vector<float>> compute_scene_descriptors(const Dataset& dataset, int jobs = 1);

using RetrievalTable = std::map<std::string, std::vector<std::string>>;

/// Retrieval for every image against the rest of the dataset, in dataset order.
std::vector<std::vector<std::string>> retrieve_all(const Dataset& dataset,
                                                   const std::vector<std::vector<float>>& scene,
                                                   const RetrievalConfig& cfg, int jobs = 1);

/// One line per query: query id, then its neighbor ids, tab-separated.
void write_retrieval_table(const std::vector<std::string>& query_ids,
                           const std::vector<std::vector<std::string>>& neighbors, const std::string& path);
RetrievalTable read_retrieval_table(const std::string& path);

}  // namespace salrank

#endif  // SALRANK_RETRIEVAL_HPP
