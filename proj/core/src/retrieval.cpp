#include "salrank/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "salrank/descriptors.hpp"
#include "salrank/errors.hpp"
#include "salrank/parallel.hpp"

namespace salrank {

void RetrievalConfig::validate() const {
  if (k_semantic == 0 || k_scene == 0) throw ValidationError("retrieval: k_semantic and k_scene must be positive");
  if (k != k_semantic + k_scene) throw ValidationError("retrieval: k must equal k_semantic + k_scene");
}

double euclidean_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw ValidationError("distance between vectors of dims " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

namespace {

std::vector<std::size_t> ranked(const RetrievalItem& query, std::span<const RetrievalItem> pool,
                                bool semantic) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].id == query.id) continue;
    d.emplace_back(semantic ? euclidean_distance(query.semantic, pool[i].semantic)
                            : euclidean_distance(query.scene, pool[i].scene),
                   i);
  }
  std::sort(d.begin(), d.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return pool[a.second].id < pool[b.second].id;
  });
  std::vector<std::size_t> out;
  out.reserve(d.size());
  for (const auto& e : d) out.push_back(e.second);
  return out;
}

}  // namespace

std::vector<std::string> retrieve_hybrid(const RetrievalItem& query, std::span<const RetrievalItem> pool,
                                         const RetrievalConfig& cfg) {
  cfg.validate();
  std::vector<std::string> out;
  std::set<std::string> taken;
  for (std::size_t i : ranked(query, pool, true)) {
    if (out.size() == cfg.k_semantic) break;
    if (taken.insert(pool[i].id).second) out.push_back(pool[i].id);
  }
  std::size_t scene_taken = 0;
  for (std::size_t i : ranked(query, pool, false)) {
    if (scene_taken == cfg.k_scene) break;
    if (taken.insert(pool[i].id).second) {
      out.push_back(pool[i].id);
      ++scene_taken;
    }
  }
  return out;
}

std::vector<std::vector<float>> compute_scene_descriptors(const Dataset& dataset, int jobs) {
  std::vector<std::vector<float>> out(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    const auto& r = dataset[i];
    out[i] = r.scene_descriptor.empty() ? scene_descriptor(dataset.load_image(i)) : r.scene_descriptor;
  });
  return out;
}

std::vector<std::vector<std::string>> retrieve_all(const Dataset& dataset,
                                                   const std::vector<std::vector<float>>& scene,
                                                   const RetrievalConfig& cfg, int jobs) {
  cfg.validate();
  const auto& features = dataset.features();
  std::vector<RetrievalItem> items;
  items.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset[i];
    if (!r.image_feature_ref) throw ValidationError("image '" + r.id + "' has no image_feature for retrieval");
    items.push_back({r.id, features[*r.image_feature_ref], scene.at(i)});
  }
  std::vector<std::vector<std::string>> out(dataset.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) { out[i] = retrieve_hybrid(items[i], items, cfg); });
  return out;
}

void write_retrieval_table(const std::vector<std::string>& query_ids,
                           const std::vector<std::vector<std::string>>& neighbors, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write retrieval table " + path);
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    out << query_ids[i];
    for (const auto& n : neighbors[i]) out << '\t' << n;
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

RetrievalTable read_retrieval_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open retrieval table " + path);
  RetrievalTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) cols.push_back(c);
    const std::string query = cols.front();
    if (!table.emplace(query, std::vector<std::string>(cols.begin() + 1, cols.end())).second) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate query id '" + query + "'");
    }
  }
  return table;
}

}  // namespace salrank
