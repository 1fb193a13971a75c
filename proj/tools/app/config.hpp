#ifndef SALRANK_APP_CONFIG_HPP
#define SALRANK_APP_CONFIG_HPP

#include <cstdint>
#include <string>

#include "json.hpp"
#include "salrank/fusion.hpp"
#include "salrank/metrics.hpp"
#include "salrank/pairgen.hpp"
#include "salrank/proposals.hpp"
#include "salrank/ranker.hpp"
#include "salrank/retrieval.hpp"

namespace salrank::app {

struct PipelineConfig {
  std::string manifest;  // raw dataset manifest read by `ingest`
  std::string out = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  FilterConfig filter;
  double enlarge_factor = 1.5;
  RetrievalConfig retrieval;
  PairOptions pairs;
  TrainConfig train;
  FusionConfig fusion;
  MetricConfig metrics;
  bool write_coarse_masks = false;

  void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace salrank::app

#endif  // SALRANK_APP_CONFIG_HPP
