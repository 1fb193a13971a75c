#include "config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "salrank/errors.hpp"

namespace salrank::app {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& dst, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: field '" + section + key + "' has the wrong type");
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ValidationError(std::string("config: section '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace

void PipelineConfig::validate() const {
  if (jobs < 1) throw ValidationError("config: jobs must be positive");
  if (!(enlarge_factor >= 1.0)) throw ValidationError("config: filter.enlarge_factor must be >= 1");
  if (out.empty()) throw ValidationError("config: out must be set");
  filter.validate();
  retrieval.validate();
  train.validate();
  fusion.validate();
  metrics.validate();
  if (pairs.psl5_epsilon < 0.0) throw ValidationError("config: pairs.psl5_epsilon must be non-negative");
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: document must be a JSON object");
  PipelineConfig c;
  read(j, "manifest", c.manifest, "");
  read(j, "out", c.out, "");
  read(j, "seed", c.seed, "");
  read(j, "jobs", c.jobs, "");
  read(j, "write_coarse_masks", c.write_coarse_masks, "");

  const auto& f = section(j, "filter");
  read(f, "iou_threshold", c.filter.iou_threshold, "filter.");
  read(f, "max_proposals", c.filter.max_proposals, "filter.");
  read(f, "enlarge_factor", c.enlarge_factor, "filter.");

  const auto& r = section(j, "retrieval");
  read(r, "k", c.retrieval.k, "retrieval.");
  read(r, "k_semantic", c.retrieval.k_semantic, "retrieval.");
  read(r, "k_scene", c.retrieval.k_scene, "retrieval.");

  read(section(j, "pairs"), "psl5_epsilon", c.pairs.psl5_epsilon, "pairs.");

  const auto& t = section(j, "train");
  read(t, "hidden", c.train.hidden, "train.");
  read(t, "margin", c.train.margin, "train.");
  std::string hinge = to_string(c.train.hinge);
  read(t, "hinge", hinge, "train.");
  c.train.hinge = parse_hinge_form(hinge);
  read(t, "learning_rate", c.train.learning_rate, "train.");
  read(t, "momentum", c.train.momentum, "train.");
  read(t, "batch_size", c.train.batch_size, "train.");
  read(t, "epochs", c.train.epochs, "train.");
  read(t, "init_scale", c.train.init_scale, "train.");
  read(t, "validation_fraction", c.train.validation_fraction, "train.");

  const auto& fu = section(j, "fusion");
  read(fu, "lambda", c.fusion.lambda, "fusion.");
  read(fu, "c", c.fusion.c, "fusion.");
  std::string norm = "max";
  read(fu, "normalization", norm, "fusion.");
  if (norm == "max") {
    c.fusion.normalization = FusionNormalization::kMax;
  } else if (norm == "none") {
    c.fusion.normalization = FusionNormalization::kNone;
  } else {
    throw ValidationError("config: fusion.normalization must be 'max' or 'none'");
  }

  const auto& m = section(j, "metrics");
  read(m, "beta_sq", c.metrics.beta_sq, "metrics.");
  read(m, "thresholds", c.metrics.thresholds, "metrics.");
  read(m, "alpha", c.metrics.alpha, "metrics.");
  read(m, "overlap_threshold", c.metrics.overlap_threshold, "metrics.");
  return c;
}

json config_to_json(const PipelineConfig& c) {
  return {
      {"manifest", c.manifest},
      {"out", c.out},
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"write_coarse_masks", c.write_coarse_masks},
      {"filter", {{"iou_threshold", c.filter.iou_threshold},
                  {"max_proposals", c.filter.max_proposals},
                  {"enlarge_factor", c.enlarge_factor}}},
      {"retrieval", {{"k", c.retrieval.k}, {"k_semantic", c.retrieval.k_semantic}, {"k_scene", c.retrieval.k_scene}}},
      {"pairs", {{"psl5_epsilon", c.pairs.psl5_epsilon}}},
      {"train", {{"hidden", c.train.hidden},
                 {"margin", c.train.margin},
                 {"hinge", to_string(c.train.hinge)},
                 {"learning_rate", c.train.learning_rate},
                 {"momentum", c.train.momentum},
                 {"batch_size", c.train.batch_size},
                 {"epochs", c.train.epochs},
                 {"init_scale", c.train.init_scale},
                 {"validation_fraction", c.train.validation_fraction}}},
      {"fusion", {{"lambda", c.fusion.lambda},
                  {"c", c.fusion.c},
                  {"normalization", c.fusion.normalization == FusionNormalization::kMax ? "max" : "none"}}},
      {"metrics", {{"beta_sq", c.metrics.beta_sq},
                   {"thresholds", c.metrics.thresholds},
                   {"alpha", c.metrics.alpha},
                   {"overlap_threshold", c.metrics.overlap_threshold}}},
  };
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed config: " + e.what());
  }
  PipelineConfig cfg = config_from_json(j);
  // Relative paths in a config file are relative to that file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(cfg.manifest);
  resolve(cfg.out);
  return cfg;
}

std::string config_hash(const PipelineConfig& cfg) {
  json j = config_to_json(cfg);
  // jobs and out never change artifact bytes.
  j.erase("jobs");
  j.erase("out");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace salrank::app
