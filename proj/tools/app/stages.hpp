#ifndef SALRANK_APP_STAGES_HPP
#define SALRANK_APP_STAGES_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"
#include "salrank/manifest.hpp"

namespace salrank::app {

/// Per-stage input overrides; unset fields default to the artifacts of the
/// producing stage inside the output directory.
struct StageInputs {
  std::optional<std::string> manifest;
  std::optional<std::string> retrieval;
  std::optional<std::string> pairs;
  std::optional<std::string> checkpoint;
  std::optional<std::string> rank;
  std::optional<std::string> final_dir;
};

class StageRunner {
 public:
  explicit StageRunner(PipelineConfig cfg, StageInputs inputs = {});

  void ingest();
  void retrieve();
  void pairs();
  void train();
  void rank();
  void fuse();
  // Returns 1 when some image could not be evaluated (the report is still written).
  int eval();
  int pipeline();

  [[nodiscard]] const PipelineConfig& config() const { return cfg_; }
  [[nodiscard]] std::filesystem::path out_path(const std::string& name) const { return out_ / name; }

 private:
  Dataset ingested() const;
  std::string input(const std::optional<std::string>& override_path, const std::string& artifact,
                    const char* producer) const;
  void record(const char* stage, const std::filesystem::path& artifact) const;

  PipelineConfig cfg_;
  StageInputs inputs_;
  std::filesystem::path out_;
  std::string hash_;
};

}  // namespace salrank::app

#endif  // SALRANK_APP_STAGES_HPP
