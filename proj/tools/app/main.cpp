#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "salrank/errors.hpp"
#include "stages.hpp"
#include "synthetic.hpp"

namespace {

using namespace salrank;
using namespace salrank::app;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  StageInputs inputs;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config, "pipeline config (JSON)");
  sub->add_option("--seed", a.seed, "override the config seed");
  sub->add_option("-j,--jobs", a.jobs, "worker threads");
  sub->add_option("-o,--out", a.out, "output directory");
  sub->add_option("--manifest", a.inputs.manifest, "input manifest (raw for ingest, ingested otherwise)");
}

PipelineConfig resolve(const CommonArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.jobs) cfg.jobs = *a.jobs;
  if (a.out) cfg.out = *a.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"salrank: proposal re-ranking and saliency map fusion"};
  app.require_subcommand(1);

  CommonArgs args;
  int rc = 0;
  std::string stage;
  for (const char* name : {"ingest", "retrieve", "pairs", "train", "rank", "fuse", "eval", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, args);
    const std::string n = name;
    if (n == "pairs" || n == "rank") sub->add_option("--retrieval", args.inputs.retrieval, "retrieval table");
    if (n == "train") sub->add_option("--pairs", args.inputs.pairs, "pair file");
    if (n == "rank") sub->add_option("--checkpoint", args.inputs.checkpoint, "ranker checkpoint");
    if (n == "fuse" || n == "eval") sub->add_option("--rank", args.inputs.rank, "rank table");
    if (n == "eval") sub->add_option("--final-dir", args.inputs.final_dir, "directory of fused maps");
    sub->callback([&stage, n] { stage = n; });
  }

  SyntheticConfig syn;
  std::string syn_dir = "synthetic";
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset with planted saliency");
  synth->add_option("dir", syn_dir, "output directory")->required();
  synth->add_option("--images", syn.images);
  synth->add_option("--proposals", syn.proposals);
  synth->add_option("--extras", syn.overlapping_extras, "overlapping boxes per image that filtering removes");
  synth->add_option("--width", syn.width);
  synth->add_option("--height", syn.height);
  synth->add_option("--feature-dim", syn.feature_dim);
  synth->add_option("--maps", syn.maps);
  synth->add_option("--noise", syn.noise);
  synth->add_option("--seed", syn.seed);
  synth->callback([&stage] { stage = "synth"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (stage == "synth") {
      generate_synthetic_fixture(syn, syn_dir);
      return 0;
    }
    StageRunner runner(resolve(args), args.inputs);
    if (stage == "ingest") runner.ingest();
    else if (stage == "retrieve") runner.retrieve();
    else if (stage == "pairs") runner.pairs();
    else if (stage == "train") runner.train();
    else if (stage == "rank") runner.rank();
    else if (stage == "fuse") runner.fuse();
    else if (stage == "eval") rc = runner.eval();
    else if (stage == "pipeline") rc = runner.pipeline();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
