#include "stages.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "salrank/checkpoint.hpp"
#include "salrank/errors.hpp"
#include "salrank/fusion.hpp"
#include "salrank/localization.hpp"
#include "salrank/metrics.hpp"
#include "salrank/pairgen.hpp"
#include "salrank/parallel.hpp"
#include "salrank/pgm.hpp"
#include "salrank/proposals.hpp"
#include "salrank/ranker.hpp"
#include "salrank/retrieval.hpp"

namespace salrank::app {

namespace fs = std::filesystem;

namespace {

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string num_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

struct RankRow {
  std::string proposal;
  std::size_t selected = 0;  // 1-based rank among the selected boxes, 0 if not selected
  BBox box;
};

using RankTable = std::map<std::string, std::vector<RankRow>>;

RankTable read_rank_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  RankTable table;
  std::string line;
  std::getline(in, line);  // header
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string image, proposal;
    double branch = 0;
    long score = 0;
    std::size_t q = 0;
    RankRow row;
    if (!(ls >> image >> proposal >> branch >> score >> q >> row.selected >> row.box.x >> row.box.y >> row.box.w >>
          row.box.h)) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed rank row");
    }
    row.proposal = proposal;
    table[image].push_back(row);
  }
  return table;
}

std::vector<BBox> selected_boxes(const std::vector<RankRow>& rows) {
  std::vector<const RankRow*> sel;
  for (const auto& r : rows) {
    if (r.selected > 0) sel.push_back(&r);
  }
  std::sort(sel.begin(), sel.end(), [](const RankRow* a, const RankRow* b) { return a->selected < b->selected; });
  std::vector<BBox> boxes;
  for (const auto* r : sel) boxes.push_back(r->box);
  return boxes;
}

std::vector<const ImageRecord*> neighbors_of(const Dataset& ds, const RetrievalTable& table, const std::string& id,
                                             const std::string& path) {
  const auto it = table.find(id);
  if (it == table.end()) throw ValidationError(path + ": no retrieval entry for image '" + id + "'");
  std::vector<const ImageRecord*> out;
  for (const auto& n : it->second) {
    const auto idx = ds.find(n);
    if (!idx) throw ValidationError(path + ": retrieved image '" + n + "' is not in the manifest");
    out.push_back(&ds[*idx]);
  }
  return out;
}

}  // namespace

StageRunner::StageRunner(PipelineConfig cfg, StageInputs inputs)
    : cfg_(std::move(cfg)), inputs_(std::move(inputs)), out_(cfg_.out), hash_(config_hash(cfg_)) {
  cfg_.validate();
  cfg_.train.seed = cfg_.seed;
  std::error_code ec;
  fs::create_directories(out_, ec);
  if (ec) throw IoError("cannot create output directory " + out_.string() + ": " + ec.message());
}

std::string StageRunner::input(const std::optional<std::string>& override_path, const std::string& artifact,
                               const char* producer) const {
  if (override_path) {
    if (!fs::exists(*override_path)) throw IoError("input not found: " + *override_path);
    return *override_path;
  }
  const fs::path p = out_ / artifact;
  if (!fs::exists(p)) {
    throw IoError("missing " + p.string() + "; run the '" + producer + "' stage first");
  }
  return p.string();
}

void StageRunner::record(const char* stage, const fs::path& artifact) const {
  std::ofstream log(out_ / "run.log", std::ios::app);
  if (!log) throw IoError("cannot append to " + (out_ / "run.log").string());
  log << "stage=" << stage << " config_hash=" << hash_ << " seed=" << cfg_.seed
      << " artifact=" << artifact.filename().string() << '\n';
}

Dataset StageRunner::ingested() const { return load_manifest(input(inputs_.manifest, "ingested.json", "ingest")); }

void StageRunner::ingest() {
  const std::string src = inputs_.manifest.value_or(cfg_.manifest);
  if (src.empty()) throw ValidationError("ingest: no manifest given (config 'manifest' or --manifest)");
  const Dataset raw = load_manifest(src);

  std::vector<ImageRecord> kept;
  kept.reserve(raw.size());
  const fs::path tsv_path = out_ / "proposals.tsv";
  auto tsv = open_out(tsv_path);
  tsv << "image\tproposal\tconfidence\tx\ty\tw\th\tex\tey\tew\teh\n";
  for (const auto& rec : raw.images()) {
    ImageRecord r = rec;
    r.proposals = filter_proposals(rec.proposals, cfg_.filter);
    for (const auto& p : r.proposals) {
      const BBox e = enlarge(p.box, cfg_.enlarge_factor, r.width, r.height);
      tsv << r.id << '\t' << p.id << '\t' << num_g(p.confidence) << '\t' << p.box.x << '\t' << p.box.y << '\t'
          << p.box.w << '\t' << p.box.h << '\t' << e.x << '\t' << e.y << '\t' << e.w << '\t' << e.h << '\n';
    }
    kept.push_back(std::move(r));
  }
  tsv.close();
  const fs::path manifest_path = out_ / "ingested.json";
  write_manifest(raw.with_images(std::move(kept)), manifest_path.string());
  record("ingest", manifest_path);
  record("ingest", tsv_path);
}

void StageRunner::retrieve() {
  const Dataset ds = ingested();
  const auto scene = compute_scene_descriptors(ds, cfg_.jobs);
  const auto neighbors = retrieve_all(ds, scene, cfg_.retrieval, cfg_.jobs);
  std::vector<std::string> ids;
  for (const auto& r : ds.images()) ids.push_back(r.id);
  const fs::path p = out_ / "retrieval.tsv";
  write_retrieval_table(ids, neighbors, p.string());
  record("retrieve", p);
}

void StageRunner::pairs() {
  const Dataset ds = ingested();
  const std::string rpath = input(inputs_.retrieval, "retrieval.tsv", "retrieve");
  const RetrievalTable table = read_retrieval_table(rpath);

  std::vector<LabeledImage> labeled(ds.size());
  parallel_for(ds.size(), cfg_.jobs, [&](std::size_t i) {
    const auto maps = ds.load_candidate_maps(i);
    if (ds[i].gt_path) {
      const SaliencyMap gt = ds.load_gt(i);
      labeled[i] = label_image(ds[i], &gt, maps);
    } else {
      labeled[i] = label_image(ds[i], nullptr, maps);
    }
  });

  std::vector<TrainingPair> all;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<const LabeledImage*> retrieved;
    for (const auto* rec : neighbors_of(ds, table, ds[i].id, rpath)) {
      retrieved.push_back(&labeled[*ds.find(rec->id)]);
    }
    auto p = enumerate_pairs(labeled[i], retrieved, cfg_.pairs);
    all.insert(all.end(), p.begin(), p.end());
  }
  const fs::path pp = out_ / "pairs.srp";
  write_pair_file(all, pp.string());
  const fs::path sp = out_ / "pairs_summary.txt";
  auto s = open_out(sp);
  s << format_pair_summary(summarize_pairs(all));
  s.close();
  record("pairs", pp);
  record("pairs", sp);
}

void StageRunner::train() {
  const Dataset ds = ingested();
  const auto pairs = read_pair_file(input(inputs_.pairs, "pairs.srp", "pairs"));
  const FeatureStore& features = ds.features();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    for (std::uint32_t ref : {p.first.local, p.first.enlarged, p.second.local, p.second.enlarged}) {
      if (ref >= features.count()) {
        throw ValidationError("pair " + std::to_string(k) + " references feature " + std::to_string(ref) +
                              " beyond the blob (" + std::to_string(features.count()) + " vectors)");
      }
    }
  }

  const fs::path log_path = out_ / "train_log.tsv";
  auto log = open_out(log_path);
  log << "epoch\ttrain_loss\tval_loss\tval_acc\n";
  const TrainResult result = salrank::train(features, pairs, cfg_.train, [&](const EpochStats& e) {
    log << e.epoch << '\t' << num(e.train_loss) << '\t' << num(e.validation_loss) << '\t'
        << num(e.validation_accuracy) << '\n';
  });
  log.close();
  const fs::path ck = out_ / "ranker.srm";
  save_checkpoint(to_checkpoint(result.model, cfg_.seed, static_cast<std::uint32_t>(result.best_epoch),
                                result.best_loss),
                  ck.string());
  record("train", log_path);
  record("train", ck);
}

void StageRunner::rank() {
  const Dataset ds = ingested();
  const std::string rpath = input(inputs_.retrieval, "retrieval.tsv", "retrieve");
  const RetrievalTable table = read_retrieval_table(rpath);
  const RankerModel model = from_checkpoint(load_checkpoint(input(inputs_.checkpoint, "ranker.srm", "train")));
  if (model.input_dim() != 2 * std::size_t{ds.feature_dim()}) {
    throw ValidationError("checkpoint input dim " + std::to_string(model.input_dim()) +
                          " does not match 2 x feature_dim " + std::to_string(ds.feature_dim()));
  }
  const FeatureStore& features = ds.features();

  std::vector<ScoreTable> scores(ds.size());
  std::vector<std::vector<std::size_t>> picks(ds.size());
  parallel_for(ds.size(), cfg_.jobs, [&](std::size_t i) {
    const auto retrieved = neighbors_of(ds, table, ds[i].id, rpath);
    scores[i] = score_all(model, features, ds[i], retrieved);
    if (!scores[i].empty()) picks[i] = top_q(scores[i], select_q(scores[i]));
  });

  const fs::path rp = out_ / "rank.tsv";
  auto out = open_out(rp);
  out << "image\tproposal\tbranch\tscore\tq\tselected\tx\ty\tw\th\n";
  if (cfg_.write_coarse_masks) fs::create_directories(out_ / "coarse");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& rec = ds[i];
    std::vector<std::size_t> rank_of(rec.proposals.size(), 0);
    for (std::size_t r = 0; r < picks[i].size(); ++r) rank_of[picks[i][r]] = r + 1;
    for (const auto& e : scores[i].entries) {
      const BBox& b = rec.proposals[e.index].box;
      out << rec.id << '\t' << e.proposal_id << '\t' << num_g(e.branch_output) << '\t' << e.score << '\t'
          << picks[i].size() << '\t' << rank_of[e.index] << '\t' << b.x << '\t' << b.y << '\t' << b.w << '\t'
          << b.h << '\n';
    }
    if (cfg_.write_coarse_masks) {
      std::vector<BBox> boxes;
      for (std::size_t k : picks[i]) boxes.push_back(rec.proposals[k].box);
      const fs::path mp = out_ / "coarse" / (rec.id + ".pgm");
      write_map(build_coarse_mask(rec.width, rec.height, boxes), mp.string());
    }
  }
  out.close();
  record("rank", rp);
}

void StageRunner::fuse() {
  const Dataset ds = ingested();
  const RankTable ranks = read_rank_table(input(inputs_.rank, "rank.tsv", "rank"));
  const fs::path final_dir = out_ / "final";
  fs::create_directories(final_dir);

  std::vector<ConfMatrix> conf(ds.size());
  parallel_for(ds.size(), cfg_.jobs, [&](std::size_t i) {
    const auto& rec = ds[i];
    std::vector<BBox> boxes;
    if (const auto it = ranks.find(rec.id); it != ranks.end()) boxes = selected_boxes(it->second);
    const auto sals = ds.load_candidate_maps(i);
    const SaliencyMap ic = build_coarse_mask(rec.width, rec.height, boxes);
    conf[i] = confidence_matrix(sals, ic, boxes, cfg_.fusion);
    write_map(salrank::fuse(sals, conf[i], boxes, cfg_.fusion), (final_dir / (rec.id + ".pgm")).string());
  });

  const fs::path cp = out_ / "confidence.txt";
  auto out = open_out(cp);
  out << "image\tmodel\tbox\tconf\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t m = 0; m < conf[i].size(); ++m) {
      for (std::size_t b = 0; b < conf[i][m].size(); ++b) {
        out << ds[i].id << '\t' << m << '\t' << b << '\t' << num_g(conf[i][m][b]) << '\n';
      }
    }
  }
  out.close();
  record("fuse", final_dir);
  record("fuse", cp);
}

int StageRunner::eval() {
  const Dataset ds = ingested();
  fs::path final_dir = out_ / "final";
  if (inputs_.final_dir) {
    final_dir = *inputs_.final_dir;
  } else if (!fs::exists(final_dir)) {
    throw IoError("missing " + final_dir.string() + "; run the 'fuse' stage first");
  }
  std::optional<RankTable> ranks;
  if (inputs_.rank || fs::exists(out_ / "rank.tsv")) ranks = read_rank_table(input(inputs_.rank, "rank.tsv", "rank"));

  std::vector<std::optional<ImageMetrics>> per(ds.size());
  std::vector<std::string> errors(ds.size());
  std::vector<SaliencyMap> gts(ds.size());
  parallel_for(ds.size(), cfg_.jobs, [&](std::size_t i) {
    if (!ds[i].gt_path) {
      errors[i] = "no ground truth";
      return;
    }
    try {
      gts[i] = ds.load_gt(i);
      const SaliencyMap pred = read_map((final_dir / (ds[i].id + ".pgm")).string());
      if (!pred.same_shape(gts[i])) throw ValidationError("prediction and GT sizes differ");
      per[i] = evaluate_map(pred, gts[i], cfg_.metrics);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ImageMetrics mean;
  std::size_t n = 0;
  std::vector<std::vector<BBox>> selected;
  std::vector<SaliencyMap> loc_gts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!per[i]) continue;
    const auto& m = *per[i];
    mean.mae += m.mae;
    mean.max_f += m.max_f;
    mean.mean_f += m.mean_f;
    mean.adp_f += m.adp_f;
    mean.s += m.s;
    mean.max_e += m.max_e;
    mean.mean_e += m.mean_e;
    mean.adp_e += m.adp_e;
    ++n;
    if (ranks) {
      const auto it = ranks->find(ds[i].id);
      selected.push_back(it == ranks->end() ? std::vector<BBox>{} : selected_boxes(it->second));
      loc_gts.push_back(std::move(gts[i]));
    }
  }
  if (n > 0) {
    for (double* v : {&mean.mae, &mean.max_f, &mean.mean_f, &mean.adp_f, &mean.s, &mean.max_e, &mean.mean_e,
                      &mean.adp_e}) {
      *v /= static_cast<double>(n);
    }
  }

  const std::string dataset = fs::path(ds.feature_blob_path()).parent_path().filename().string();
  const fs::path mp = out_ / "metrics.tsv";
  auto out = open_out(mp);
  out << "metric\t" << (dataset.empty() ? "dataset" : dataset) << '\n';
  out << "maxF\t" << num(mean.max_f, 4) << '\n';
  out << "meanF\t" << num(mean.mean_f, 4) << '\n';
  out << "adpF\t" << num(mean.adp_f, 4) << '\n';
  out << "MAE\t" << num(mean.mae, 4) << '\n';
  out << "S\t" << num(mean.s, 4) << '\n';
  out << "maxE\t" << num(mean.max_e, 4) << '\n';
  out << "meanE\t" << num(mean.mean_e, 4) << '\n';
  out << "adpE\t" << num(mean.adp_e, 4) << '\n';
  if (ranks) {
    const LocalizationPrf loc = localization_prf(selected, loc_gts, cfg_.metrics);
    out << "locP\t" << num(loc.precision, 4) << '\n';
    out << "locR\t" << num(loc.recall, 4) << '\n';
    out << "locF\t" << num(loc.f_measure, 4) << '\n';
  }
  out << "images\t" << n << '\n';
  out.close();

  const fs::path pp = out_ / "per_image_metrics.tsv";
  auto pi = open_out(pp);
  pi << "image\tmaxF\tmeanF\tadpF\tMAE\tS\tmaxE\tmeanE\tadpE\terror\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    pi << ds[i].id;
    if (per[i]) {
      const auto& m = *per[i];
      for (double v : {m.max_f, m.mean_f, m.adp_f, m.mae, m.s, m.max_e, m.mean_e, m.adp_e}) pi << '\t' << num(v);
      pi << "\t-\n";
    } else {
      for (int k = 0; k < 8; ++k) pi << "\tnan";
      pi << '\t' << errors[i] << '\n';
      std::cerr << "eval: " << ds[i].id << ": " << errors[i] << '\n';
      ++failures;
    }
  }
  pi.close();
  record("eval", mp);
  record("eval", pp);
  return failures > 0 ? 1 : 0;
}

int StageRunner::pipeline() {
  ingest();
  retrieve();
  pairs();
  train();
  rank();
  fuse();
  const int rc = eval();

  nlohmann::json summary;
  summary["config_hash"] = hash_;
  summary["seed"] = cfg_.seed;
  summary["images"] = ingested().size();
  summary["eval_failures"] = rc != 0;
  std::ifstream metrics(out_ / "metrics.tsv");
  std::string line;
  std::getline(metrics, line);
  while (std::getline(metrics, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    summary["metrics"][line.substr(0, tab)] = std::stod(line.substr(tab + 1));
  }
  const RankerCheckpoint ck = load_checkpoint((out_ / "ranker.srm").string());
  summary["train"] = {{"best_epoch", ck.epoch}, {"best_validation_loss", ck.loss}};
  const fs::path sp = out_ / "run_summary.json";
  auto out = open_out(sp);
  out << summary.dump(2) << '\n';
  out.close();
  record("pipeline", sp);
  return rc;
}

}  // namespace salrank::app
