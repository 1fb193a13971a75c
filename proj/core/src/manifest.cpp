#include "salrank/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "salrank/errors.hpp"
#include "salrank/pgm.hpp"

namespace salrank {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

std::string relativize(const fs::path& base, const std::string& p) {
  const fs::path abs = fs::absolute(p).lexically_normal();
  return abs.lexically_relative(fs::absolute(base).lexically_normal()).generic_string();
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

ObjectProposal parse_proposal(const json& j, const std::string& where) {
  ObjectProposal p;
  p.id = field<std::string>(j, "id", where);
  const auto box = field<std::vector<int>>(j, "box", where + " proposal " + p.id);
  if (box.size() != 4) throw ValidationError(where + " proposal " + p.id + ": field 'box' needs 4 values");
  p.box = {box[0], box[1], box[2], box[3]};
  p.confidence = field<double>(j, "confidence", where + " proposal " + p.id);
  p.feature_ref = field<std::uint32_t>(j, "feature", where + " proposal " + p.id);
  p.enlarged_feature_ref = field<std::uint32_t>(j, "enlarged_feature", where + " proposal " + p.id);
  return p;
}

ImageRecord parse_image(const json& j, const fs::path& base, std::size_t index) {
  std::string where = "image #" + std::to_string(index);
  ImageRecord r;
  r.id = field<std::string>(j, "id", where);
  where = "image '" + r.id + "'";
  r.width = field<int>(j, "width", where);
  r.height = field<int>(j, "height", where);
  if (j.contains("image")) r.image_path = resolve(base, field<std::string>(j, "image", where));
  if (j.contains("gt")) r.gt_path = resolve(base, field<std::string>(j, "gt", where));
  if (j.contains("maps")) {
    for (const auto& m : field<std::vector<std::string>>(j, "maps", where)) {
      r.candidate_map_paths.push_back(resolve(base, m));
    }
  }
  if (j.contains("image_feature")) r.image_feature_ref = field<std::uint32_t>(j, "image_feature", where);
  if (j.contains("proposals")) {
    if (!j.at("proposals").is_array()) throw ValidationError(where + ": field 'proposals' must be an array");
    for (const auto& pj : j.at("proposals")) r.proposals.push_back(parse_proposal(pj, where));
  }
  return r;
}

}  // namespace

Dataset::Dataset(std::vector<ImageRecord> images, std::uint32_t feature_dim,
                 std::string feature_blob_path)
    : images_(std::move(images)),
      feature_dim_(feature_dim),
      feature_blob_path_(std::move(feature_blob_path)) {}

Dataset::Dataset(std::vector<ImageRecord> images, FeatureStore features)
    : images_(std::move(images)), feature_dim_(features.dim()) {
  std::call_once(lazy_->once, [&] { lazy_->store = std::move(features); });
}

std::optional<std::size_t> Dataset::find(const std::string& id) const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].id == id) return i;
  }
  return std::nullopt;
}

const FeatureStore& Dataset::features() const {
  std::call_once(lazy_->once, [&] {
    if (feature_blob_path_.empty()) return;
    lazy_->store = read_feature_blob(feature_blob_path_);
    if (lazy_->store.dim() != feature_dim_) {
      throw ValidationError(feature_blob_path_ + ": dim mismatch: manifest declares " +
                            std::to_string(feature_dim_) + ", blob holds " +
                            std::to_string(lazy_->store.dim()));
    }
  });
  return lazy_->store;
}

SaliencyMap Dataset::load_gt(std::size_t image) const {
  const auto& r = images_.at(image);
  if (!r.gt_path) throw ValidationError("image '" + r.id + "' has no GT mask");
  auto gt = read_map(*r.gt_path);
  if (gt.width != r.width || gt.height != r.height) {
    throw ValidationError("image '" + r.id + "': GT mask is " + std::to_string(gt.width) + "x" +
                          std::to_string(gt.height) + ", expected " + std::to_string(r.width) +
                          "x" + std::to_string(r.height));
  }
  return binarize_mask(gt);
}

std::vector<SaliencyMap> Dataset::load_candidate_maps(std::size_t image) const {
  const auto& r = images_.at(image);
  std::vector<SaliencyMap> maps;
  maps.reserve(r.candidate_map_paths.size());
  for (const auto& p : r.candidate_map_paths) {
    auto m = read_map(p);
    if (m.width != r.width || m.height != r.height) {
      throw ValidationError("image '" + r.id + "': candidate map " + p + " is " +
                            std::to_string(m.width) + "x" + std::to_string(m.height) +
                            ", expected " + std::to_string(r.width) + "x" + std::to_string(r.height));
    }
    maps.push_back(std::move(m));
  }
  return maps;
}

GrayImage Dataset::load_image(std::size_t image) const {
  const auto& r = images_.at(image);
  if (!r.image_path) throw ValidationError("image '" + r.id + "' has no grayscale image path");
  return read_map(*r.image_path);
}

Dataset Dataset::with_images(std::vector<ImageRecord> images) const {
  Dataset d = *this;
  d.images_ = std::move(images);
  return d;
}

void validate_records(const std::vector<ImageRecord>& images, std::uint32_t blob_count) {
  std::set<std::string> ids;
  auto check_ref = [&](std::uint32_t ref, const std::string& where, const char* name) {
    if (ref >= blob_count) {
      throw ValidationError(where + ": dangling feature reference '" + name + "' = " +
                            std::to_string(ref) + " (blob holds " + std::to_string(blob_count) +
                            " vectors)");
    }
  };
  for (const auto& r : images) {
    const std::string where = "image '" + r.id + "'";
    if (r.id.empty()) throw ValidationError("image record with empty id");
    if (!ids.insert(r.id).second) throw ValidationError(where + ": duplicate id");
    if (r.width < 1 || r.height < 1) throw ValidationError(where + ": width/height must be positive");
    if (r.image_feature_ref) check_ref(*r.image_feature_ref, where, "image_feature");
    std::set<std::string> pids;
    for (const auto& p : r.proposals) {
      const std::string pw = where + " proposal '" + p.id + "'";
      if (!pids.insert(p.id).second) throw ValidationError(pw + ": duplicate proposal id");
      if (!box_within(p.box, r.width, r.height)) {
        throw ValidationError(pw + ": field 'box' (" + std::to_string(p.box.x) + "," +
                              std::to_string(p.box.y) + "," + std::to_string(p.box.w) + "," +
                              std::to_string(p.box.h) + ") exceeds image bounds " +
                              std::to_string(r.width) + "x" + std::to_string(r.height));
      }
      if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
        throw ValidationError(pw + ": field 'confidence' outside [0,1]");
      }
      check_ref(p.feature_ref, pw, "feature");
      check_ref(p.enlarged_feature_ref, pw, "enlarged_feature");
    }
  }
}

Dataset load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed manifest: " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  const std::string where = path;
  if (!doc.is_object()) throw ValidationError(where + ": manifest must be a JSON object");
  const auto dim = doc.contains("feature_dim") ? field<std::uint32_t>(doc, "feature_dim", where) : 4096u;
  std::string blob;
  std::uint32_t blob_count = 0;
  if (doc.contains("feature_blob")) {
    blob = resolve(base, field<std::string>(doc, "feature_blob", where));
    const auto header = read_feature_blob_header(blob);
    if (header.dim != dim) {
      throw ValidationError(where + ": field 'feature_dim' = " + std::to_string(dim) +
                            " but blob " + blob + " has dim " + std::to_string(header.dim));
    }
    blob_count = header.count;
  }
  std::vector<ImageRecord> images;
  if (doc.contains("images")) {
    if (!doc.at("images").is_array()) throw ValidationError(where + ": field 'images' must be an array");
    std::size_t i = 0;
    for (const auto& j : doc.at("images")) images.push_back(parse_image(j, base, i++));
  }
  try {
    validate_records(images, blob_count);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": schema violation: " + e.what());
  }
  return Dataset(std::move(images), dim, blob);
}

void write_manifest(const Dataset& dataset, const std::string& path) {
  const fs::path base = fs::path(path).parent_path().empty() ? fs::path(".") : fs::path(path).parent_path();
  json doc;
  doc["version"] = 1;
  doc["feature_dim"] = dataset.feature_dim();
  if (!dataset.feature_blob_path().empty()) {
    doc["feature_blob"] = relativize(base, dataset.feature_blob_path());
  }
  json images = json::array();
  for (const auto& r : dataset.images()) {
    json j;
    j["id"] = r.id;
    j["width"] = r.width;
    j["height"] = r.height;
    if (r.image_path) j["image"] = relativize(base, *r.image_path);
    if (r.gt_path) j["gt"] = relativize(base, *r.gt_path);
    json maps = json::array();
    for (const auto& m : r.candidate_map_paths) maps.push_back(relativize(base, m));
    j["maps"] = maps;
    if (r.image_feature_ref) j["image_feature"] = *r.image_feature_ref;
    json props = json::array();
    for (const auto& p : r.proposals) {
      props.push_back({{"id", p.id},
                       {"box", {p.box.x, p.box.y, p.box.w, p.box.h}},
                       {"confidence", p.confidence},
                       {"feature", p.feature_ref},
                       {"enlarged_feature", p.enlarged_feature_ref}});
    }
    j["proposals"] = props;
    images.push_back(std::move(j));
  }
  doc["images"] = std::move(images);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace salrank
