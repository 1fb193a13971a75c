#ifndef SALRANK_MANIFEST_HPP
#define SALRANK_MANIFEST_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "salrank/feature_blob.hpp"
#include "salrank/types.hpp"

namespace salrank {

/// An immutable collection of image records plus the feature blob they
/// reference. Feature values and maps are loaded on first use.
///
/// Manifest layout (JSON):
///
///   {
///     "version": 1,
///     "feature_dim": 4096,
///     "feature_blob": "features.srf",
///     "images": [
///       { "id": "img0", "width": 320, "height": 240,
///         "image": "img/img0.pgm",             (optional)
///         "gt": "gt/img0.pgm",                 (optional)
///         "maps": ["maps/img0_0.pgm", ...],
///         "image_feature": 0,                  (optional blob index)
///         "proposals": [
///           { "id": "p0", "box": [x, y, w, h], "confidence": 0.9,
///             "feature": 1, "enlarged_feature": 2 } ] } ] }
///
/// Relative paths resolve against the manifest's directory.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<ImageRecord> images, std::uint32_t feature_dim,
          std::string feature_blob_path);
  Dataset(std::vector<ImageRecord> images, FeatureStore features);

  [[nodiscard]] const std::vector<ImageRecord>& images() const { return images_; }
  [[nodiscard]] std::size_t size() const { return images_.size(); }
  [[nodiscard]] const ImageRecord& operator[](std::size_t i) const { return images_[i]; }
  [[nodiscard]] std::uint32_t feature_dim() const { return feature_dim_; }
  [[nodiscard]] const std::string& feature_blob_path() const { return feature_blob_path_; }

  /// Index of the record with this id, if any.
  [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const;

  /// Feature blob contents; read from disk on first call. Thread-safe.
  [[nodiscard]] const FeatureStore& features() const;

  [[nodiscard]] SaliencyMap load_gt(std::size_t image) const;
  [[nodiscard]] std::vector<SaliencyMap> load_candidate_maps(std::size_t image) const;
  [[nodiscard]] GrayImage load_image(std::size_t image) const;

  /// Copy with the given records substituted (same feature blob).
  [[nodiscard]] Dataset with_images(std::vector<ImageRecord> images) const;

 private:
  struct LazyFeatures {
    std::once_flag once;
    FeatureStore store;
  };

  std::vector<ImageRecord> images_;
  std::uint32_t feature_dim_ = 0;
  std::string feature_blob_path_;
  std::shared_ptr<LazyFeatures> lazy_ = std::make_shared<LazyFeatures>();
};

Dataset load_manifest(const std::string& path);

/// Writes `dataset` as a manifest at `path`, with every referenced path made
/// relative to the manifest directory. Output is deterministic.
void write_manifest(const Dataset& dataset, const std::string& path);

/// Checks record invariants (box bounds, unique ids, confidence range, feature
/// references against `blob_count`). Throws ValidationError naming the record.
void validate_records(const std::vector<ImageRecord>& images, std::uint32_t blob_count);

}  // namespace salrank

#endif  // SALRANK_MANIFEST_HPP
