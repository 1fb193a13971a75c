#ifndef SALRANK_FEATURE_BLOB_HPP
#define SALRANK_FEATURE_BLOB_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace salrank {

/// Dense table of equal-length float vectors, addressed by index.
///
/// On disk ("SRF1"): 4-byte magic, u32 count, u32 dim, then count*dim
/// little-endian IEEE-754 binary32 values.
class FeatureStore {
 public:
  FeatureStore() = default;
  explicit FeatureStore(std::uint32_t dim) : dim_(dim) {}

  [[nodiscard]] std::uint32_t dim() const { return dim_; }
  [[nodiscard]] std::uint32_t count() const {
    return dim_ == 0 ? 0 : static_cast<std::uint32_t>(values_.size() / dim_);
  }
  [[nodiscard]] std::span<const float> operator[](std::uint32_t index) const;
  [[nodiscard]] const std::vector<float>& raw() const { return values_; }

  /// Appends a vector and returns its index. Throws ValidationError on a
  /// dimension mismatch or a non-finite value.
  std::uint32_t append(std::span<const float> values);

  friend bool operator==(const FeatureStore&, const FeatureStore&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
};

struct FeatureBlobHeader {
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
};

/// Reads and checks only the 12-byte header plus the file length.
FeatureBlobHeader read_feature_blob_header(const std::string& path);
FeatureStore read_feature_blob(const std::string& path);
void write_feature_blob(const FeatureStore& store, const std::string& path);

}  // namespace salrank

#endif  // SALRANK_FEATURE_BLOB_HPP
