#include "salrank/feature_blob.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "salrank/binary_io.hpp"
#include "salrank/errors.hpp"

namespace salrank {

namespace {

constexpr char kMagic[] = "SRF1";
constexpr std::size_t kHeaderBytes = 12;

FeatureBlobHeader parse_header(detail::ByteReader& in, const std::string& path) {
  if (in.bytes(4) != std::string_view(kMagic, 4)) {
    throw ValidationError(path + ": bad magic (expected SRF1)");
  }
  FeatureBlobHeader h;
  h.count = in.get<std::uint32_t>();
  h.dim = in.get<std::uint32_t>();
  return h;
}

void check_length(const FeatureBlobHeader& h, std::uintmax_t file_bytes, const std::string& path) {
  const std::uintmax_t expected = kHeaderBytes + std::uintmax_t{h.count} * h.dim * 4;
  if (file_bytes == expected) return;
  // A payload that is a whole number of vectors of some other width points at a
  // dimension mismatch rather than a cut-off file.
  const std::uintmax_t payload = file_bytes >= kHeaderBytes ? file_bytes - kHeaderBytes : 0;
  if (h.count > 0 && payload % (std::uintmax_t{h.count} * 4) == 0 && payload != 0) {
    throw ValidationError(path + ": dim mismatch: header declares dim " + std::to_string(h.dim) +
                          " but payload holds " + std::to_string(h.count) + " vectors of dim " +
                          std::to_string(payload / (std::uintmax_t{h.count} * 4)) + " (expected " +
                          std::to_string(expected) + " bytes, found " + std::to_string(file_bytes) + ")");
  }
  throw ValidationError(path + ": truncated payload: expected " + std::to_string(expected) +
                        " bytes, found " + std::to_string(file_bytes));
}

}  // namespace

std::span<const float> FeatureStore::operator[](std::uint32_t index) const {
  if (index >= count()) {
    throw ValidationError("feature index " + std::to_string(index) + " out of range (count " +
                          std::to_string(count()) + ")");
  }
  return {values_.data() + std::size_t{index} * dim_, dim_};
}

std::uint32_t FeatureStore::append(std::span<const float> values) {
  if (values.size() != dim_) {
    throw ValidationError("feature dim mismatch: expected " + std::to_string(dim_) + ", got " +
                          std::to_string(values.size()));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  values_.insert(values_.end(), values.begin(), values.end());
  return count() - 1;
}

FeatureBlobHeader read_feature_blob_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature blob " + path);
  std::vector<std::uint8_t> head(kHeaderBytes);
  in.read(reinterpret_cast<char*>(head.data()), kHeaderBytes);
  head.resize(static_cast<std::size_t>(in.gcount()));
  detail::ByteReader reader(head, path);
  const auto h = parse_header(reader, path);
  check_length(h, std::filesystem::file_size(path), path);
  return h;
}

FeatureStore read_feature_blob(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path);
  const auto h = parse_header(in, path);
  check_length(h, bytes.size(), path);
  FeatureStore store(h.dim);
  std::vector<float> row(h.dim);
  for (std::uint32_t i = 0; i < h.count; ++i) {
    for (auto& v : row) v = in.get<float>();
    try {
      store.append(row);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": vector " + std::to_string(i) + ": " + e.what());
    }
  }
  return store;
}

void write_feature_blob(const FeatureStore& store, const std::string& path) {
  detail::ByteWriter out;
  out.bytes(std::string_view(kMagic, 4));
  out.put<std::uint32_t>(store.count());
  out.put<std::uint32_t>(store.dim());
  for (float v : store.raw()) out.put<float>(v);
  detail::write_file_bytes(path, out.buffer());
}

}  // namespace salrank
