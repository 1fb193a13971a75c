#include "salrank/checkpoint.hpp"

#include <cmath>

#include "salrank/binary_io.hpp"
#include "salrank/errors.hpp"

namespace salrank {

namespace {
constexpr char kMagic[] = "SRM1";
}

void RankerCheckpoint::validate() const {
  if (layer_dims.size() < 2) throw ValidationError("checkpoint: need at least two layer dims");
  for (auto d : layer_dims) {
    if (d == 0) throw ValidationError("checkpoint: zero layer dim");
  }
  const std::size_t layers = layer_dims.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw ValidationError("checkpoint: layer-chain inconsistency: " + std::to_string(layers) +
                          " layers declared, " + std::to_string(weights.size()) +
                          " weight blocks present");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = layer_dims[l];
    const std::size_t out = layer_dims[l + 1];
    if (weights[l].size() != in * out || biases[l].size() != out) {
      throw ValidationError("checkpoint: layer-chain inconsistency at layer " + std::to_string(l) +
                            ": dims " + std::to_string(in) + "->" + std::to_string(out) +
                            " but weight block has " + std::to_string(weights[l].size()) +
                            " values and bias " + std::to_string(biases[l].size()));
    }
    for (float v : weights[l]) {
      if (!std::isfinite(v)) throw ValidationError("checkpoint: non-finite weight in layer " + std::to_string(l));
    }
    for (float v : biases[l]) {
      if (!std::isfinite(v)) throw ValidationError("checkpoint: non-finite bias in layer " + std::to_string(l));
    }
  }
}

std::vector<std::uint8_t> encode_checkpoint(const RankerCheckpoint& ckpt) {
  ckpt.validate();
  detail::ByteWriter out;
  out.bytes(std::string_view(kMagic, 4));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.layer_dims.size()));
  for (auto d : ckpt.layer_dims) out.put<std::uint32_t>(d);
  for (std::size_t l = 0; l < ckpt.weights.size(); ++l) {
    for (float v : ckpt.weights[l]) out.put<float>(v);
    for (float v : ckpt.biases[l]) out.put<float>(v);
  }
  out.put<std::uint64_t>(ckpt.seed);
  out.put<std::uint32_t>(ckpt.epoch);
  out.put<double>(ckpt.loss);
  return std::move(out.buffer());
}

RankerCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  detail::ByteReader in(bytes, origin);
  if (bytes.size() < 4 || in.bytes(4) != std::string_view(kMagic, 4)) {
    throw ValidationError(origin + ": magic mismatch (expected SRM1)");
  }
  RankerCheckpoint c;
  const auto ndims = in.get<std::uint32_t>();
  if (ndims < 2 || ndims > 64) throw ValidationError(origin + ": implausible layer count " + std::to_string(ndims));
  for (std::uint32_t i = 0; i < ndims; ++i) c.layer_dims.push_back(in.get<std::uint32_t>());

  std::size_t params = 0;
  for (std::size_t l = 0; l + 1 < c.layer_dims.size(); ++l) {
    params += std::size_t{c.layer_dims[l]} * c.layer_dims[l + 1] + c.layer_dims[l + 1];
  }
  constexpr std::size_t kTrailer = 8 + 4 + 8;
  const std::size_t expected = in.position() + params * 4 + kTrailer;
  if (bytes.size() != expected) {
    throw ValidationError(origin + ": layer-chain inconsistency: dims require " +
                          std::to_string(expected) + " bytes, file has " + std::to_string(bytes.size()));
  }
  for (std::size_t l = 0; l + 1 < c.layer_dims.size(); ++l) {
    std::vector<float> w(std::size_t{c.layer_dims[l]} * c.layer_dims[l + 1]);
    for (auto& v : w) v = in.get<float>();
    std::vector<float> b(c.layer_dims[l + 1]);
    for (auto& v : b) v = in.get<float>();
    c.weights.push_back(std::move(w));
    c.biases.push_back(std::move(b));
  }
  c.seed = in.get<std::uint64_t>();
  c.epoch = in.get<std::uint32_t>();
  c.loss = in.get<double>();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return c;
}

void save_checkpoint(const RankerCheckpoint& ckpt, const std::string& path) {
  detail::write_file_bytes(path, encode_checkpoint(ckpt));
}

RankerCheckpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(detail::read_file_bytes(path), path);
}

}  // namespace salrank
