#ifndef SALRANK_CHECKPOINT_HPP
#define SALRANK_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace salrank {

/// Serialized ranker parameters.
///
/// Layout ("SRM1"): magic, u32 dim count, u32 dims[], then per layer the
/// row-major (out x in) weights followed by the bias, all little-endian
/// binary32; trailer: u64 seed, u32 epoch, f64 loss.
struct RankerCheckpoint {
  std::vector<std::uint32_t> layer_dims;
  std::vector<std::vector<float>> weights;
  std::vector<std::vector<float>> biases;
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;
  double loss = 0.0;

  /// Throws ValidationError when dims do not chain with the parameter blocks
  /// or any parameter is non-finite.
  void validate() const;

  friend bool operator==(const RankerCheckpoint&, const RankerCheckpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const RankerCheckpoint& ckpt);
RankerCheckpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes,
                                   const std::string& origin = "<memory>");

void save_checkpoint(const RankerCheckpoint& ckpt, const std::string& path);
RankerCheckpoint load_checkpoint(const std::string& path);

}  // namespace salrank

#endif  // SALRANK_CHECKPOINT_HPP
