#ifndef SALRANK_PAIRGEN_HPP
#define SALRANK_PAIRGEN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salrank/feature_blob.hpp"
#include "salrank/types.hpp"

namespace salrank {

/// A proposal's two blob rows: the box itself and its enlarged context.
struct FeatureRef {
  std::uint32_t local = 0;
  std::uint32_t enlarged = 0;

  friend bool operator==(const FeatureRef&, const FeatureRef&) = default;
};

inline FeatureRef feature_ref(const ObjectProposal& p) { return {p.feature_ref, p.enlarged_feature_ref}; }

namespace provenance {
inline constexpr std::uint8_t kIntra = 0x0;
inline constexpr std::uint8_t kInter = 0x1;
inline constexpr std::uint8_t kGtBased = 0x0;
inline constexpr std::uint8_t kModelBased = 0x2;
}  // namespace provenance

/// One ranking example. pgt = +1 means `first` is the more salient object.
struct TrainingPair {
  FeatureRef first;
  FeatureRef second;
  int pgt = 1;
  std::uint8_t provenance = 0;

  [[nodiscard]] bool inter() const { return provenance & provenance::kInter; }
  [[nodiscard]] bool model_based() const { return provenance & provenance::kModelBased; }

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// [feature(P) | feature(P_enlarged)], original first.
FeatureVector multiscale_feature(const FeatureRef& ref, const FeatureStore& store);
void multiscale_feature_into(const FeatureRef& ref, const FeatureStore& store, std::span<float> out);
inline FeatureVector multiscale_feature(const ObjectProposal& p, const FeatureStore& store) {
  return multiscale_feature(feature_ref(p), store);
}

/// +1 when more than 70% of the box pixels are GT foreground, else -1.
int psl(const BBox& box, const SaliencyMap& gt);

/// Mean over the box of the summed candidate maps.
double psl5(const BBox& box, std::span<const SaliencyMap> maps);

/// What the labeller knows about one proposal: a GT label when its image has
/// a mask, a model score when candidate maps are available.
struct ProposalLabels {
  std::optional<int> psl;
  std::optional<double> psl5;
};

struct PgtDecision {
  int pgt = -1;
  bool model_based = false;
};

/// GT labels decide when both sides have them and they differ; otherwise the
/// summed-model score decides, with ties going to -1.
PgtDecision make_pgt(const ProposalLabels& p1, const ProposalLabels& p2);

ProposalLabels label_proposal(const BBox& box, const SaliencyMap* gt, std::span<const SaliencyMap> maps);

struct LabeledImage {
  const ImageRecord* record = nullptr;
  std::vector<ProposalLabels> labels;  // parallel to record->proposals
};

LabeledImage label_image(const ImageRecord& record, const SaliencyMap* gt,
                         std::span<const SaliencyMap> maps);

struct PairOptions {
  // Model-based pairs whose score gap is below this are dropped (0 keeps all).
  double psl5_epsilon = 0.0;
};

/// Intra pairs (every unordered proposal pair of `image`) followed by inter
/// pairs (each proposal of `image` against each proposal of each retrieved
/// image, in retrieval order). Retrieved images are never paired together.
std::vector<TrainingPair> enumerate_pairs(const LabeledImage& image,
                                          std::span<const LabeledImage* const> retrieved,
                                          const PairOptions& opts = {});

struct PairSummary {
  std::size_t total = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t intra = 0;
  std::size_t inter = 0;
  std::size_t gt_based = 0;
  std::size_t model_based = 0;
};

PairSummary summarize_pairs(std::span<const TrainingPair> pairs);
std::string format_pair_summary(const PairSummary& s);

// Pair file ("SRP1"): magic, u32 count, then per pair u32 first.local,
// u32 first.enlarged, u32 second.local, u32 second.enlarged, i8 pgt,
// u8 provenance. Little-endian.
void write_pair_file(std::span<const TrainingPair> pairs, const std::string& path);
std::vector<TrainingPair> read_pair_file(const std::string& path);

}  // namespace salrank

#endif  // SALRANK_PAIRGEN_HPP
