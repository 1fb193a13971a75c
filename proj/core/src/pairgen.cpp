#include "salrank/pairgen.hpp"

#include <cmath>
#include <sstream>

#include "salrank/binary_io.hpp"
#include "salrank/errors.hpp"

namespace salrank {

namespace {
constexpr char kMagic[] = "SRP1";
constexpr double kPslCoverage = 0.70;

void require_inside(const BBox& box, const SaliencyMap& map) {
  if (!box_within(box, map.width, map.height)) throw ValidationError("box lies outside the map");
}
}  // namespace

void multiscale_feature_into(const FeatureRef& ref, const FeatureStore& store, std::span<float> out) {
  const std::size_t d = store.dim();
  if (out.size() != 2 * d) {
    throw ValidationError("multi-scale buffer has " + std::to_string(out.size()) + " slots, need " +
                          std::to_string(2 * d));
  }
  const auto a = store[ref.local];
  const auto b = store[ref.enlarged];
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(d));
}

FeatureVector multiscale_feature(const FeatureRef& ref, const FeatureStore& store) {
  FeatureVector f(2 * std::size_t{store.dim()});
  multiscale_feature_into(ref, store, f);
  return f;
}

int psl(const BBox& box, const SaliencyMap& gt) {
  require_inside(box, gt);
  long long fg = 0;
  for (int y = box.y; y < box.bottom(); ++y) {
    for (int x = box.x; x < box.right(); ++x) fg += gt.at(x, y) > 0.5f ? 1 : 0;
  }
  return static_cast<double>(fg) > kPslCoverage * static_cast<double>(box.area()) ? 1 : -1;
}

double psl5(const BBox& box, std::span<const SaliencyMap> maps) {
  double total = 0.0;
  for (const auto& m : maps) {
    require_inside(box, m);
    for (int y = box.y; y < box.bottom(); ++y) {
      for (int x = box.x; x < box.right(); ++x) total += m.at(x, y);
    }
  }
  return total / static_cast<double>(box.area());
}

PgtDecision make_pgt(const ProposalLabels& p1, const ProposalLabels& p2) {
  if (p1.psl && p2.psl && *p1.psl != *p2.psl) {
    return {*p1.psl > *p2.psl ? 1 : -1, false};
  }
  if (!p1.psl5 || !p2.psl5) {
    throw ValidationError("cannot label pair: a proposal has neither a distinguishing GT label nor candidate maps");
  }
  return {*p1.psl5 > *p2.psl5 ? 1 : -1, true};
}

ProposalLabels label_proposal(const BBox& box, const SaliencyMap* gt, std::span<const SaliencyMap> maps) {
  ProposalLabels l;
  if (gt != nullptr) l.psl = psl(box, *gt);
  if (!maps.empty()) l.psl5 = psl5(box, maps);
  return l;
}

LabeledImage label_image(const ImageRecord& record, const SaliencyMap* gt, std::span<const SaliencyMap> maps) {
  if (gt == nullptr && maps.empty()) {
    throw ValidationError("image '" + record.id + "' has neither a GT mask nor candidate maps");
  }
  LabeledImage li{&record, {}};
  li.labels.reserve(record.proposals.size());
  for (const auto& p : record.proposals) li.labels.push_back(label_proposal(p.box, gt, maps));
  return li;
}

std::vector<TrainingPair> enumerate_pairs(const LabeledImage& image,
                                          std::span<const LabeledImage* const> retrieved,
                                          const PairOptions& opts) {
  std::vector<TrainingPair> pairs;
  const auto& props = image.record->proposals;

  auto emit = [&](const ObjectProposal& a, const ProposalLabels& la, const ObjectProposal& b,
                  const ProposalLabels& lb, std::uint8_t where) {
    const PgtDecision d = make_pgt(la, lb);
    if (d.model_based && opts.psl5_epsilon > 0.0 && std::fabs(*la.psl5 - *lb.psl5) < opts.psl5_epsilon) {
      return;
    }
    pairs.push_back({feature_ref(a), feature_ref(b), d.pgt,
                     static_cast<std::uint8_t>(where | (d.model_based ? provenance::kModelBased
                                                                      : provenance::kGtBased))});
  };

  for (std::size_t i = 0; i < props.size(); ++i) {
    for (std::size_t j = i + 1; j < props.size(); ++j) {
      emit(props[i], image.labels[i], props[j], image.labels[j], provenance::kIntra);
    }
  }
  for (const LabeledImage* other : retrieved) {
    const auto& oprops = other->record->proposals;
    for (std::size_t i = 0; i < props.size(); ++i) {
      for (std::size_t j = 0; j < oprops.size(); ++j) {
        emit(props[i], image.labels[i], oprops[j], other->labels[j], provenance::kInter);
      }
    }
  }
  return pairs;
}

PairSummary summarize_pairs(std::span<const TrainingPair> pairs) {
  PairSummary s;
  s.total = pairs.size();
  for (const auto& p : pairs) {
    (p.pgt > 0 ? s.positive : s.negative)++;
    (p.inter() ? s.inter : s.intra)++;
    (p.model_based() ? s.model_based : s.gt_based)++;
  }
  return s;
}

std::string format_pair_summary(const PairSummary& s) {
  std::ostringstream os;
  os << "pairs\t" << s.total << '\n'
     << "positive\t" << s.positive << '\n'
     << "negative\t" << s.negative << '\n'
     << "intra\t" << s.intra << '\n'
     << "inter\t" << s.inter << '\n'
     << "gt_based\t" << s.gt_based << '\n'
     << "model_based\t" << s.model_based << '\n';
  return os.str();
}

void write_pair_file(std::span<const TrainingPair> pairs, const std::string& path) {
  detail::ByteWriter out;
  out.bytes(std::string_view(kMagic, 4));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(pairs.size()));
  for (const auto& p : pairs) {
    out.put<std::uint32_t>(p.first.local);
    out.put<std::uint32_t>(p.first.enlarged);
    out.put<std::uint32_t>(p.second.local);
    out.put<std::uint32_t>(p.second.enlarged);
    out.put<std::int8_t>(static_cast<std::int8_t>(p.pgt));
    out.put<std::uint8_t>(p.provenance);
  }
  detail::write_file_bytes(path, out.buffer());
}

std::vector<TrainingPair> read_pair_file(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path);
  if (bytes.size() < 4 || in.bytes(4) != std::string_view(kMagic, 4)) {
    throw ValidationError(path + ": bad magic (expected SRP1)");
  }
  const auto count = in.get<std::uint32_t>();
  constexpr std::size_t kRecord = 4 * 4 + 2;
  if (in.remaining() != std::size_t{count} * kRecord) {
    throw ValidationError(path + ": truncated payload: expected " +
                          std::to_string(8 + std::size_t{count} * kRecord) + " bytes, found " +
                          std::to_string(bytes.size()));
  }
  std::vector<TrainingPair> pairs(count);
  for (auto& p : pairs) {
    p.first.local = in.get<std::uint32_t>();
    p.first.enlarged = in.get<std::uint32_t>();
    p.second.local = in.get<std::uint32_t>();
    p.second.enlarged = in.get<std::uint32_t>();
    p.pgt = in.get<std::int8_t>();
    p.provenance = in.get<std::uint8_t>();
    if (p.pgt != 1 && p.pgt != -1) throw ValidationError(path + ": pair label must be +1 or -1");
  }
  return pairs;
}

}  // namespace salrank
