#ifndef SALRANK_RANKER_HPP
#define SALRANK_RANKER_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "salrank/checkpoint.hpp"
#include "salrank/feature_blob.hpp"
#include "salrank/mlp.hpp"
#include "salrank/pairgen.hpp"

namespace salrank {

/// Shared scoring branch of the siamese ranker; both pair members go through
/// the same weights.
using RankerModel = Mlp<float>;

/// Hidden widths of the full-size branch (input 8192, scalar head).
inline const std::vector<std::size_t> kDefaultHidden = {1024, 2048, 2048, 1024, 1024};

enum class HingeForm {
  // max{0, pgt*(s2 - s1) - rho}: only order violations larger than rho cost.
  kTolerant,
  // max{0, rho - pgt*(s1 - s2)}: correct order must also clear rho.
  kMargin,
};

HingeForm parse_hinge_form(const std::string& name);
std::string to_string(HingeForm form);

/// Tolerant form: max{0, pgt*(s2 - s1) - rho}.
double hinge_loss(double s1, double s2, int pgt, double rho);
/// Margin form: max{0, rho - pgt*(s1 - s2)}.
double margin_hinge_loss(double s1, double s2, int pgt, double rho);
double pair_loss(HingeForm form, double s1, double s2, int pgt, double rho);

/// d(loss)/d(s1); d(loss)/d(s2) is its negation. Zero where the hinge is flat.
double pair_loss_slope(HingeForm form, double s1, double s2, int pgt, double rho);

/// Adds the gradient of pair_loss(forward(f1), forward(f2)) w.r.t. all model
/// parameters into `grad` and returns the loss. Both branches share `grad`.
template <typename T>
double accumulate_pair_gradient(const Mlp<T>& model, std::span<const T> f1, std::span<const T> f2,
                                int pgt, double rho, HingeForm form, MlpParams<T>& grad) {
  typename Mlp<T>::Trace t1, t2;
  const T s1 = model.forward(f1, t1);
  const T s2 = model.forward(f2, t2);
  const double loss = pair_loss(form, s1, s2, pgt, rho);
  const double slope = pair_loss_slope(form, s1, s2, pgt, rho);
  if (slope != 0.0) {
    model.backward(t1, static_cast<T>(slope), grad);
    model.backward(t2, static_cast<T>(-slope), grad);
  }
  return loss;
}

struct TrainConfig {
  std::vector<std::size_t> hidden = kDefaultHidden;
  double margin = 10.0;
  HingeForm hinge = HingeForm::kMargin;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  double validation_fraction = 0.1;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainResult {
  RankerModel model;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 0 = the initial model was kept
  double best_loss = 0.0;
};

RankerModel make_ranker(std::size_t input_dim, const TrainConfig& cfg);

/// Minibatch SGD with momentum. Pairs are split once into train/validation
/// parts with the seed; the returned model is the epoch with the lowest
/// validation loss. Deterministic for a given seed.
TrainResult train(const FeatureStore& features, std::span<const TrainingPair> pairs,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

/// Score of the branch on the multi-scale feature of `ref`.
float score(const RankerModel& model, const FeatureStore& features, const FeatureRef& ref);

/// Fraction of pairs whose branch scores order as the label says (ties count wrong).
double pairwise_accuracy(const RankerModel& model, const FeatureStore& features,
                         std::span<const TrainingPair> pairs);

RankerCheckpoint to_checkpoint(const RankerModel& model, std::uint64_t seed = 0,
                               std::uint32_t epoch = 0, double loss = 0.0);
RankerModel from_checkpoint(const RankerCheckpoint& ckpt);

}  // namespace salrank

#endif  // SALRANK_RANKER_HPP
