#include "salrank/ranker.hpp"

#include <cmath>
#include <numeric>

#include "salrank/errors.hpp"
#include "salrank/rng.hpp"

namespace salrank {

HingeForm parse_hinge_form(const std::string& name) {
  if (name == "tolerant") return HingeForm::kTolerant;
  if (name == "margin") return HingeForm::kMargin;
  throw ValidationError("unknown hinge form '" + name + "' (expected tolerant or margin)");
}

std::string to_string(HingeForm form) { return form == HingeForm::kTolerant ? "tolerant" : "margin"; }

namespace {

// max{0, x} that lets NaN through, so diverged scores surface as a bad loss.
double positive_part(double x) { return std::isnan(x) || x > 0.0 ? x : 0.0; }

}  // namespace

double hinge_loss(double s1, double s2, int pgt, double rho) { return positive_part(pgt * (s2 - s1) - rho); }

double margin_hinge_loss(double s1, double s2, int pgt, double rho) { return positive_part(rho - pgt * (s1 - s2)); }

double pair_loss(HingeForm form, double s1, double s2, int pgt, double rho) {
  return form == HingeForm::kTolerant ? hinge_loss(s1, s2, pgt, rho) : margin_hinge_loss(s1, s2, pgt, rho);
}

double pair_loss_slope(HingeForm form, double s1, double s2, int pgt, double rho) {
  // Both forms reduce to max{0, -pgt*(s1 - s2) + c}; the active side has slope -pgt in s1.
  return pair_loss(form, s1, s2, pgt, rho) > 0.0 ? -static_cast<double>(pgt) : 0.0;
}

void TrainConfig::validate() const {
  if (!(margin > 0.0)) throw ValidationError("train.margin must be positive");
  if (!(learning_rate > 0.0)) throw ValidationError("train.learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("train.momentum must lie in [0, 1)");
  if (batch_size == 0) throw ValidationError("train.batch_size must be positive");
  if (!(init_scale > 0.0)) throw ValidationError("train.init_scale must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ValidationError("train.validation_fraction must lie in [0, 1)");
  }
  for (auto h : hidden) {
    if (h == 0) throw ValidationError("train.hidden widths must be positive");
  }
}

RankerModel make_ranker(std::size_t input_dim, const TrainConfig& cfg) {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  return RankerModel::random(std::move(dims), cfg.seed, cfg.init_scale);
}

float score(const RankerModel& model, const FeatureStore& features, const FeatureRef& ref) {
  const FeatureVector f = multiscale_feature(ref, features);
  return model.forward(f);
}

namespace {

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const RankerModel& model, const FeatureStore& features,
                    std::span<const TrainingPair> pairs, std::span<const std::size_t> subset,
                    const TrainConfig& cfg) {
  Evaluation e;
  if (subset.empty()) return e;
  FeatureVector f1(2 * std::size_t{features.dim()}), f2(f1.size());
  std::size_t correct = 0;
  for (std::size_t idx : subset) {
    const auto& p = pairs[idx];
    multiscale_feature_into(p.first, features, f1);
    multiscale_feature_into(p.second, features, f2);
    const float s1 = model.forward(f1);
    const float s2 = model.forward(f2);
    e.loss += pair_loss(cfg.hinge, s1, s2, p.pgt, cfg.margin);
    if ((p.pgt > 0 && s1 > s2) || (p.pgt < 0 && s2 > s1)) ++correct;
  }
  e.loss /= static_cast<double>(subset.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(subset.size());
  return e;
}

}  // namespace

double pairwise_accuracy(const RankerModel& model, const FeatureStore& features,
                         std::span<const TrainingPair> pairs) {
  std::vector<std::size_t> all(pairs.size());
  std::iota(all.begin(), all.end(), 0);
  TrainConfig cfg;
  return evaluate(model, features, pairs, all, cfg).accuracy;
}

TrainResult train(const FeatureStore& features, std::span<const TrainingPair> pairs,
                  const TrainConfig& cfg, const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (pairs.empty()) throw ValidationError("train: empty pair set");
  const std::size_t dim = 2 * std::size_t{features.dim()};

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * pairs.size()));
  if (n_val >= pairs.size()) n_val = pairs.size() - 1;
  std::vector<std::size_t> val(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<std::size_t> fit(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  // With no holdout, model selection falls back to the training pairs.
  const std::span<const std::size_t> select = val.empty() ? std::span<const std::size_t>(fit) : val;

  TrainResult result;
  RankerModel model = make_ranker(dim, cfg);
  result.model = model;
  result.best_loss = evaluate(model, features, pairs, select, cfg).loss;
  if (cfg.epochs == 0) return result;

  MlpParams<float> grad = MlpParams<float>::zeros(model.dims());
  MlpParams<float> velocity = MlpParams<float>::zeros(model.dims());
  FeatureVector f1(dim), f2(dim);
  bool have_best = false;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(fit);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < fit.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(fit.size(), start + cfg.batch_size);
      grad.fill(0.0f);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& p = pairs[fit[k]];
        multiscale_feature_into(p.first, features, f1);
        multiscale_feature_into(p.second, features, f2);
        batch_loss += accumulate_pair_gradient<float>(model, f1, f2, p.pgt, cfg.margin, cfg.hinge, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw ValidationError("train: non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_index) + " (pairs " + std::to_string(start) + ".." +
                              std::to_string(end - 1) + " of the shuffled order)");
      }
      epoch_loss += batch_loss;
      const float scale = static_cast<float>(cfg.learning_rate / static_cast<double>(end - start));
      const float mu = static_cast<float>(cfg.momentum);
      auto& params = model.params();
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        auto step = [&](std::vector<float>& w, std::vector<float>& v, const std::vector<float>& g) {
          for (std::size_t i = 0; i < w.size(); ++i) {
            v[i] = mu * v[i] - scale * g[i];
            w[i] += v[i];
          }
        };
        step(params.weights[l], velocity.weights[l], grad.weights[l]);
        step(params.biases[l], velocity.biases[l], grad.biases[l]);
      }
    }

    const Evaluation ev = evaluate(model, features, pairs, select, cfg);
    EpochStats stats{epoch, fit.empty() ? 0.0 : epoch_loss / static_cast<double>(fit.size()), ev.loss,
                     ev.accuracy};
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (!have_best || ev.loss < result.best_loss) {
      have_best = true;
      result.best_loss = ev.loss;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

RankerCheckpoint to_checkpoint(const RankerModel& model, std::uint64_t seed, std::uint32_t epoch, double loss) {
  RankerCheckpoint c;
  for (auto d : model.dims()) c.layer_dims.push_back(static_cast<std::uint32_t>(d));
  c.weights = model.params().weights;
  c.biases = model.params().biases;
  c.seed = seed;
  c.epoch = epoch;
  c.loss = loss;
  return c;
}

RankerModel from_checkpoint(const RankerCheckpoint& ckpt) {
  ckpt.validate();
  if (ckpt.layer_dims.back() != 1) throw ValidationError("checkpoint: ranker head must be scalar");
  std::vector<std::size_t> dims(ckpt.layer_dims.begin(), ckpt.layer_dims.end());
  RankerModel m(dims);
  m.params().weights = ckpt.weights;
  m.params().biases = ckpt.biases;
  return m;
}

}  // namespace salrank
