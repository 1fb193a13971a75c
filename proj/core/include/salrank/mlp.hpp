#ifndef SALRANK_MLP_HPP
#define SALRANK_MLP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "salrank/errors.hpp"
#include "salrank/rng.hpp"

namespace salrank {

/// Weights and biases of a fully connected stack. Weight block l is row-major
/// (out x in). Also used as the gradient accumulator.
template <typename T>
struct MlpParams {
  std::vector<std::vector<T>> weights;
  std::vector<std::vector<T>> biases;

  static MlpParams zeros(const std::vector<std::size_t>& dims) {
    MlpParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      p.weights.emplace_back(dims[l] * dims[l + 1], T(0));
      p.biases.emplace_back(dims[l + 1], T(0));
    }
    return p;
  }

  void fill(T v) {
    for (auto& w : weights) std::fill(w.begin(), w.end(), v);
    for (auto& b : biases) std::fill(b.begin(), b.end(), v);
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

namespace detail {

// Fixed eight-way accumulation; the summation order is part of the
// bit-reproducibility contract, so no compiler reassociation is relied on.
template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

}  // namespace detail

/// Scalar-output multilayer perceptron: ReLU between hidden layers, identity
/// at the head.
template <typename T>
class Mlp {
 public:
  /// Per-layer activations kept by a forward pass for backpropagation.
  struct Trace {
    std::vector<T> input;
    std::vector<std::vector<T>> hidden;  // post-ReLU outputs of layers 0..L-2
    T output = 0;
  };

  Mlp() = default;

  /// All parameters zero.
  explicit Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2 || dims_.back() != 1) {
      throw ValidationError("mlp: need at least input and a scalar output layer");
    }
    for (auto d : dims_) {
      if (d == 0) throw ValidationError("mlp: zero layer width");
    }
    params_ = MlpParams<T>::zeros(dims_);
  }

  /// He-style init: weights ~ N(0, scale^2 * 2 / fan_in), biases zero.
  static Mlp random(std::vector<std::size_t> dims, std::uint64_t seed, double scale = 1.0) {
    Mlp m(std::move(dims));
    Rng rng(seed);
    for (std::size_t l = 0; l < m.params_.weights.size(); ++l) {
      const double sd = scale * std::sqrt(2.0 / static_cast<double>(m.dims_[l]));
      for (auto& w : m.params_.weights[l]) w = static_cast<T>(sd * rng.normal());
    }
    return m;
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  const MlpParams<T>& params() const { return params_; }
  MlpParams<T>& params() { return params_; }

  T forward(std::span<const T> x) const {
    Trace t;
    return forward(x, t);
  }

  T forward(std::span<const T> x, Trace& trace) const {
    check_input(x.size());
    trace.input.assign(x.begin(), x.end());
    trace.hidden.resize(num_layers() - 1);
    const T* in = trace.input.data();
    T out_scalar = 0;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const std::size_t n_in = dims_[l];
      const std::size_t n_out = dims_[l + 1];
      const auto& w = params_.weights[l];
      const auto& b = params_.biases[l];
      if (l + 1 == num_layers()) {
        out_scalar = b[0] + detail::dot(w.data(), in, n_in);
      } else {
        auto& h = trace.hidden[l];
        h.resize(n_out);
        for (std::size_t o = 0; o < n_out; ++o) {
          const T z = b[o] + detail::dot(w.data() + o * n_in, in, n_in);
          h[o] = z > T(0) ? z : T(0);
        }
        in = h.data();
      }
    }
    trace.output = out_scalar;
    return out_scalar;
  }

  /// Adds d(output)/d(params) * upstream into `grad`.
  void backward(const Trace& trace, T upstream, MlpParams<T>& grad) const {
    if (upstream == T(0)) return;
    std::vector<T> delta{upstream};
    std::vector<T> prev;
    for (std::size_t l = num_layers(); l-- > 0;) {
      const std::size_t n_in = dims_[l];
      const std::size_t n_out = dims_[l + 1];
      const std::vector<T>& a = l == 0 ? trace.input : trace.hidden[l - 1];
      auto& gw = grad.weights[l];
      auto& gb = grad.biases[l];
      const auto& w = params_.weights[l];
      if (l > 0) prev.assign(n_in, T(0));
      for (std::size_t o = 0; o < n_out; ++o) {
        const T d = delta[o];
        if (d == T(0)) continue;
        gb[o] += d;
        T* grow = gw.data() + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) grow[i] += d * a[i];
        if (l > 0) {
          const T* wrow = w.data() + o * n_in;
          for (std::size_t i = 0; i < n_in; ++i) prev[i] += d * wrow[i];
        }
      }
      if (l > 0) {
        for (std::size_t i = 0; i < n_in; ++i) {
          if (!(a[i] > T(0))) prev[i] = T(0);
        }
        delta.swap(prev);
      }
    }
  }

  template <typename U>
  Mlp<U> cast() const {
    Mlp<U> m(dims_);
    for (std::size_t l = 0; l < num_layers(); ++l) {
      std::transform(params_.weights[l].begin(), params_.weights[l].end(), m.params().weights[l].begin(),
                     [](T v) { return static_cast<U>(v); });
      std::transform(params_.biases[l].begin(), params_.biases[l].end(), m.params().biases[l].begin(),
                     [](T v) { return static_cast<U>(v); });
    }
    return m;
  }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  void check_input(std::size_t n) const {
    if (n != input_dim()) {
      throw ValidationError("ranker input dim mismatch: expected " + std::to_string(input_dim()) +
                            ", got " + std::to_string(n));
    }
  }

  std::vector<std::size_t> dims_;
  MlpParams<T> params_;
};

}  // namespace salrank

#endif  // SALRANK_MLP_HPP
