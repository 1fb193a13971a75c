#ifndef SALRANK_TEST_GRADCHECK_HPP
#define SALRANK_TEST_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "salrank/ranker.hpp"

namespace salrank::testing {

// Smallest |pre-activation| over all hidden units for input x. Finite
// differences are only meaningful away from ReLU kinks.
inline double min_abs_preactivation(const Mlp<double>& m, const std::vector<double>& x) {
  double worst = INFINITY;
  std::vector<double> in = x;
  for (std::size_t l = 0; l + 1 < m.num_layers(); ++l) {
    const std::size_t n_in = m.dims()[l], n_out = m.dims()[l + 1];
    std::vector<double> out(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      double z = m.params().biases[l][o];
      for (std::size_t i = 0; i < n_in; ++i) z += m.params().weights[l][o * n_in + i] * in[i];
      worst = std::min(worst, std::fabs(z));
      out[o] = std::max(z, 0.0);
    }
    in = std::move(out);
  }
  return worst;
}

// Max over parameters of |fd - g| / max(|fd| + |g|, floor), with central
// differences of step h.
inline double gradient_relative_error(const Mlp<double>& model, const std::vector<double>& f1,
                                      const std::vector<double>& f2, int pgt, double rho, HingeForm form,
                                      double h = 1e-4, double floor = 1e-6) {
  auto grad = MlpParams<double>::zeros(model.dims());
  accumulate_pair_gradient<double>(model, f1, f2, pgt, rho, form, grad);
  Mlp<double> probe = model;
  auto loss = [&] { return pair_loss(form, probe.forward(f1), probe.forward(f2), pgt, rho); };
  double worst = 0.0;
  auto check = [&](std::vector<double>& param, const std::vector<double>& g) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double saved = param[i];
      param[i] = saved + h;
      const double up = loss();
      param[i] = saved - h;
      const double down = loss();
      param[i] = saved;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::fabs(fd - g[i]) / std::max(std::fabs(fd) + std::fabs(g[i]), floor));
    }
  };
  for (std::size_t l = 0; l < probe.num_layers(); ++l) {
    check(probe.params().weights[l], grad.weights[l]);
    check(probe.params().biases[l], grad.biases[l]);
  }
  return worst;
}

}  // namespace salrank::testing

#endif  // SALRANK_TEST_GRADCHECK_HPP
