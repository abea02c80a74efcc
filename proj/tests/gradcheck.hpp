// Central finite-difference gradient checking, independent of the tape's
// backward path: analytic gradients come from one backward() call, reference
// values from two plain forward evaluations per coordinate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "senselab/rng.hpp"
#include "senselab/tensor.hpp"

namespace gradcheck {

using senselab::nn::Tape;
using senselab::nn::Tensor;

struct Result {
  double max_rel = 0.0;
  int checked = 0;
};

inline double rel_err(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-3});
  return std::fabs(a - b) / denom;
}

// loss_fn must rebuild the computation from scratch on each call; it receives
// a tape when gradients should be recorded and nullptr for plain evaluation.
template <class F>
Result check(std::vector<Tensor> params, F loss_fn, double h,
             int total_coords, senselab::Rng& rng) {
  for (auto& p : params) p.zero_grad();
  Tape tape;
  Tensor loss = loss_fn(&tape);
  tape.backward(loss);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.push_back(p.grad_vec());

  std::int64_t n_total = 0;
  for (auto& p : params) n_total += p.size();

  std::vector<std::pair<std::size_t, int>> coords;
  if (n_total <= total_coords) {
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
      for (int i = 0; i < params[pi].size(); ++i) coords.emplace_back(pi, i);
    }
  } else {
    for (int c = 0; c < total_coords; ++c) {
      std::int64_t flat = static_cast<std::int64_t>(
          rng.uniform() * static_cast<double>(n_total));
      if (flat >= n_total) flat = n_total - 1;
      std::size_t pi = 0;
      while (flat >= params[pi].size()) {
        flat -= params[pi].size();
        ++pi;
      }
      coords.emplace_back(pi, static_cast<int>(flat));
    }
  }

  Result r;
  for (auto [pi, idx] : coords) {
    Tensor& p = params[pi];
    const double orig = p.data()[idx];
    p.data()[idx] = orig + h;
    const double lp = loss_fn(nullptr).item();
    p.data()[idx] = orig - h;
    const double lm = loss_fn(nullptr).item();
    p.data()[idx] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    r.max_rel = std::max(r.max_rel, rel_err(analytic[pi][static_cast<std::size_t>(idx)], fd));
    r.checked += 1;
  }
  return r;
}

inline Tensor random_tensor(std::vector<int> shape, senselab::Rng& rng,
                            bool requires_grad = true, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape), requires_grad);
  for (int i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace gradcheck
