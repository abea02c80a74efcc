#include "senselab/optim.hpp"

#include <cmath>

#include "senselab/error.hpp"

namespace senselab::nn {

void sgd_step(Tensor& param, const Tensor& grad, double lr) {
  if (param.shape() != grad.shape()) {
    throw DimensionError("sgd_step: param " + param.shape_str() +
                         " vs grad " + grad.shape_str());
  }
  double* p = param.data();
  const double* g = grad.data();
  const std::size_t n = static_cast<std::size_t>(param.size());
  for (std::size_t i = 0; i < n; ++i) p[i] -= lr * g[i];
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& cfg) {
  if (param.shape() != grad.shape()) {
    throw DimensionError("adam_step: param " + param.shape_str() +
                         " vs grad " + grad.shape_str());
  }
  const std::size_t n = static_cast<std::size_t>(param.size());
  if (state.m.size() != n) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.t = 0;
  }
  state.t += 1;
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  double* p = param.data();
  const double* g = grad.data();
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

double global_grad_norm(const std::vector<Tensor>& params) {
  double sq = 0.0;
  for (const Tensor& p : params) {
    if (!p.requires_grad()) continue;
    const double* g = p.grad();
    const std::size_t n = static_cast<std::size_t>(p.size());
    for (std::size_t i = 0; i < n; ++i) sq += g[i] * g[i];
  }
  return std::sqrt(sq);
}

void clip_global_norm(std::vector<Tensor>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm <= max_norm || norm == 0.0) return;
  const double s = max_norm / norm;
  for (Tensor& p : params) {
    if (!p.requires_grad()) continue;
    double* g = p.grad();
    const std::size_t n = static_cast<std::size_t>(p.size());
    for (std::size_t i = 0; i < n; ++i) g[i] *= s;
  }
}

void Sgd::step() {
  for (Tensor& p : params_) {
    double* pv = p.data();
    const double* g = p.grad();
    const std::size_t n = static_cast<std::size_t>(p.size());
    for (std::size_t i = 0; i < n; ++i) pv[i] -= lr_ * g[i];
  }
}

void Sgd::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), states_(params_.size()), cfg_(cfg) {}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    AdamState& st = states_[i];
    const std::size_t n = static_cast<std::size_t>(p.size());
    if (st.m.size() != n) {
      st.m.assign(n, 0.0);
      st.v.assign(n, 0.0);
      st.t = 0;
    }
    st.t += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(st.t));
    double* pv = p.data();
    const double* g = p.grad();
    for (std::size_t j = 0; j < n; ++j) {
      st.m[j] = cfg_.beta1 * st.m[j] + (1.0 - cfg_.beta1) * g[j];
      st.v[j] = cfg_.beta2 * st.v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      pv[j] -= cfg_.lr * (st.m[j] / bc1) / (std::sqrt(st.v[j] / bc2) + cfg_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

}  // namespace senselab::nn
