#pragma once

#include <cstdint>
#include <vector>

#include "senselab/tensor.hpp"

namespace senselab::nn {

// Single-parameter update steps. Shapes of param and grad must agree.
void sgd_step(Tensor& param, const Tensor& grad, double lr);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& cfg);

// L2 norm of all gradients taken together; rescales in place when the norm
// exceeds max_norm.
double global_grad_norm(const std::vector<Tensor>& params);
void clip_global_norm(std::vector<Tensor>& params, double max_norm);

// Stateful optimizers over a fixed parameter list. step() consumes the
// gradients currently stored on the parameters.
class Sgd {
 public:
  Sgd(std::vector<Tensor> params, double lr) : params_(std::move(params)), lr_(lr) {}
  void step();
  void zero_grad();
  std::vector<Tensor>& params() { return params_; }

 private:
  std::vector<Tensor> params_;
  double lr_;
};

class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamConfig cfg = {});
  void step();
  void zero_grad();
  std::vector<Tensor>& params() { return params_; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamState> states_;
  AdamConfig cfg_;
};

}  // namespace senselab::nn
