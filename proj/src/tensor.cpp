#include "senselab/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "senselab/error.hpp"

namespace senselab::nn {

namespace {
std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("tensor: non-positive dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape, double fill, bool requires_grad) {
  st_ = std::make_shared<Storage>();
  std::size_t n = shape_numel(shape);
  st_->shape = std::move(shape);
  st_->data.assign(n, fill);
  if (requires_grad) {
    st_->requires_grad = true;
    st_->grad.assign(n, 0.0);
  }
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return Tensor(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::ones(std::vector<int> shape, bool requires_grad) {
  return Tensor(std::move(shape), 1.0, requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data,
                         bool requires_grad) {
  std::size_t n = shape_numel(shape);
  if (n != data.size()) {
    throw DimensionError("tensor: data length " + std::to_string(data.size()) +
                         " does not match shape product " + std::to_string(n));
  }
  Tensor t;
  t.st_ = std::make_shared<Storage>();
  t.st_->shape = std::move(shape);
  t.st_->data = std::move(data);
  if (requires_grad) {
    t.st_->requires_grad = true;
    t.st_->grad.assign(n, 0.0);
  }
  return t;
}

std::string Tensor::shape_str() const {
  std::ostringstream ss;
  ss << "[";
  for (std::size_t i = 0; i < st_->shape.size(); ++i) {
    if (i) ss << "x";
    ss << st_->shape[i];
  }
  ss << "]";
  return ss.str();
}

double Tensor::item() const {
  if (!st_ || st_->data.size() != 1) {
    throw ContractError("item: tensor is not scalar");
  }
  return st_->data[0];
}

Tensor& Tensor::set_requires_grad(bool rg) {
  st_->requires_grad = rg;
  if (rg && st_->grad.size() != st_->data.size()) {
    st_->grad.assign(st_->data.size(), 0.0);
  }
  if (!rg) st_->grad.clear();
  return *this;
}

void Tensor::zero_grad() {
  if (st_->requires_grad) st_->grad.assign(st_->data.size(), 0.0);
}

Tensor Tensor::detached_copy() const {
  Tensor t;
  t.st_ = std::make_shared<Storage>();
  t.st_->shape = st_->shape;
  t.st_->data = st_->data;
  return t;
}

void Tensor::check_finite(const char* where) const {
  for (double v : st_->data) {
    if (!std::isfinite(v)) {
      throw DataError(std::string(where) + ": non-finite value");
    }
  }
}

void Tape::backward(Tensor& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward: loss must be scalar, got " +
                        loss.shape_str());
  }
  if (!loss.requires_grad()) {
    throw ContractError("backward: loss does not require grad");
  }
  loss.grad_vec()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    (*it)();
  }
}

}  // namespace senselab::nn
