#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace senselab::nn {

// Dense row-major double tensor. Copies are shallow: they alias the same
// storage, so a Tensor behaves like a handle to a (value, grad) buffer pair.
// Gradient buffers exist only when requires_grad is set and always match the
// value shape.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<int> shape, double fill, bool requires_grad = false);

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor ones(std::vector<int> shape, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                          bool requires_grad = false);

  bool defined() const { return st_ != nullptr; }
  const std::vector<int>& shape() const { return st_->shape; }
  int rank() const { return static_cast<int>(st_->shape.size()); }
  int dim(int i) const { return st_->shape[static_cast<std::size_t>(i)]; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(st_->data.size());
  }
  std::string shape_str() const;

  double* data() { return st_->data.data(); }
  const double* data() const { return st_->data.data(); }
  std::vector<double>& vec() { return st_->data; }
  const std::vector<double>& vec() const { return st_->data; }

  // Element access for ranks 1..3.
  double& operator()(int i) { return st_->data[static_cast<std::size_t>(i)]; }
  double operator()(int i) const {
    return st_->data[static_cast<std::size_t>(i)];
  }
  double& operator()(int i, int j) {
    return st_->data[static_cast<std::size_t>(i) *
                         static_cast<std::size_t>(st_->shape[1]) +
                     static_cast<std::size_t>(j)];
  }
  double operator()(int i, int j) const {
    return st_->data[static_cast<std::size_t>(i) *
                         static_cast<std::size_t>(st_->shape[1]) +
                     static_cast<std::size_t>(j)];
  }
  double& operator()(int i, int j, int k) {
    return st_->data[(static_cast<std::size_t>(i) *
                          static_cast<std::size_t>(st_->shape[1]) +
                      static_cast<std::size_t>(j)) *
                         static_cast<std::size_t>(st_->shape[2]) +
                     static_cast<std::size_t>(k)];
  }
  double operator()(int i, int j, int k) const {
    return st_->data[(static_cast<std::size_t>(i) *
                          static_cast<std::size_t>(st_->shape[1]) +
                      static_cast<std::size_t>(j)) *
                         static_cast<std::size_t>(st_->shape[2]) +
                     static_cast<std::size_t>(k)];
  }

  // Scalar value; tensor must have exactly one element.
  double item() const;

  bool requires_grad() const { return st_ && st_->requires_grad; }
  Tensor& set_requires_grad(bool rg);

  double* grad() { return st_->grad.data(); }
  const double* grad() const { return st_->grad.data(); }
  std::vector<double>& grad_vec() { return st_->grad; }
  const std::vector<double>& grad_vec() const { return st_->grad; }
  void zero_grad();

  // Deep copy of values only (fresh storage, no grad, requires_grad off).
  Tensor detached_copy() const;

  // Identity of the underlying storage; used to deduplicate parameter lists.
  const void* storage_id() const { return st_.get(); }

  void check_finite(const char* where) const;

 private:
  struct Storage {
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Storage> st_;
};

// Execution record for reverse-mode differentiation. Ops append one backward
// closure per executed node; closures run once, in reverse order. A tape is
// confined to a single thread.
class Tape {
 public:
  void record(std::function<void()> fn) { nodes_.push_back(std::move(fn)); }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape backwards, accumulating
  // gradients into every requires_grad tensor that participated.
  void backward(Tensor& loss);

 private:
  std::vector<std::function<void()>> nodes_;
};

}  // namespace senselab::nn
