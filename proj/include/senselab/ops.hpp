#pragma once

#include <vector>

#include "senselab/rng.hpp"
#include "senselab/tensor.hpp"

namespace senselab::nn {

// All ops follow the same contract: pass a Tape to record backward closures
// (training), or nullptr for plain evaluation. An op records a node only when
// at least one input requires grad; the output then requires grad as well.

// Elementwise binaries. Shapes must be equal, or one operand must be a
// scalar (single element) which broadcasts against the other.
Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape* tape, const Tensor& a, const Tensor& b);

Tensor tanh_op(Tape* tape, const Tensor& x);
Tensor sigmoid(Tape* tape, const Tensor& x);
Tensor relu(Tape* tape, const Tensor& x);

// x * c for a plain constant (no grad w.r.t. c).
Tensor scale(Tape* tape, const Tensor& x, double c);

// (m x k)·(k x n) -> m x n. Rank-1 operands are accepted as a column (rhs)
// or row (lhs) vector and return rank-1 results.
Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b);

// Numerically stable softmax along `axis` (default: last). Rank 1 or 2.
Tensor softmax(Tape* tape, const Tensor& x, int axis = -1);

// Valid cross-correlation over the length axis. input d x k, filters
// f x d x w, optional bias of length f; output f x (k-w+1).
Tensor conv1d(Tape* tape, const Tensor& input, const Tensor& filters,
              const Tensor& bias = Tensor());

// Per-row max over positions of an f x L input -> length-f vector. Gradient
// flows to the first (lowest-index) argmax of each row.
Tensor maxpool_over_time(Tape* tape, const Tensor& input);

// -log softmax(logits)[gold] for a rank-1 logit vector.
Tensor cross_entropy(Tape* tape, const Tensor& logits, int gold);

// Structural ops (rank-1 unless noted).
Tensor concat(Tape* tape, const Tensor& a, const Tensor& b);
Tensor slice(Tape* tape, const Tensor& x, int offset, int len);
Tensor stack_cols(Tape* tape, const std::vector<Tensor>& cols);  // n x T
Tensor transpose(Tape* tape, const Tensor& x);                   // rank 2
Tensor row(Tape* tape, const Tensor& table, int r);  // gather row of a matrix
Tensor sum_all(Tape* tape, const Tensor& x);         // scalar
Tensor average(Tape* tape, const std::vector<Tensor>& scalars);  // scalar

// Inverted dropout with keep-scale 1/(1-p). p == 0 is the identity.
Tensor dropout(Tape* tape, const Tensor& x, double p, Rng& rng);

}  // namespace senselab::nn
