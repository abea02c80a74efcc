#pragma once

#include <utility>
#include <vector>

#include "senselab/ops.hpp"
#include "senselab/rng.hpp"
#include "senselab/tensor.hpp"

namespace senselab::nn {

// Standard LSTM cell. Gate pre-activations are one fused affine map
// W [x; h] + b with i|f|g|o blocks, so W is (4H) x (input + H).
struct LstmCell {
  Tensor w;
  Tensor b;
  int input_dim = 0;
  int hidden_dim = 0;

  // uniform(-0.08, 0.08) weights, zero bias except forget gate at +1.
  static LstmCell create(int input_dim, int hidden_dim, Rng& rng,
                         bool requires_grad = true);

  std::pair<Tensor, Tensor> step(Tape* tape, const Tensor& x, const Tensor& h,
                                 const Tensor& c) const;

  std::vector<Tensor> params() const { return {w, b}; }
};

// Hidden states over the sequence, one per input, left to right.
std::vector<Tensor> run_lstm(Tape* tape, const LstmCell& cell,
                             const std::vector<Tensor>& inputs);

// Right-to-left pass; result stays indexed by original positions, so
// result[t] has consumed inputs t..T-1.
std::vector<Tensor> run_lstm_reverse(Tape* tape, const LstmCell& cell,
                                     const std::vector<Tensor>& inputs);

}  // namespace senselab::nn
