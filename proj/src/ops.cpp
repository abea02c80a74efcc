#include "senselab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "senselab/error.hpp"

namespace senselab::nn {

namespace {

bool want_grad(Tape* tape, const Tensor& t) {
  return tape != nullptr && t.requires_grad();
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw DimensionError(std::string(op) + ": empty input");
}

// Broadcast layout for binaries: equal shapes, or exactly one scalar side.
enum class Bcast { Equal, ScalarLeft, ScalarRight };

Bcast binary_layout(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Bcast::Equal;
  if (a.size() == 1) return Bcast::ScalarLeft;
  if (b.size() == 1) return Bcast::ScalarRight;
  throw DimensionError(std::string(op) + ": incompatible shapes " +
                       a.shape_str() + " vs " + b.shape_str());
}

}  // namespace

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
  require_defined(a, "add");
  require_defined(b, "add");
  Bcast layout = binary_layout(a, b, "add");
  const Tensor& big = (layout == Bcast::ScalarLeft) ? b : a;
  Tensor out = Tensor::zeros(big.shape());
  const std::size_t n = static_cast<std::size_t>(big.size());
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  switch (layout) {
    case Bcast::Equal:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
      break;
    case Bcast::ScalarLeft:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[0] + pb[i];
      break;
    case Bcast::ScalarRight:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] + pb[0];
      break;
  }
  if (want_grad(tape, a) || want_grad(tape, b)) {
    out.set_requires_grad(true);
    Tensor A = a, B = b, O = out;
    tape->record([A, B, O, layout, n]() mutable {
      const double* g = O.grad();
      if (A.requires_grad()) {
        double* ga = A.grad();
        if (layout == Bcast::ScalarLeft) {
          for (std::size_t i = 0; i < n; ++i) ga[0] += g[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        }
      }
      if (B.requires_grad()) {
        double* gb = B.grad();
        if (layout == Bcast::ScalarRight) {
          for (std::size_t i = 0; i < n; ++i) gb[0] += g[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
        }
      }
    });
  }
  return out;
}

Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) {
  require_defined(a, "sub");
  require_defined(b, "sub");
  Bcast layout = binary_layout(a, b, "sub");
  const Tensor& big = (layout == Bcast::ScalarLeft) ? b : a;
  Tensor out = Tensor::zeros(big.shape());
  const std::size_t n = static_cast<std::size_t>(big.size());
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  switch (layout) {
    case Bcast::Equal:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] - pb[i];
      break;
    case Bcast::ScalarLeft:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[0] - pb[i];
      break;
    case Bcast::ScalarRight:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] - pb[0];
      break;
  }
  if (want_grad(tape, a) || want_grad(tape, b)) {
    out.set_requires_grad(true);
    Tensor A = a, B = b, O = out;
    tape->record([A, B, O, layout, n]() mutable {
      const double* g = O.grad();
      if (A.requires_grad()) {
        double* ga = A.grad();
        if (layout == Bcast::ScalarLeft) {
          for (std::size_t i = 0; i < n; ++i) ga[0] += g[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        }
      }
      if (B.requires_grad()) {
        double* gb = B.grad();
        if (layout == Bcast::ScalarRight) {
          for (std::size_t i = 0; i < n; ++i) gb[0] -= g[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) gb[i] -= g[i];
        }
      }
    });
  }
  return out;
}

Tensor mul(Tape* tape, const Tensor& a, const Tensor& b) {
  require_defined(a, "mul");
  require_defined(b, "mul");
  Bcast layout = binary_layout(a, b, "mul");
  const Tensor& big = (layout == Bcast::ScalarLeft) ? b : a;
  Tensor out = Tensor::zeros(big.shape());
  const std::size_t n = static_cast<std::size_t>(big.size());
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  switch (layout) {
    case Bcast::Equal:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
      break;
    case Bcast::ScalarLeft:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[0] * pb[i];
      break;
    case Bcast::ScalarRight:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] * pb[0];
      break;
  }
  if (want_grad(tape, a) || want_grad(tape, b)) {
    out.set_requires_grad(true);
    Tensor A = a, B = b, O = out;
    tape->record([A, B, O, layout, n]() mutable {
      const double* g = O.grad();
      const double* pa2 = A.data();
      const double* pb2 = B.data();
      if (A.requires_grad()) {
        double* ga = A.grad();
        switch (layout) {
          case Bcast::Equal:
            for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * pb2[i];
            break;
          case Bcast::ScalarLeft:
            for (std::size_t i = 0; i < n; ++i) ga[0] += g[i] * pb2[i];
            break;
          case Bcast::ScalarRight:
            for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * pb2[0];
            break;
        }
      }
      if (B.requires_grad()) {
        double* gb = B.grad();
        switch (layout) {
          case Bcast::Equal:
            for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * pa2[i];
            break;
          case Bcast::ScalarLeft:
            for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * pa2[0];
            break;
          case Bcast::ScalarRight:
            for (std::size_t i = 0; i < n; ++i) gb[0] += g[i] * pa2[i];
            break;
        }
      }
    });
  }
  return out;
}

namespace {

template <class Fwd, class Dfn>
Tensor unary_op(Tape* tape, const Tensor& x, const char* name, Fwd f, Dfn df) {
  require_defined(x, name);
  Tensor out = Tensor::zeros(x.shape());
  const std::size_t n = static_cast<std::size_t>(x.size());
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < n; ++i) po[i] = f(px[i]);
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, df, n]() mutable {
      const double* g = O.grad();
      const double* xv = X.data();
      const double* ov = O.data();
      double* gx = X.grad();
      for (std::size_t i = 0; i < n; ++i) gx[i] += g[i] * df(xv[i], ov[i]);
    });
  }
  return out;
}

}  // namespace

Tensor tanh_op(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, "tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, "sigmoid",
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(Tape* tape, const Tensor& x) {
  return unary_op(
      tape, x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor scale(Tape* tape, const Tensor& x, double c) {
  return unary_op(
      tape, x, "scale", [c](double v) { return v * c; },
      [c](double, double) { return c; });
}

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  if (a.rank() > 2 || b.rank() > 2 || (a_vec && b_vec)) {
    throw DimensionError("matmul: unsupported ranks " + a.shape_str() + " x " +
                         b.shape_str());
  }
  const int m = a_vec ? 1 : a.dim(0);
  const int ka = a_vec ? a.dim(0) : a.dim(1);
  const int kb = b_vec ? b.dim(0) : b.dim(0);
  const int n = b_vec ? 1 : b.dim(1);
  if (ka != kb) {
    throw DimensionError("matmul: inner dimensions differ: " + a.shape_str() +
                         " x " + b.shape_str());
  }
  const int k = ka;
  std::vector<int> out_shape;
  if (a_vec) {
    out_shape = {n};
  } else if (b_vec) {
    out_shape = {m};
  } else {
    out_shape = {m, n};
  }
  Tensor out = Tensor::zeros(out_shape);
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int i = 0; i < m; ++i) {
    for (int kk = 0; kk < k; ++kk) {
      const double av = pa[i * k + kk];
      if (av == 0.0) continue;
      const double* brow = pb + static_cast<std::size_t>(kk) * n;
      double* orow = po + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  if (want_grad(tape, a) || want_grad(tape, b)) {
    out.set_requires_grad(true);
    Tensor A = a, B = b, O = out;
    tape->record([A, B, O, m, n, k]() mutable {
      const double* g = O.grad();
      if (A.requires_grad()) {
        // dA = g . B^T
        double* ga = A.grad();
        const double* pb2 = B.data();
        for (int i = 0; i < m; ++i) {
          for (int kk = 0; kk < k; ++kk) {
            const double* brow = pb2 + static_cast<std::size_t>(kk) * n;
            const double* grow = g + static_cast<std::size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
            ga[i * k + kk] += acc;
          }
        }
      }
      if (B.requires_grad()) {
        // dB = A^T . g
        double* gb = B.grad();
        const double* pa2 = A.data();
        for (int i = 0; i < m; ++i) {
          const double* grow = g + static_cast<std::size_t>(i) * n;
          for (int kk = 0; kk < k; ++kk) {
            const double av = pa2[i * k + kk];
            if (av == 0.0) continue;
            double* gbrow = gb + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) gbrow[j] += av * grow[j];
          }
        }
      }
    });
  }
  return out;
}

Tensor softmax(Tape* tape, const Tensor& x, int axis) {
  require_defined(x, "softmax");
  if (x.rank() < 1 || x.rank() > 2) {
    throw DimensionError("softmax: rank must be 1 or 2, got " + x.shape_str());
  }
  if (axis < 0) axis += x.rank();
  if (axis < 0 || axis >= x.rank()) {
    throw DimensionError("softmax: invalid axis");
  }
  // View as (outer, len, stride): slices of length `len` spaced by `stride`.
  int len, n_slices, slice_step, elem_step;
  if (x.rank() == 1) {
    len = x.dim(0);
    n_slices = 1;
    slice_step = 0;
    elem_step = 1;
  } else if (axis == 1) {
    len = x.dim(1);
    n_slices = x.dim(0);
    slice_step = x.dim(1);
    elem_step = 1;
  } else {
    len = x.dim(0);
    n_slices = x.dim(1);
    slice_step = 1;
    elem_step = x.dim(1);
  }
  Tensor out = Tensor::zeros(x.shape());
  const double* px = x.data();
  double* po = out.data();
  for (int s = 0; s < n_slices; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) * slice_step;
    double mx = px[base];
    for (int i = 1; i < len; ++i) {
      mx = std::max(mx, px[base + static_cast<std::size_t>(i) * elem_step]);
    }
    double denom = 0.0;
    for (int i = 0; i < len; ++i) {
      const std::size_t idx = base + static_cast<std::size_t>(i) * elem_step;
      po[idx] = std::exp(px[idx] - mx);
      denom += po[idx];
    }
    for (int i = 0; i < len; ++i) {
      po[base + static_cast<std::size_t>(i) * elem_step] /= denom;
    }
  }
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, len, n_slices, slice_step, elem_step]() mutable {
      const double* g = O.grad();
      const double* y = O.data();
      double* gx = X.grad();
      for (int s = 0; s < n_slices; ++s) {
        const std::size_t base = static_cast<std::size_t>(s) * slice_step;
        double dot = 0.0;
        for (int i = 0; i < len; ++i) {
          const std::size_t idx = base + static_cast<std::size_t>(i) * elem_step;
          dot += g[idx] * y[idx];
        }
        for (int i = 0; i < len; ++i) {
          const std::size_t idx = base + static_cast<std::size_t>(i) * elem_step;
          gx[idx] += y[idx] * (g[idx] - dot);
        }
      }
    });
  }
  return out;
}

Tensor conv1d(Tape* tape, const Tensor& input, const Tensor& filters,
              const Tensor& bias) {
  require_defined(input, "conv1d");
  require_defined(filters, "conv1d");
  if (input.rank() != 2 || filters.rank() != 3) {
    throw DimensionError("conv1d: expected input d x k and filters f x d x w, got " +
                         input.shape_str() + " and " + filters.shape_str());
  }
  const int d = input.dim(0);
  const int k = input.dim(1);
  const int f = filters.dim(0);
  const int w = filters.dim(2);
  if (filters.dim(1) != d) {
    throw DimensionError("conv1d: channel mismatch: input " + input.shape_str() +
                         " vs filters " + filters.shape_str());
  }
  if (k < w) {
    throw DimensionError("conv1d: input length " + std::to_string(k) +
                         " < filter width " + std::to_string(w));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != f)) {
    throw DimensionError("conv1d: bias shape " + bias.shape_str() +
                         " does not match filter count " + std::to_string(f));
  }
  const int L = k - w + 1;
  Tensor out = Tensor::zeros({f, L});
  const double* pin = input.data();
  const double* pf = filters.data();
  double* po = out.data();
  for (int j = 0; j < f; ++j) {
    double* orow = po + static_cast<std::size_t>(j) * L;
    if (bias.defined()) {
      const double bj = bias(j);
      for (int p = 0; p < L; ++p) orow[p] = bj;
    }
    for (int c = 0; c < d; ++c) {
      const double* irow = pin + static_cast<std::size_t>(c) * k;
      const double* frow = pf + (static_cast<std::size_t>(j) * d + c) * w;
      for (int q = 0; q < w; ++q) {
        const double fv = frow[q];
        if (fv == 0.0) continue;
        for (int p = 0; p < L; ++p) orow[p] += fv * irow[p + q];
      }
    }
  }
  const bool rg = want_grad(tape, input) || want_grad(tape, filters) ||
                  (bias.defined() && want_grad(tape, bias));
  if (rg) {
    out.set_requires_grad(true);
    Tensor I = input, F = filters, B = bias, O = out;
    tape->record([I, F, B, O, d, k, f, w, L]() mutable {
      const double* g = O.grad();
      if (I.requires_grad()) {
        double* gi = I.grad();
        const double* pf2 = F.data();
        for (int j = 0; j < f; ++j) {
          const double* grow = g + static_cast<std::size_t>(j) * L;
          for (int c = 0; c < d; ++c) {
            double* girow = gi + static_cast<std::size_t>(c) * k;
            const double* frow = pf2 + (static_cast<std::size_t>(j) * d + c) * w;
            for (int q = 0; q < w; ++q) {
              const double fv = frow[q];
              if (fv == 0.0) continue;
              for (int p = 0; p < L; ++p) girow[p + q] += fv * grow[p];
            }
          }
        }
      }
      if (F.requires_grad()) {
        double* gf = F.grad();
        const double* pin2 = I.data();
        for (int j = 0; j < f; ++j) {
          const double* grow = g + static_cast<std::size_t>(j) * L;
          for (int c = 0; c < d; ++c) {
            const double* irow = pin2 + static_cast<std::size_t>(c) * k;
            double* gfrow = gf + (static_cast<std::size_t>(j) * d + c) * w;
            for (int q = 0; q < w; ++q) {
              double acc = 0.0;
              for (int p = 0; p < L; ++p) acc += grow[p] * irow[p + q];
              gfrow[q] += acc;
            }
          }
        }
      }
      if (B.defined() && B.requires_grad()) {
        double* gb = B.grad();
        for (int j = 0; j < f; ++j) {
          const double* grow = g + static_cast<std::size_t>(j) * L;
          double acc = 0.0;
          for (int p = 0; p < L; ++p) acc += grow[p];
          gb[j] += acc;
        }
      }
    });
  }
  return out;
}

Tensor maxpool_over_time(Tape* tape, const Tensor& input) {
  require_defined(input, "maxpool_over_time");
  if (input.rank() != 2) {
    throw DimensionError("maxpool_over_time: expected f x L input, got " +
                         input.shape_str());
  }
  const int f = input.dim(0);
  const int L = input.dim(1);
  Tensor out = Tensor::zeros({f});
  std::vector<int> argmax(static_cast<std::size_t>(f), 0);
  const double* pin = input.data();
  for (int j = 0; j < f; ++j) {
    const double* irow = pin + static_cast<std::size_t>(j) * L;
    int best = 0;
    for (int p = 1; p < L; ++p) {
      if (irow[p] > irow[best]) best = p;  // strict: ties keep lowest index
    }
    out(j) = irow[best];
    argmax[static_cast<std::size_t>(j)] = best;
  }
  if (want_grad(tape, input)) {
    out.set_requires_grad(true);
    Tensor I = input, O = out;
    tape->record([I, O, argmax, f, L]() mutable {
      const double* g = O.grad();
      double* gi = I.grad();
      for (int j = 0; j < f; ++j) {
        gi[static_cast<std::size_t>(j) * L + argmax[static_cast<std::size_t>(j)]] +=
            g[j];
      }
    });
  }
  return out;
}

Tensor cross_entropy(Tape* tape, const Tensor& logits, int gold) {
  require_defined(logits, "cross_entropy");
  if (logits.rank() != 1) {
    throw DimensionError("cross_entropy: logits must be rank 1, got " +
                         logits.shape_str());
  }
  const int c = logits.dim(0);
  if (gold < 0 || gold >= c) {
    throw LabelError("cross_entropy: gold label " + std::to_string(gold) +
                     " out of range [0, " + std::to_string(c) + ")");
  }
  const double* px = logits.data();
  double mx = px[0];
  for (int i = 1; i < c; ++i) mx = std::max(mx, px[i]);
  double denom = 0.0;
  for (int i = 0; i < c; ++i) denom += std::exp(px[i] - mx);
  const double lse = mx + std::log(denom);
  Tensor out = Tensor::scalar(lse - px[gold]);
  if (want_grad(tape, logits)) {
    out.set_requires_grad(true);
    Tensor X = logits, O = out;
    tape->record([X, O, gold, c, mx, denom]() mutable {
      const double g = O.grad()[0];
      const double* px2 = X.data();
      double* gx = X.grad();
      for (int i = 0; i < c; ++i) {
        double p = std::exp(px2[i] - mx) / denom;
        gx[i] += g * (p - (i == gold ? 1.0 : 0.0));
      }
    });
  }
  return out;
}

Tensor concat(Tape* tape, const Tensor& a, const Tensor& b) {
  require_defined(a, "concat");
  require_defined(b, "concat");
  if (a.rank() != 1 || b.rank() != 1) {
    throw DimensionError("concat: rank-1 operands required, got " +
                         a.shape_str() + " and " + b.shape_str());
  }
  const int na = a.dim(0);
  const int nb = b.dim(0);
  Tensor out = Tensor::zeros({na + nb});
  std::copy(a.data(), a.data() + na, out.data());
  std::copy(b.data(), b.data() + nb, out.data() + na);
  if (want_grad(tape, a) || want_grad(tape, b)) {
    out.set_requires_grad(true);
    Tensor A = a, B = b, O = out;
    tape->record([A, B, O, na, nb]() mutable {
      const double* g = O.grad();
      if (A.requires_grad()) {
        double* ga = A.grad();
        for (int i = 0; i < na; ++i) ga[i] += g[i];
      }
      if (B.requires_grad()) {
        double* gb = B.grad();
        for (int i = 0; i < nb; ++i) gb[i] += g[na + i];
      }
    });
  }
  return out;
}

Tensor slice(Tape* tape, const Tensor& x, int offset, int len) {
  require_defined(x, "slice");
  if (x.rank() != 1) {
    throw DimensionError("slice: rank-1 input required, got " + x.shape_str());
  }
  if (offset < 0 || len <= 0 || offset + len > x.dim(0)) {
    throw DimensionError("slice: range [" + std::to_string(offset) + ", " +
                         std::to_string(offset + len) + ") out of " +
                         x.shape_str());
  }
  Tensor out = Tensor::zeros({len});
  std::copy(x.data() + offset, x.data() + offset + len, out.data());
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, offset, len]() mutable {
      const double* g = O.grad();
      double* gx = X.grad();
      for (int i = 0; i < len; ++i) gx[offset + i] += g[i];
    });
  }
  return out;
}

Tensor stack_cols(Tape* tape, const std::vector<Tensor>& cols) {
  if (cols.empty()) throw DimensionError("stack_cols: no columns");
  const int n = cols[0].dim(0);
  const int t = static_cast<int>(cols.size());
  bool any_grad = false;
  for (const Tensor& c : cols) {
    require_defined(c, "stack_cols");
    if (c.rank() != 1 || c.dim(0) != n) {
      throw DimensionError("stack_cols: column shape " + c.shape_str() +
                           " does not match [" + std::to_string(n) + "]");
    }
    any_grad = any_grad || c.requires_grad();
  }
  Tensor out = Tensor::zeros({n, t});
  for (int j = 0; j < t; ++j) {
    const double* pc = cols[static_cast<std::size_t>(j)].data();
    for (int i = 0; i < n; ++i) out(i, j) = pc[i];
  }
  if (tape != nullptr && any_grad) {
    out.set_requires_grad(true);
    std::vector<Tensor> cs = cols;
    Tensor O = out;
    tape->record([cs, O, n, t]() mutable {
      const double* g = O.grad();
      for (int j = 0; j < t; ++j) {
        Tensor& c = cs[static_cast<std::size_t>(j)];
        if (!c.requires_grad()) continue;
        double* gc = c.grad();
        for (int i = 0; i < n; ++i) gc[i] += g[static_cast<std::size_t>(i) * t + j];
      }
    });
  }
  return out;
}

Tensor transpose(Tape* tape, const Tensor& x) {
  require_defined(x, "transpose");
  if (x.rank() != 2) {
    throw DimensionError("transpose: rank-2 input required, got " +
                         x.shape_str());
  }
  const int m = x.dim(0);
  const int n = x.dim(1);
  Tensor out = Tensor::zeros({n, m});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) out(j, i) = x(i, j);
  }
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, m, n]() mutable {
      const double* g = O.grad();
      double* gx = X.grad();
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          gx[static_cast<std::size_t>(i) * n + j] +=
              g[static_cast<std::size_t>(j) * m + i];
        }
      }
    });
  }
  return out;
}

Tensor row(Tape* tape, const Tensor& table, int r) {
  require_defined(table, "row");
  if (table.rank() != 2) {
    throw DimensionError("row: rank-2 table required, got " +
                         table.shape_str());
  }
  if (r < 0 || r >= table.dim(0)) {
    throw DimensionError("row: index " + std::to_string(r) + " out of " +
                         table.shape_str());
  }
  const int d = table.dim(1);
  Tensor out = Tensor::zeros({d});
  const double* src = table.data() + static_cast<std::size_t>(r) * d;
  std::copy(src, src + d, out.data());
  if (want_grad(tape, table)) {
    out.set_requires_grad(true);
    Tensor T = table, O = out;
    tape->record([T, O, r, d]() mutable {
      const double* g = O.grad();
      double* gt = T.grad() + static_cast<std::size_t>(r) * d;
      for (int i = 0; i < d; ++i) gt[i] += g[i];
    });
  }
  return out;
}

Tensor sum_all(Tape* tape, const Tensor& x) {
  require_defined(x, "sum");
  double acc = 0.0;
  const double* px = x.data();
  const std::size_t n = static_cast<std::size_t>(x.size());
  for (std::size_t i = 0; i < n; ++i) acc += px[i];
  Tensor out = Tensor::scalar(acc);
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, n]() mutable {
      const double g = O.grad()[0];
      double* gx = X.grad();
      for (std::size_t i = 0; i < n; ++i) gx[i] += g;
    });
  }
  return out;
}

Tensor average(Tape* tape, const std::vector<Tensor>& scalars) {
  if (scalars.empty()) throw DimensionError("average: no inputs");
  double acc = 0.0;
  bool any_grad = false;
  for (const Tensor& s : scalars) {
    if (s.size() != 1) {
      throw DimensionError("average: inputs must be scalars, got " +
                           s.shape_str());
    }
    acc += s.data()[0];
    any_grad = any_grad || s.requires_grad();
  }
  const double inv = 1.0 / static_cast<double>(scalars.size());
  Tensor out = Tensor::scalar(acc * inv);
  if (tape != nullptr && any_grad) {
    out.set_requires_grad(true);
    std::vector<Tensor> ss = scalars;
    Tensor O = out;
    tape->record([ss, O, inv]() mutable {
      const double g = O.grad()[0] * inv;
      for (Tensor& s : ss) {
        if (s.requires_grad()) s.grad()[0] += g;
      }
    });
  }
  return out;
}

Tensor dropout(Tape* tape, const Tensor& x, double p, Rng& rng) {
  require_defined(x, "dropout");
  if (p < 0.0 || p >= 1.0) {
    throw ConfigError("dropout: p must be in [0, 1), got " + std::to_string(p));
  }
  if (p == 0.0) return x;
  const std::size_t n = static_cast<std::size_t>(x.size());
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = (rng.uniform() >= p) ? keep_scale : 0.0;
  }
  Tensor out = Tensor::zeros(x.shape());
  const double* px = x.data();
  double* po = out.data();
  for (std::size_t i = 0; i < n; ++i) po[i] = px[i] * mask[i];
  if (want_grad(tape, x)) {
    out.set_requires_grad(true);
    Tensor X = x, O = out;
    tape->record([X, O, mask, n]() mutable {
      const double* g = O.grad();
      double* gx = X.grad();
      for (std::size_t i = 0; i < n; ++i) gx[i] += g[i] * mask[i];
    });
  }
  return out;
}

}  // namespace senselab::nn
