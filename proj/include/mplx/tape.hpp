#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mplx/common.hpp"
#include "mplx/tensor.hpp"

namespace mplx {

// ---------------------------------------------------------------------------
// Raw matmul kernels (accumulating). ikj order so the inner loop is contiguous.
// ---------------------------------------------------------------------------

/// C(m,n) += A(m,k) * B(k,n)
inline void mm_nn_acc(const double* A, const double* B, double* C,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    double* c = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[p];
      if (av == 0.0) continue;
      const double* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

/// C(m,k) += A(m,n) * B(k,n)^T
inline void mm_nt_acc(const double* A, const double* B, double* C,
                      std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * n;
    double* c = C + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* b = B + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[j];
      c[p] += acc;
    }
  }
}

/// C(k,n) += A(m,k)^T * B(m,n)
inline void mm_tn_acc(const double* A, const double* B, double* C,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    const double* b = B + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[p];
      if (av == 0.0) continue;
      double* c = C + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

enum class Activation { elu, tanh, sigmoid, relu };

inline Activation activation_from_string(const std::string& s) {
  if (s == "elu") return Activation::elu;
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "relu") return Activation::relu;
  throw ConfigError("unknown activation kind: " + s);
}

/// Handle into a Tape.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const { return id != std::numeric_limits<std::size_t>::max(); }
};

/// (receiver, sender) index pairs defining the edge ordering of an N-agent
/// fully connected digraph without self loops: row-major over receivers.
using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

inline EdgeList full_edge_list(std::size_t n) {
  EdgeList edges;
  edges.reserve(n * (n - 1));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s)
      if (s != r) edges.push_back({r, s});
  return edges;
}

/// Append-only reverse-mode autodiff tape. Single-threaded per tape; distinct
/// tapes may run concurrently.
class Tape {
 public:
  const Tensor& value(Var v) const { return node(v).value; }

  /// Gradient of the last backward() target w.r.t. v. Zero tensor when the
  /// node did not participate.
  Tensor grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.numel() == 0) return Tensor::zeros(n.value.shape);
    return n.grad;
  }

  std::size_t size() const { return nodes_.size(); }

  void clear() { nodes_.clear(); }

  Var leaf(Tensor t) {
    t.check_finite("Tape::leaf");
    bool rg = t.requires_grad;
    return push(std::move(t), rg, {});
  }

  Var constant(Tensor t) {
    t.requires_grad = false;
    return leaf(std::move(t));
  }

  // -- arithmetic -----------------------------------------------------------

  Var matmul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
      throw ShapeError("matmul: incompatible shapes " + shape_str(A.shape) +
                       " * " + shape_str(B.shape));
    std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    Tensor C = Tensor::zeros({m, n});
    mm_nn_acc(A.data.data(), B.data.data(), C.data.data(), m, k, n);
    return push(std::move(C), needs(a, b), [a, b, m, k, n](Tape& t, Node& out) {
      const double* dC = out.grad.data.data();
      if (t.wants_grad(a))
        mm_nt_acc(dC, t.value(b).data.data(), t.grad_buf(a), m, n, k);
      if (t.wants_grad(b))
        mm_tn_acc(t.value(a).data.data(), dC, t.grad_buf(b), m, k, n);
    });
  }

  Var add(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (!A.same_shape(B))
      throw ShapeError("add: shape mismatch " + shape_str(A.shape) + " vs " +
                       shape_str(B.shape));
    Tensor C = A;
    for (std::size_t i = 0; i < C.numel(); ++i) C.data[i] += B.data[i];
    return push(std::move(C), needs(a, b), [a, b](Tape& t, Node& out) {
      for (Var v : {a, b})
        if (t.wants_grad(v)) {
          double* g = t.grad_buf(v);
          for (std::size_t i = 0; i < out.grad.numel(); ++i)
            g[i] += out.grad.data[i];
        }
    });
  }

  /// x (m,n) + row vector b (broadcast over rows).
  Var add_bias(Var x, Var bias) {
    const Tensor& X = value(x);
    const Tensor& B = value(bias);
    if (X.rank() != 2 || B.numel() != X.cols())
      throw ShapeError("add_bias: bias length must equal column count");
    Tensor C = X;
    std::size_t m = X.rows(), n = X.cols();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) C.data[i * n + j] += B.data[j];
    return push(std::move(C), needs(x, bias), [x, bias, m, n](Tape& t, Node& out) {
      if (t.wants_grad(x)) {
        double* g = t.grad_buf(x);
        for (std::size_t i = 0; i < m * n; ++i) g[i] += out.grad.data[i];
      }
      if (t.wants_grad(bias)) {
        double* g = t.grad_buf(bias);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) g[j] += out.grad.data[i * n + j];
      }
    });
  }

  /// a*x + b, elementwise with scalar constants.
  Var affine(Var x, double a, double b) {
    Tensor C = value(x);
    for (auto& v : C.data) v = a * v + b;
    return push(std::move(C), needs(x), [x, a](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      for (std::size_t i = 0; i < out.grad.numel(); ++i)
        g[i] += a * out.grad.data[i];
    });
  }

  Var scale(Var x, double a) { return affine(x, a, 0.0); }

  Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

  Var mul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (!A.same_shape(B)) throw ShapeError("mul: shape mismatch");
    Tensor C = A;
    for (std::size_t i = 0; i < C.numel(); ++i) C.data[i] *= B.data[i];
    return push(std::move(C), needs(a, b), [a, b](Tape& t, Node& out) {
      if (t.wants_grad(a)) {
        double* g = t.grad_buf(a);
        const auto& bv = t.value(b).data;
        for (std::size_t i = 0; i < out.grad.numel(); ++i)
          g[i] += out.grad.data[i] * bv[i];
      }
      if (t.wants_grad(b)) {
        double* g = t.grad_buf(b);
        const auto& av = t.value(a).data;
        for (std::size_t i = 0; i < out.grad.numel(); ++i)
          g[i] += out.grad.data[i] * av[i];
      }
    });
  }

  Var apply_activation(Var x, Activation kind) {
    const Tensor& X = value(x);
    Tensor Y = X;
    switch (kind) {
      case Activation::elu:
        for (auto& v : Y.data) v = v > 0.0 ? v : std::expm1(v);
        break;
      case Activation::tanh:
        for (auto& v : Y.data) v = std::tanh(v);
        break;
      case Activation::sigmoid:
        for (auto& v : Y.data) v = 1.0 / (1.0 + std::exp(-v));
        break;
      case Activation::relu:
        for (auto& v : Y.data) v = v > 0.0 ? v : 0.0;
        break;
    }
    return push(std::move(Y), needs(x), [x, kind](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      const auto& xv = t.value(x).data;
      const auto& yv = out.value.data;
      for (std::size_t i = 0; i < out.grad.numel(); ++i) {
        double d = 0.0;
        switch (kind) {
          case Activation::elu: d = xv[i] > 0.0 ? 1.0 : yv[i] + 1.0; break;
          case Activation::tanh: d = 1.0 - yv[i] * yv[i]; break;
          case Activation::sigmoid: d = yv[i] * (1.0 - yv[i]); break;
          case Activation::relu: d = xv[i] > 0.0 ? 1.0 : 0.0; break;
        }
        g[i] += d * out.grad.data[i];
      }
    });
  }

  // -- structure ------------------------------------------------------------

  Var concat_cols(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.rows() != B.rows())
      throw ShapeError("concat_cols: row counts differ");
    std::size_t m = A.rows(), p = A.cols(), q = B.cols();
    Tensor C = Tensor::zeros({m, p + q});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p; ++j) C.data[i * (p + q) + j] = A.data[i * p + j];
      for (std::size_t j = 0; j < q; ++j) C.data[i * (p + q) + p + j] = B.data[i * q + j];
    }
    return push(std::move(C), needs(a, b), [a, b, m, p, q](Tape& t, Node& out) {
      if (t.wants_grad(a)) {
        double* g = t.grad_buf(a);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < p; ++j)
            g[i * p + j] += out.grad.data[i * (p + q) + j];
      }
      if (t.wants_grad(b)) {
        double* g = t.grad_buf(b);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < q; ++j)
            g[i * q + j] += out.grad.data[i * (p + q) + p + j];
      }
    });
  }

  Var gather_rows(Var x, std::vector<std::size_t> idx) {
    const Tensor& X = value(x);
    if (X.rank() != 2) throw ShapeError("gather_rows: 2-D input required");
    std::size_t n = X.cols();
    Tensor Y = Tensor::zeros({idx.size(), n});
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= X.rows()) throw ShapeError("gather_rows: index out of range");
      for (std::size_t j = 0; j < n; ++j)
        Y.data[i * n + j] = X.data[idx[i] * n + j];
    }
    auto shared = std::make_shared<std::vector<std::size_t>>(std::move(idx));
    return push(std::move(Y), needs(x), [x, shared, n](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      const auto& rows = *shared;
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j)
          g[rows[i] * n + j] += out.grad.data[i * n + j];
    });
  }

  /// Extracts column j of a 2-D tensor as (m,1).
  Var column(Var x, std::size_t j) {
    const Tensor& X = value(x);
    std::size_t m = X.rows(), n = X.cols();
    if (j >= n) throw ShapeError("column: index out of range");
    Tensor Y = Tensor::zeros({m, 1});
    for (std::size_t i = 0; i < m; ++i) Y.data[i] = X.data[i * n + j];
    return push(std::move(Y), needs(x), [x, j, m, n](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      for (std::size_t i = 0; i < m; ++i) g[i * n + j] += out.grad.data[i];
    });
  }

  /// Scatters per-edge scalars (E,1) into an N x N matrix with zero diagonal.
  Var edges_to_matrix(Var e, const EdgeList& edges, std::size_t n) {
    const Tensor& E = value(e);
    if (E.rank() != 2 || E.cols() != 1 || E.rows() != edges.size())
      throw ShapeError("edges_to_matrix: expected (|edges|,1) input");
    Tensor M = Tensor::zeros({n, n});
    for (std::size_t k = 0; k < edges.size(); ++k)
      M.data[edges[k].first * n + edges[k].second] = E.data[k];
    auto shared = std::make_shared<EdgeList>(edges);
    return push(std::move(M), needs(e), [e, shared, n](Tape& t, Node& out) {
      if (!t.wants_grad(e)) return;
      double* g = t.grad_buf(e);
      const auto& es = *shared;
      for (std::size_t k = 0; k < es.size(); ++k)
        g[k] += out.grad.data[es[k].first * n + es[k].second];
    });
  }

  /// Weighted message aggregation: out[r,:] = sum over edges (r,s) of
  /// W(r,s) * M[edge,:]. Gradients flow into both M and W.
  Var graph_aggregate(Var msgs, Var weights, const EdgeList& edges, std::size_t n) {
    const Tensor& M = value(msgs);
    const Tensor& W = value(weights);
    if (M.rank() != 2 || M.rows() != edges.size())
      throw ShapeError("graph_aggregate: message rows must match edge count");
    if (W.rank() != 2 || W.rows() != n || W.cols() != n)
      throw ShapeError("graph_aggregate: weights must be N x N");
    std::size_t h = M.cols();
    Tensor out = Tensor::zeros({n, h});
    for (std::size_t k = 0; k < edges.size(); ++k) {
      auto [r, s] = edges[k];
      double w = W.data[r * n + s];
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < h; ++j)
        out.data[r * h + j] += w * M.data[k * h + j];
    }
    auto shared = std::make_shared<EdgeList>(edges);
    return push(std::move(out), needs(msgs, weights),
                [msgs, weights, shared, n, h](Tape& t, Node& out_node) {
      const auto& es = *shared;
      const auto& W = t.value(weights);
      const auto& M = t.value(msgs);
      const auto& dOut = out_node.grad.data;
      if (t.wants_grad(msgs)) {
        double* g = t.grad_buf(msgs);
        for (std::size_t k = 0; k < es.size(); ++k) {
          auto [r, s] = es[k];
          double w = W.data[r * n + s];
          for (std::size_t j = 0; j < h; ++j)
            g[k * h + j] += w * dOut[r * h + j];
        }
      }
      if (t.wants_grad(weights)) {
        double* g = t.grad_buf(weights);
        for (std::size_t k = 0; k < es.size(); ++k) {
          auto [r, s] = es[k];
          double acc = 0.0;
          for (std::size_t j = 0; j < h; ++j)
            acc += M.data[k * h + j] * dOut[r * h + j];
          g[r * n + s] += acc;
        }
      }
    });
  }

  // -- normalization --------------------------------------------------------

  /// Softmax along `axis`; masked entries (mask == 0) output exactly 0 and
  /// are excluded from the normalization. Throws on a fully masked slice.
  Var softmax_axis(Var x, std::size_t axis, std::optional<Tensor> mask = {}) {
    const Tensor& X = value(x);
    if (axis >= X.rank()) throw ShapeError("softmax_axis: axis out of range");
    if (mask && mask->shape != X.shape)
      throw ShapeError("softmax_axis: mask shape mismatch");
    std::size_t len = X.shape[axis];
    std::size_t inner = 1, outer = 1;
    for (std::size_t d = axis + 1; d < X.rank(); ++d) inner *= X.shape[d];
    for (std::size_t d = 0; d < axis; ++d) outer *= X.shape[d];

    const double* mk = mask ? mask->data.data() : nullptr;
    Tensor Y = Tensor::zeros(X.shape);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t t = 0; t < len; ++t) {
          std::size_t ix = (o * len + t) * inner + i;
          if (mk && mk[ix] == 0.0) continue;
          any = true;
          mx = std::max(mx, X.data[ix]);
        }
        if (!any)
          throw NumericError("softmax_axis: fully masked slice");
        double z = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
          std::size_t ix = (o * len + t) * inner + i;
          if (mk && mk[ix] == 0.0) continue;
          Y.data[ix] = std::exp(X.data[ix] - mx);
          z += Y.data[ix];
        }
        for (std::size_t t = 0; t < len; ++t) {
          std::size_t ix = (o * len + t) * inner + i;
          if (mk && mk[ix] == 0.0) continue;
          Y.data[ix] /= z;
        }
      }
    }
    auto shared_mask = mask ? std::make_shared<Tensor>(std::move(*mask)) : nullptr;
    return push(std::move(Y), needs(x),
                [x, shared_mask, len, inner, outer](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      const auto& y = out.value.data;
      const auto& dy = out.grad.data;
      const double* mk = shared_mask ? shared_mask->data.data() : nullptr;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
          double dot = 0.0;
          for (std::size_t s = 0; s < len; ++s) {
            std::size_t ix = (o * len + s) * inner + i;
            if (mk && mk[ix] == 0.0) continue;
            dot += dy[ix] * y[ix];
          }
          for (std::size_t s = 0; s < len; ++s) {
            std::size_t ix = (o * len + s) * inner + i;
            if (mk && mk[ix] == 0.0) continue;
            g[ix] += y[ix] * (dy[ix] - dot);
          }
        }
      }
    });
  }

  // -- reductions -----------------------------------------------------------

  Var sum(Var x) {
    const Tensor& X = value(x);
    double s = 0.0;
    for (double v : X.data) s += v;
    return push(Tensor::scalar(s), needs(x), [x](Tape& t, Node& out) {
      if (!t.wants_grad(x)) return;
      double* g = t.grad_buf(x);
      double d = out.grad.data[0];
      for (std::size_t i = 0; i < t.value(x).numel(); ++i) g[i] += d;
    });
  }

  Var mean(Var x) { return scale(sum(x), 1.0 / static_cast<double>(value(x).numel())); }

  /// Mean squared error, mean over all entries.
  Var mse(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (!A.same_shape(B)) throw ShapeError("mse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < A.numel(); ++i) {
      double d = A.data[i] - B.data[i];
      s += d * d;
    }
    double inv_n = 1.0 / static_cast<double>(A.numel());
    return push(Tensor::scalar(s * inv_n), needs(a, b),
                [a, b, inv_n](Tape& t, Node& out) {
      const auto& av = t.value(a).data;
      const auto& bv = t.value(b).data;
      double d0 = 2.0 * inv_n * out.grad.data[0];
      if (t.wants_grad(a)) {
        double* g = t.grad_buf(a);
        for (std::size_t i = 0; i < av.size(); ++i) g[i] += d0 * (av[i] - bv[i]);
      }
      if (t.wants_grad(b)) {
        double* g = t.grad_buf(b);
        for (std::size_t i = 0; i < av.size(); ++i) g[i] -= d0 * (av[i] - bv[i]);
      }
    });
  }

  // -- backward -------------------------------------------------------------

  /// Reverse sweep from a scalar loss. Grad buffers stay readable until the
  /// next forward op or clear().
  void backward(Var loss) {
    Node& ln = node(loss);
    if (ln.value.numel() != 1)
      throw ShapeError("backward: loss must be scalar");
    for (std::size_t i = 0; i <= loss.id; ++i)
      nodes_[i].grad = Tensor();
    ln.grad = Tensor::scalar(1.0);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || !n.backprop) continue;
      if (n.grad.numel() == 0) continue;  // never reached from the loss
      n.backprop(*this, n);
    }
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&, Node&)> backprop;
  };

  Node& node(Var v) {
    if (!v.valid() || v.id >= nodes_.size())
      throw ShapeError("Tape: invalid var");
    return nodes_[v.id];
  }
  const Node& node(Var v) const {
    if (!v.valid() || v.id >= nodes_.size())
      throw ShapeError("Tape: invalid var");
    return nodes_[v.id];
  }

  bool wants_grad(Var v) const { return node(v).requires_grad; }

  /// Lazily allocated gradient accumulation buffer for node v.
  double* grad_buf(Var v) {
    Node& n = node(v);
    if (n.grad.numel() == 0) n.grad = Tensor::zeros(n.value.shape);
    return n.grad.data.data();
  }

  bool needs(Var a) const { return wants_grad(a); }
  bool needs(Var a, Var b) const { return wants_grad(a) || wants_grad(b); }

  Var push(Tensor value, bool requires_grad,
           std::function<void(Tape&, Node&)> backprop) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.backprop = requires_grad ? std::move(backprop) : nullptr;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  std::vector<Node> nodes_;
};

}  // namespace mplx
