#pragma once

#include <map>
#include <string>
#include <vector>

#include "mplx/params.hpp"
#include "mplx/rng.hpp"
#include "mplx/tape.hpp"

namespace mplx {

/// Per-tape view of a ParamStore: binds parameters as tape leaves on first
/// use. In training mode frozen parameters are bound without gradient, which
/// is what makes frozen-stage gradients structurally zero.
class ParamBinding {
 public:
  ParamBinding(Tape& tape, ParamStore& store, bool training)
      : tape_(tape), store_(store), training_(training) {}

  Var operator()(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    Tensor t = store_.get(name);
    t.requires_grad = training_ && !store_.frozen(name);
    Var v = tape_.leaf(std::move(t));
    vars_.emplace(name, v);
    return v;
  }

  /// Uses `v` in place of the stored parameter `name` (gradient probes,
  /// what-if evaluation). Must be called before the parameter's first use.
  void substitute(const std::string& name, Var v) {
    if (!vars_.emplace(name, v).second)
      throw ConfigError("substitute: parameter already bound: " + name);
  }

  /// Gradients of every bound trainable parameter, after tape.backward().
  std::map<std::string, Tensor> grads() const {
    std::map<std::string, Tensor> out;
    for (const auto& [name, v] : vars_)
      if (tape_.value(v).requires_grad) out[name] = tape_.grad(v);
    return out;
  }

  ParamStore& store() { return store_; }
  Tape& tape() { return tape_; }

  /// Arms inverted dropout on hidden activations for this binding's forward
  /// passes. Masks are drawn from `rng` in evaluation order, so a fixed seed
  /// gives a fixed stream; inference bindings simply never arm it.
  void enable_dropout(double rate, Rng* rng) {
    if (rate < 0.0 || rate >= 1.0)
      throw ConfigError("enable_dropout: rate must be in [0,1)");
    dropout_rate_ = rate;
    dropout_rng_ = rate > 0.0 ? rng : nullptr;
  }

  bool dropout_armed() const { return training_ && dropout_rng_ != nullptr; }

  /// x with each entry zeroed with probability `rate` and survivors scaled by
  /// 1/(1-rate); the mask is a tape constant, so gradients stay exact.
  Var apply_dropout(Var x) {
    const Tensor& v = tape_.value(x);
    Tensor mask = Tensor::zeros(v.shape);
    const double keep = 1.0 - dropout_rate_;
    for (auto& e : mask.data)
      if (dropout_rng_->uniform(0.0, 1.0) < keep) e = 1.0 / keep;
    return tape_.mul(x, tape_.constant(std::move(mask)));
  }

 private:
  Tape& tape_;
  ParamStore& store_;
  bool training_;
  double dropout_rate_ = 0.0;
  Rng* dropout_rng_ = nullptr;
  std::map<std::string, Var> vars_;
};

/// Registers an MLP "<prefix>.{i}.{W|b}" with the given layer widths.
/// Weights are uniform fan-in scaled, biases zero.
inline void init_mlp(ParamStore& store, Rng& rng, const std::string& prefix,
                     const std::vector<std::size_t>& dims) {
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    std::size_t in = dims[i], out = dims[i + 1];
    Tensor w = Tensor::zeros({in, out});
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& v : w.data) v = rng.uniform(-bound, bound);
    store.add(prefix + "." + std::to_string(i) + ".W", std::move(w));
    store.add(prefix + "." + std::to_string(i) + ".b", Tensor::zeros({out}));
  }
}

/// x -> layers of (xW + b) with ELU between; the last layer is linear when
/// final_linear is set, otherwise also ELU.
inline Var mlp_forward(ParamBinding& p, Var x, const std::string& prefix,
                       std::size_t n_layers, bool final_linear,
                       Activation act = Activation::elu) {
  Tape& t = p.tape();
  for (std::size_t i = 0; i < n_layers; ++i) {
    std::string base = prefix + "." + std::to_string(i);
    x = t.add_bias(t.matmul(x, p(base + ".W")), p(base + ".b"));
    if (i + 1 < n_layers || !final_linear) {
      x = t.apply_activation(x, act);
      if (i + 1 < n_layers && p.dropout_armed()) x = p.apply_dropout(x);
    }
  }
  return x;
}

}  // namespace mplx
