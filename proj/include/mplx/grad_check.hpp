#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "mplx/tape.hpp"
#include "mplx/tensor.hpp"

namespace mplx {

/// Scalar-valued tensor function expressed as a tape program.
using TapeFn = std::function<Var(Tape&, Var)>;

/// Compares the analytic gradient of f at x against central finite
/// differences. Returns max over coordinates of
/// |analytic - numeric| / max(1, |analytic|).
inline double grad_check(const TapeFn& f, Tensor x, double h = 1e-5) {
  x.requires_grad = true;
  Tensor analytic;
  {
    Tape tape;
    Var xv = tape.leaf(x);
    Var loss = f(tape, xv);
    if (tape.value(loss).numel() != 1)
      throw ShapeError("grad_check: f must be scalar-valued");
    tape.backward(loss);
    analytic = tape.grad(xv);
  }
  auto eval = [&](const Tensor& at) {
    Tape tape;
    Tensor t = at;
    t.requires_grad = false;
    Var xv = tape.leaf(std::move(t));
    return tape.value(f(tape, xv)).item();
  };
  double worst = 0.0;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    double orig = probe.data[i];
    probe.data[i] = orig + h;
    double fp = eval(probe);
    probe.data[i] = orig - h;
    double fm = eval(probe);
    probe.data[i] = orig;
    double numeric = (fp - fm) / (2.0 * h);
    double a = analytic.data[i];
    double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace mplx
