#pragma once

namespace drlab::nn {

struct BoxedDelta {
  double delta = 0.0;
  double value = 0.0;
};

/// Clamps a requested perturbation of x to [-eps, eps] and keeps x + delta
/// inside [lo, hi], with the guarantees holding exactly in floating point:
/// |result.delta| <= eps, result.value in [lo, hi], and result.delta equals
/// result.value - x as evaluated in doubles. Requires x inside [lo, hi].
BoxedDelta project_step(double x, double requested_delta, double eps, double lo, double hi);

}  // namespace drlab::nn
