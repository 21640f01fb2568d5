#pragma once

#include "drlab/nn/network.hpp"

namespace drlab::nn {

/// Adam with bias correction, one moment pair per parameter.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  /// Applies one descent step. Moment buffers are allocated on first use and
  /// must keep seeing the same network shape afterwards.
  void step(DenseNetwork& net, const std::vector<LayerGrad>& gradients);

  void set_learning_rate(double lr) { lr_ = lr; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<LayerGrad> m_, v_;
};

}  // namespace drlab::nn
