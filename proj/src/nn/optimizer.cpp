#include "drlab/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace drlab::nn {

namespace {

void adam_update(double& param, double grad, double& m, double& v, double lr, double b1, double b2,
                 double eps, double bc1, double bc2) {
  m = b1 * m + (1.0 - b1) * grad;
  v = b2 * v + (1.0 - b2) * grad * grad;
  const double mhat = m / bc1;
  const double vhat = v / bc2;
  param -= lr * mhat / (std::sqrt(vhat) + eps);
}

}  // namespace

void AdamOptimizer::step(DenseNetwork& net, const std::vector<LayerGrad>& gradients) {
  if (gradients.size() != net.layer_count())
    throw std::invalid_argument("gradient layer count mismatch");
  if (m_.empty()) {
    m_ = zero_gradients(net);
    v_ = zero_gradients(net);
  }
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto& layers = net.mutable_layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Layer& l = layers[k];
    const LayerGrad& g = gradients[k];
    if (g.weight.data.size() != l.weight.data.size() || g.bias.size() != l.bias.size())
      throw std::invalid_argument("gradient shape mismatch at layer " + std::to_string(k));
    for (std::size_t i = 0; i < l.weight.data.size(); ++i)
      adam_update(l.weight.data[i], g.weight.data[i], m_[k].weight.data[i], v_[k].weight.data[i],
                  lr_, beta1_, beta2_, eps_, bc1, bc2);
    for (std::size_t i = 0; i < l.bias.size(); ++i)
      adam_update(l.bias[i], g.bias[i], m_[k].bias[i], v_[k].bias[i], lr_, beta1_, beta2_, eps_,
                  bc1, bc2);
  }
}

}  // namespace drlab::nn
