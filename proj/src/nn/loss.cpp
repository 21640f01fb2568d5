#include "drlab/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::nn {

namespace {

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Vec softmax(const Vec& z) {
  const double m = *std::max_element(z.begin(), z.end());
  Vec p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

// Index of the largest entry among `members`, lowest index on ties.
std::size_t argmax_among(const Vec& z, const std::vector<std::size_t>& members) {
  std::size_t best = members.front();
  for (std::size_t idx : members)
    if (z[idx] > z[best]) best = idx;
  return best;
}

std::vector<std::size_t> all_but(std::size_t skip, std::size_t n) {
  std::vector<std::size_t> v;
  v.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (i != skip) v.push_back(i);
  return v;
}

void check_reference(const LossSpec& spec, std::size_t width) {
  if (spec.reference.size() != width)
    throw std::invalid_argument("loss reference width mismatch");
}

}  // namespace

LossSpec LossSpec::cross_entropy(std::size_t label, LossDirection dir) {
  LossSpec s;
  s.kind = LossKind::CrossEntropy;
  s.direction = dir;
  s.label = label;
  return s;
}

LossSpec LossSpec::mse(Vec reference, LossDirection dir) {
  LossSpec s;
  s.kind = LossKind::MeanSquaredError;
  s.direction = dir;
  s.reference = std::move(reference);
  return s;
}

LossSpec LossSpec::mae(Vec reference, LossDirection dir) {
  LossSpec s;
  s.kind = LossKind::MeanAbsoluteError;
  s.direction = dir;
  s.reference = std::move(reference);
  return s;
}

LossSpec LossSpec::huber(Vec reference, double delta, LossDirection dir) {
  LossSpec s;
  s.kind = LossKind::Huber;
  s.direction = dir;
  s.reference = std::move(reference);
  s.huber_delta = delta;
  return s;
}

LossSpec LossSpec::difference_logit(std::size_t label, LossDirection dir) {
  LossSpec s;
  s.kind = LossKind::DifferenceLogit;
  s.direction = dir;
  s.label = label;
  return s;
}

LossSpec LossSpec::grouped_difference_logit(std::size_t original_label, TargetGroup group) {
  LossSpec s;
  s.kind = LossKind::GroupedDifferenceLogit;
  s.direction = LossDirection::MaximizeAwayFromOriginal;
  s.label = original_label;
  s.group = std::move(group);
  return s;
}

void validate_loss(const LossSpec& spec, std::size_t output_width) {
  switch (spec.kind) {
    case LossKind::CrossEntropy:
      if (spec.label >= output_width) throw std::invalid_argument("label index out of range");
      break;
    case LossKind::MeanSquaredError:
    case LossKind::MeanAbsoluteError:
      if (spec.reference.size() != output_width)
        throw std::invalid_argument("loss reference width mismatch");
      break;
    case LossKind::Huber:
      if (spec.reference.size() != output_width)
        throw std::invalid_argument("loss reference width mismatch");
      if (!(spec.huber_delta > 0.0)) throw std::invalid_argument("huber delta must be > 0");
      break;
    case LossKind::DifferenceLogit:
      if (output_width < 2) throw std::invalid_argument("difference-logit needs output width >= 2");
      if (spec.label >= output_width) throw std::invalid_argument("label index out of range");
      break;
    case LossKind::GroupedDifferenceLogit: {
      if (output_width < 2)
        throw std::invalid_argument("grouped difference-logit needs output width >= 2");
      if (spec.label >= output_width) throw std::invalid_argument("label index out of range");
      if (spec.group.members.empty()) throw std::invalid_argument("target group is empty");
      for (std::size_t idx : spec.group.members) {
        if (idx >= output_width) throw std::invalid_argument("target group index out of range");
        if (idx == spec.label) throw std::invalid_argument("target group contains the original label");
      }
      break;
    }
  }
}

double loss_from_output(const Vec& z, const LossSpec& spec) {
  validate_loss(spec, z.size());
  switch (spec.kind) {
    case LossKind::CrossEntropy: {
      const double m = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (double v : z) sum += std::exp(v - m);
      return -(z[spec.label] - m - std::log(sum));
    }
    case LossKind::MeanSquaredError: {
      check_reference(spec, z.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = z[i] - spec.reference[i];
        acc += e * e;
      }
      return acc / static_cast<double>(z.size());
    }
    case LossKind::MeanAbsoluteError: {
      check_reference(spec, z.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) acc += std::abs(z[i] - spec.reference[i]);
      return acc / static_cast<double>(z.size());
    }
    case LossKind::Huber: {
      check_reference(spec, z.size());
      const double d = spec.huber_delta;
      double acc = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = std::abs(z[i] - spec.reference[i]);
        acc += e <= d ? 0.5 * e * e : d * (e - 0.5 * d);
      }
      return acc / static_cast<double>(z.size());
    }
    case LossKind::DifferenceLogit: {
      const auto rivals = all_but(spec.label, z.size());
      return z[spec.label] - z[argmax_among(z, rivals)];
    }
    case LossKind::GroupedDifferenceLogit:
      return z[spec.label] - z[argmax_among(z, spec.group.members)];
  }
  throw std::logic_error("unreachable loss kind");
}

Vec loss_gradient_from_output(const Vec& z, const LossSpec& spec) {
  validate_loss(spec, z.size());
  Vec g(z.size(), 0.0);
  switch (spec.kind) {
    case LossKind::CrossEntropy: {
      g = softmax(z);
      g[spec.label] -= 1.0;
      return g;
    }
    case LossKind::MeanSquaredError: {
      check_reference(spec, z.size());
      const double inv = 2.0 / static_cast<double>(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) g[i] = inv * (z[i] - spec.reference[i]);
      return g;
    }
    case LossKind::MeanAbsoluteError: {
      check_reference(spec, z.size());
      const double inv = 1.0 / static_cast<double>(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) g[i] = inv * sign_or_zero(z[i] - spec.reference[i]);
      return g;
    }
    case LossKind::Huber: {
      check_reference(spec, z.size());
      const double d = spec.huber_delta;
      const double inv = 1.0 / static_cast<double>(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = z[i] - spec.reference[i];
        g[i] = inv * (std::abs(e) <= d ? e : d * sign_or_zero(e));
      }
      return g;
    }
    case LossKind::DifferenceLogit: {
      const auto rivals = all_but(spec.label, z.size());
      g[spec.label] = 1.0;
      g[argmax_among(z, rivals)] = -1.0;
      return g;
    }
    case LossKind::GroupedDifferenceLogit: {
      g[spec.label] = 1.0;
      g[argmax_among(z, spec.group.members)] = -1.0;
      return g;
    }
  }
  throw std::logic_error("unreachable loss kind");
}

double attack_ascent_sign(const LossSpec& spec) {
  const bool margin_kind = spec.kind == LossKind::DifferenceLogit ||
                           spec.kind == LossKind::GroupedDifferenceLogit;
  if (spec.direction == LossDirection::MaximizeAwayFromOriginal)
    return margin_kind ? -1.0 : 1.0;
  return margin_kind ? 1.0 : -1.0;
}

double loss_value(const DenseNetwork& net, const Vec& x, const LossSpec& spec) {
  return loss_from_output(net.forward(x), spec);
}

Vec input_gradient(const DenseNetwork& net, const Vec& x, const LossSpec& spec) {
  const ForwardTrace t = net.trace(x);
  return net.backprop_input(t, loss_gradient_from_output(t.output(), spec));
}

std::vector<LayerGrad> parameter_gradient(const DenseNetwork& net,
                                          const std::vector<BatchSample>& batch,
                                          const LossSpec& spec) {
  if (batch.empty()) throw std::invalid_argument("parameter gradient needs a non-empty batch");
  std::vector<LayerGrad> acc = zero_gradients(net);
  LossSpec per_sample = spec;
  for (const BatchSample& s : batch) {
    per_sample.reference = s.reference;
    per_sample.label = s.label;
    const ForwardTrace t = net.trace(s.input);
    const BackpropResult r = net.backprop(t, loss_gradient_from_output(t.output(), per_sample));
    accumulate(acc, r.parameter_gradients, 1.0);
  }
  scale_gradients(acc, 1.0 / static_cast<double>(batch.size()));
  return acc;
}

}  // namespace drlab::nn
