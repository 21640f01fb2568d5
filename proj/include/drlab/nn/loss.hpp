#pragma once

#include <cstddef>
#include <vector>

#include "drlab/nn/network.hpp"

namespace drlab::nn {

/// Label indices an attack tries to promote over the original one.
struct TargetGroup {
  std::vector<std::size_t> members;
};

enum class LossKind {
  CrossEntropy,
  MeanSquaredError,
  MeanAbsoluteError,
  Huber,
  DifferenceLogit,
  GroupedDifferenceLogit,
};

enum class LossDirection { MinimizeTowardTarget, MaximizeAwayFromOriginal };

/// What to measure on a network's final output and which way an attack
/// wants to push it. Regression kinds compare against `reference`; the
/// logit kinds use `label` (and `group` for the grouped variant).
struct LossSpec {
  LossKind kind = LossKind::MeanSquaredError;
  LossDirection direction = LossDirection::MaximizeAwayFromOriginal;
  std::size_t label = 0;
  TargetGroup group;
  Vec reference;
  double huber_delta = 1.0;

  static LossSpec cross_entropy(std::size_t label, LossDirection dir);
  static LossSpec mse(Vec reference, LossDirection dir);
  static LossSpec mae(Vec reference, LossDirection dir);
  static LossSpec huber(Vec reference, double delta, LossDirection dir);
  static LossSpec difference_logit(std::size_t label, LossDirection dir);
  static LossSpec grouped_difference_logit(std::size_t original_label, TargetGroup group);
};

/// Throws std::invalid_argument when the spec cannot apply to a network of
/// the given output width (label out of range, bad group, huber delta <= 0,
/// logit losses on single-output networks).
void validate_loss(const LossSpec& spec, std::size_t output_width);

double loss_from_output(const Vec& output, const LossSpec& spec);
Vec loss_gradient_from_output(const Vec& output, const LossSpec& spec);

/// +1 when the attack objective ascends the raw loss value, -1 when it
/// descends. The logit margins flip sign relative to the regression kinds:
/// pushing "away from the original" means driving the margin down.
double attack_ascent_sign(const LossSpec& spec);

double loss_value(const DenseNetwork& net, const Vec& x, const LossSpec& spec);
Vec input_gradient(const DenseNetwork& net, const Vec& x, const LossSpec& spec);

/// One batch element for parameter gradients: per-sample reference output
/// (regression kinds) or label (cross-entropy and logit kinds).
struct BatchSample {
  Vec input;
  Vec reference;
  std::size_t label = 0;
};

/// Mean gradient of the loss over the batch, same shapes as the parameters.
std::vector<LayerGrad> parameter_gradient(const DenseNetwork& net,
                                          const std::vector<BatchSample>& batch,
                                          const LossSpec& spec);

}  // namespace drlab::nn
