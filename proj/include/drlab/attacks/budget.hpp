#pragma once

#include <cstddef>
#include <vector>

#include "drlab/env/environment.hpp"
#include "drlab/nn/network.hpp"

namespace drlab::attacks {

using nn::Vec;

/// A perturbation together with the observation it produces; the pair
/// satisfies the budget exactly (see AttackBudget::project).
struct Projection {
  Vec delta;
  Vec observation;
};

/// Per-feature L-infinity budget plus the valid-range box. Masked features
/// simply carry epsilon 0.
struct AttackBudget {
  Vec epsilon;
  Vec box_lo;
  Vec box_hi;

  static AttackBudget uniform(std::size_t width, double eps);
  AttackBudget& mask(const std::vector<std::size_t>& features);
  AttackBudget& mask_category(env::FeatureCategory category);
  AttackBudget& scale_feature(std::size_t feature, double factor);

  void validate() const;
  std::size_t width() const { return epsilon.size(); }

  /// Projects x + delta into the epsilon box around x intersected with the
  /// valid-range box. The result holds exactly in floating point:
  /// |delta_j| <= epsilon_j, observation_j inside the box, and
  /// delta_j == observation_j - x_j.
  Projection project(const Vec& x, const Vec& delta) const;
};

/// Budget tuned to pass the observation-space plausibility test: epsilon 0.03
/// everywhere except temporal and solar-generation features (masked) and net
/// consumption, whose epsilon is 0.03 times the feature's raw baseline spread.
AttackBudget stealthy_preset(const env::FeatureScaler& scaler, double base_epsilon = 0.03);

}  // namespace drlab::attacks
