#include "drlab/attacks/budget.hpp"

#include <algorithm>
#include <stdexcept>

#include "drlab/nn/boxmath.hpp"

namespace drlab::attacks {

AttackBudget AttackBudget::uniform(std::size_t width, double eps) {
  if (eps < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  AttackBudget b;
  b.epsilon.assign(width, eps);
  b.box_lo.assign(width, 0.0);
  b.box_hi.assign(width, 1.0);
  return b;
}

AttackBudget& AttackBudget::mask(const std::vector<std::size_t>& features) {
  for (std::size_t f : features) {
    if (f >= epsilon.size()) throw std::out_of_range("masked feature index out of range");
    epsilon[f] = 0.0;
  }
  return *this;
}

AttackBudget& AttackBudget::mask_category(env::FeatureCategory category) {
  return mask(env::features_in_category(category));
}

AttackBudget& AttackBudget::scale_feature(std::size_t feature, double factor) {
  if (feature >= epsilon.size()) throw std::out_of_range("feature index out of range");
  if (factor < 0.0) throw std::invalid_argument("scale factor must be >= 0");
  epsilon[feature] *= factor;
  return *this;
}

void AttackBudget::validate() const {
  if (epsilon.empty() || box_lo.size() != epsilon.size() || box_hi.size() != epsilon.size())
    throw std::invalid_argument("budget vectors must be non-empty and equally sized");
  for (std::size_t j = 0; j < epsilon.size(); ++j) {
    if (!(epsilon[j] >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    if (box_lo[j] > box_hi[j]) throw std::invalid_argument("valid box lo > hi");
  }
}

Projection AttackBudget::project(const Vec& x, const Vec& delta) const {
  if (x.size() != epsilon.size() || delta.size() != epsilon.size())
    throw std::invalid_argument("budget width mismatch");
  Projection out;
  out.delta.resize(delta.size());
  out.observation.resize(delta.size());
  for (std::size_t j = 0; j < delta.size(); ++j) {
    const nn::BoxedDelta b =
        nn::project_step(x[j], delta[j], epsilon[j], box_lo[j], box_hi[j]);
    out.delta[j] = b.delta;
    out.observation[j] = b.value;
  }
  return out;
}

AttackBudget stealthy_preset(const env::FeatureScaler& scaler, double base_epsilon) {
  AttackBudget b = AttackBudget::uniform(env::kObservationWidth, base_epsilon);
  b.mask_category(env::FeatureCategory::Temporal);
  b.mask_category(env::FeatureCategory::SolarGeneration);
  // Net consumption epsilon scales with the feature's raw baseline spread.
  b.epsilon[env::kNetConsumptionFeature] =
      base_epsilon * scaler.spread(env::kNetConsumptionFeature);
  return b;
}

}  // namespace drlab::attacks
