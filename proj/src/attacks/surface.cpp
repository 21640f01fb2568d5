#include "drlab/attacks/surface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::attacks {

Vec NetworkSurface::input_gradient(const Vec& x, const Vec& upstream) const {
  return net_->backprop_input(net_->trace(x), upstream);
}

Vec SquashedMeanSurface::forward(const Vec& x) const {
  return {std::tanh(agents::bounded_mean(actor_->forward(x)[0]))};
}

Vec SquashedMeanSurface::input_gradient(const Vec& x, const Vec& upstream) const {
  const nn::ForwardTrace t = actor_->trace(x);
  const double raw = t.output()[0];
  const double th = std::tanh(agents::bounded_mean(raw));
  Vec head(actor_->output_width(), 0.0);
  head[0] = upstream[0] * (1.0 - th * th) * agents::bounded_mean_derivative(raw);
  return actor_->backprop_input(t, head);
}

BifurcationMode BifurcationMode::none() { return BifurcationMode{}; }

BifurcationMode BifurcationMode::discrete_groups(std::vector<std::size_t> charge,
                                                 std::vector<std::size_t> discharge) {
  BifurcationMode m;
  m.kind = Kind::DiscreteGroups;
  m.charge_indices = std::move(charge);
  m.discharge_indices = std::move(discharge);
  return m;
}

BifurcationMode BifurcationMode::continuous_negation() {
  BifurcationMode m;
  m.kind = Kind::ContinuousNegation;
  return m;
}

BifurcationMode BifurcationMode::standard_for(const agents::ActionSpace& space) {
  if (!space.is_discrete()) return continuous_negation();
  std::vector<std::size_t> charge, discharge;
  for (int i = 0; i < space.n_bins; ++i) {
    if (space.bin_value(i) > 0.0)
      charge.push_back(static_cast<std::size_t>(i));
    else
      discharge.push_back(static_cast<std::size_t>(i));
  }
  return discrete_groups(std::move(charge), std::move(discharge));
}

void BifurcationMode::validate(std::size_t output_width) const {
  if (kind != Kind::DiscreteGroups) return;
  if (charge_indices.empty() || discharge_indices.empty())
    throw std::invalid_argument("bifurcation groups must be non-empty");
  std::vector<bool> seen(output_width, false);
  for (const auto* group : {&charge_indices, &discharge_indices}) {
    for (std::size_t idx : *group) {
      if (idx >= output_width) throw std::invalid_argument("bifurcation group index out of range");
      if (seen[idx]) throw std::invalid_argument("bifurcation groups overlap");
      seen[idx] = true;
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw std::invalid_argument("bifurcation groups must cover every logit");
}

GroupMaxSurface::GroupMaxSurface(std::shared_ptr<const AttackSurface> base, BifurcationMode mode)
    : base_(std::move(base)), mode_(std::move(mode)) {
  if (mode_.kind != BifurcationMode::Kind::DiscreteGroups)
    throw std::invalid_argument("GroupMaxSurface needs discrete groups");
  mode_.validate(base_->output_width());
}

namespace {

std::size_t argmax_in_group(const Vec& z, const std::vector<std::size_t>& group) {
  std::size_t best = group.front();
  for (std::size_t idx : group)
    if (z[idx] > z[best]) best = idx;  // strict: lowest index wins ties
  return best;
}

}  // namespace

Vec GroupMaxSurface::forward(const Vec& x) const {
  const Vec z = base_->forward(x);
  return {z[argmax_in_group(z, mode_.charge_indices)],
          z[argmax_in_group(z, mode_.discharge_indices)]};
}

Vec GroupMaxSurface::input_gradient(const Vec& x, const Vec& upstream) const {
  const Vec z = base_->forward(x);
  Vec base_upstream(z.size(), 0.0);
  base_upstream[argmax_in_group(z, mode_.charge_indices)] += upstream[0];
  base_upstream[argmax_in_group(z, mode_.discharge_indices)] += upstream[1];
  return base_->input_gradient(x, base_upstream);
}

NegationSurface::NegationSurface(std::shared_ptr<const AttackSurface> base)
    : base_(std::move(base)) {
  if (base_->output_width() != 1)
    throw std::invalid_argument("negation bifurcation needs a scalar surface");
}

Vec NegationSurface::forward(const Vec& x) const {
  const double y = base_->forward(x)[0];
  return {y, -y};
}

Vec NegationSurface::input_gradient(const Vec& x, const Vec& upstream) const {
  return base_->input_gradient(x, {upstream[0] - upstream[1]});
}

std::shared_ptr<const AttackSurface> bifurcate(std::shared_ptr<const AttackSurface> base,
                                               const BifurcationMode& mode) {
  switch (mode.kind) {
    case BifurcationMode::Kind::None:
      return base;
    case BifurcationMode::Kind::DiscreteGroups:
      return std::make_shared<GroupMaxSurface>(std::move(base), mode);
    case BifurcationMode::Kind::ContinuousNegation:
      return std::make_shared<NegationSurface>(std::move(base));
  }
  throw std::logic_error("unreachable bifurcation kind");
}

double surface_loss(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec) {
  return nn::loss_from_output(surface.forward(x), spec);
}

Vec surface_loss_gradient(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec) {
  return surface.input_gradient(x, nn::loss_gradient_from_output(surface.forward(x), spec));
}

}  // namespace drlab::attacks
