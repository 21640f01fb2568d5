#include "drlab/attacks/gradient_attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace drlab::attacks {

namespace {

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void PgdSchedule::validate() const {
  if (!(initial_stepsize > 0.0)) throw std::invalid_argument("stepsize must be > 0");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (decay_count < 1 || decay_count > iterations)
    throw std::invalid_argument("decay count must be in [1, iterations]");
  if (!(decay_rate > 0.0) || decay_rate > 1.0)
    throw std::invalid_argument("decay rate must be in (0, 1]");
}

double PgdSchedule::final_stepsize() const {
  validate();
  double eta = initial_stepsize;
  const int period = decay_period();
  for (int k = 1; k <= iterations; ++k)
    if (k % period == 0) eta *= decay_rate;
  return eta;
}

AttackOutcome evaluate_outcome(const agents::PolicyAgent& victim, const Vec& x,
                               const Projection& projection) {
  AttackOutcome o;
  o.adversarial_observation = projection.observation;
  o.delta = projection.delta;
  o.distortion.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) o.distortion[j] = std::abs(o.delta[j]);
  const agents::ActResult orig = agents::act(victim, x);
  const agents::ActResult adv = agents::act(victim, o.adversarial_observation);
  o.original_action = orig.action();
  o.adversarial_action = adv.action();
  if (victim.space.is_discrete()) {
    o.original_bin = orig.bin;
    o.adversarial_bin = adv.bin;
    o.success = orig.bin != adv.bin;
  } else {
    o.success = std::abs(o.adversarial_action - o.original_action) > kActionChangeThreshold;
  }
  return o;
}

Projection fgm_delta(const AttackSurface& surface, const Vec& x, const AttackBudget& budget,
                     const nn::LossSpec& spec) {
  budget.validate();
  const double ascent = nn::attack_ascent_sign(spec);
  const Vec g = surface_loss_gradient(surface, x, spec);
  Vec delta(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    delta[j] = budget.epsilon[j] * sign_or_zero(ascent * g[j]);
  return budget.project(x, delta);
}

AttackOutcome fgm(const agents::PolicyAgent& victim, const AttackSurface& surface, const Vec& x,
                  const AttackBudget& budget, const nn::LossSpec& spec) {
  const Projection p = fgm_delta(surface, x, budget, spec);
  AttackOutcome o = evaluate_outcome(victim, x, p);
  const bool all_zero =
      std::all_of(p.delta.begin(), p.delta.end(), [](double d) { return d == 0.0; });
  if (all_zero) o.success = false;
  return o;
}

Projection pgd_delta(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec,
                     const AttackBudget& budget, const PgdSchedule& schedule) {
  budget.validate();
  schedule.validate();
  const double ascent = nn::attack_ascent_sign(spec);
  const int period = schedule.decay_period();

  Projection p;
  p.delta.assign(x.size(), 0.0);
  p.observation = x;
  double eta = schedule.initial_stepsize;
  for (int k = 1; k <= schedule.iterations; ++k) {
    const Vec g = surface_loss_gradient(surface, p.observation, spec);
    Vec step = p.delta;
    for (std::size_t j = 0; j < step.size(); ++j) step[j] += eta * sign_or_zero(ascent * g[j]);
    p = budget.project(x, step);
    if (k % period == 0) eta *= schedule.decay_rate;
  }
  return p;
}

AttackOutcome pgd_decaying(const agents::PolicyAgent& victim, const AttackSurface& surface,
                           const Vec& x, const nn::LossSpec& spec, const AttackBudget& budget,
                           const PgdSchedule& schedule) {
  return evaluate_outcome(victim, x, pgd_delta(surface, x, spec, budget, schedule));
}

UntargetedPlan untargeted_plan(const agents::PolicyAgent& victim, const BifurcationMode& mode,
                               const Vec& x) {
  UntargetedPlan plan;
  if (victim.space.is_discrete()) {
    auto logits = std::make_shared<NetworkSurface>(&victim.actor);
    const agents::ActResult orig = agents::act(victim, x);
    if (mode.is_none()) {
      plan.surface = logits;
      plan.loss = nn::LossSpec::difference_logit(static_cast<std::size_t>(orig.bin),
                                                 nn::LossDirection::MaximizeAwayFromOriginal);
    } else {
      plan.surface = bifurcate(logits, mode);
      const auto& charge = mode.charge_indices;
      const bool orig_is_charge =
          std::find(charge.begin(), charge.end(), static_cast<std::size_t>(orig.bin)) !=
          charge.end();
      plan.loss = nn::LossSpec::difference_logit(orig_is_charge ? 0 : 1,
                                                 nn::LossDirection::MaximizeAwayFromOriginal);
    }
    return plan;
  }

  auto action_surface = std::make_shared<SquashedMeanSurface>(&victim.actor);
  if (mode.is_none()) {
    plan.surface = action_surface;
    plan.loss = nn::LossSpec::mse({agents::act(victim, x).action()},
                                  nn::LossDirection::MaximizeAwayFromOriginal);
  } else {
    plan.surface = bifurcate(action_surface, BifurcationMode::continuous_negation());
    const double y = agents::act(victim, x).action();
    plan.loss = nn::LossSpec::difference_logit(y >= 0.0 ? 0 : 1,
                                               nn::LossDirection::MaximizeAwayFromOriginal);
  }
  return plan;
}

DynamicDistortionResult dynamic_distortion(
    const std::function<AttackOutcome(double)>& attack_at_epsilon,
    const std::vector<double>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("dynamic distortion needs candidates");
  if (!std::is_sorted(candidates.begin(), candidates.end()))
    throw std::invalid_argument("candidate epsilons must be ascending");

  DynamicDistortionResult result;
  std::vector<std::optional<AttackOutcome>> cache(candidates.size());
  auto evaluate = [&](std::size_t i) -> const AttackOutcome& {
    if (!cache[i]) {
      cache[i] = attack_at_epsilon(candidates[i]);
      ++result.invocations;
    }
    return *cache[i];
  };

  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (evaluate(mid).success)
      hi = mid;
    else
      lo = mid + 1;
  }
  const AttackOutcome& at_lo = evaluate(lo);
  result.epsilon = candidates[lo];
  result.outcome = at_lo;
  result.success = at_lo.success;
  if (!result.success) {
    // Nothing flipped: report the largest candidate's outcome.
    const std::size_t last = candidates.size() - 1;
    result.epsilon = candidates[last];
    result.outcome = evaluate(last);
  }
  return result;
}

AttackOutcome NoAttack::perturb(const agents::PolicyAgent& victim, const Vec& observation,
                                std::size_t) {
  Projection p;
  p.delta.assign(observation.size(), 0.0);
  p.observation = observation;
  AttackOutcome o = evaluate_outcome(victim, observation, p);
  o.success = false;
  return o;
}

UntargetedGradientAttack::UntargetedGradientAttack(GradientMethod method, BifurcationMode mode,
                                                   AttackBudget budget, PgdSchedule schedule)
    : method_(method), mode_(std::move(mode)), budget_(std::move(budget)), schedule_(schedule) {
  budget_.validate();
  if (method_ == GradientMethod::Pgd) schedule_.validate();
}

AttackOutcome UntargetedGradientAttack::perturb(const agents::PolicyAgent& victim,
                                                const Vec& observation, std::size_t) {
  const UntargetedPlan plan = untargeted_plan(victim, mode_, observation);
  if (method_ == GradientMethod::Fgm)
    return fgm(victim, *plan.surface, observation, budget_, plan.loss);
  return pgd_decaying(victim, *plan.surface, observation, plan.loss, budget_, schedule_);
}

std::string UntargetedGradientAttack::id() const {
  std::string name = method_ == GradientMethod::Fgm ? "fgm" : "pgd";
  if (!mode_.is_none()) name = "bifurcated_" + name;
  return name;
}

TargetedAttack::TargetedAttack(const agents::PolicyAgent* target_policy, AttackBudget budget,
                               PgdSchedule schedule)
    : target_policy_(target_policy), budget_(std::move(budget)), schedule_(schedule) {
  budget_.validate();
  schedule_.validate();
}

AttackOutcome TargetedAttack::perturb(const agents::PolicyAgent& victim, const Vec& observation,
                                      std::size_t) {
  const agents::ActResult target = agents::act(*target_policy_, observation);
  if (victim.space.is_discrete()) {
    NetworkSurface logits(&victim.actor);
    const nn::LossSpec loss = nn::LossSpec::cross_entropy(
        static_cast<std::size_t>(target.bin), nn::LossDirection::MinimizeTowardTarget);
    AttackOutcome o = pgd_decaying(victim, logits, observation, loss, budget_, schedule_);
    o.success = o.adversarial_bin == target.bin;
    return o;
  }
  SquashedMeanSurface action(&victim.actor);
  const nn::LossSpec loss =
      nn::LossSpec::mse({target.action()}, nn::LossDirection::MinimizeTowardTarget);
  AttackOutcome o = pgd_decaying(victim, action, observation, loss, budget_, schedule_);
  o.success = std::abs(o.adversarial_action - target.action()) <= kTargetTolerance;
  return o;
}

DynamicDistortionAttack::DynamicDistortionAttack(GradientMethod method, BifurcationMode mode,
                                                 AttackBudget budget_shape,
                                                 std::vector<double> candidate_epsilons,
                                                 PgdSchedule schedule)
    : method_(method),
      mode_(std::move(mode)),
      budget_shape_(std::move(budget_shape)),
      candidates_(std::move(candidate_epsilons)),
      schedule_(schedule) {
  budget_shape_.validate();
  if (candidates_.empty())
    throw std::invalid_argument("dynamic distortion needs candidate epsilons");
  if (!std::is_sorted(candidates_.begin(), candidates_.end()))
    throw std::invalid_argument("candidate epsilons must be ascending");
  if (method_ == GradientMethod::Pgd) schedule_.validate();
}

AttackOutcome DynamicDistortionAttack::perturb(const agents::PolicyAgent& victim,
                                               const Vec& observation, std::size_t) {
  const double peak = *std::max_element(budget_shape_.epsilon.begin(), budget_shape_.epsilon.end());
  if (peak == 0.0) {
    Projection p;
    p.delta.assign(observation.size(), 0.0);
    p.observation = observation;
    AttackOutcome o = evaluate_outcome(victim, observation, p);
    o.success = false;
    return o;
  }
  const auto attack_at = [&](double epsilon) {
    AttackBudget budget = budget_shape_;
    for (double& e : budget.epsilon) e *= epsilon / peak;
    const UntargetedPlan plan = untargeted_plan(victim, mode_, observation);
    if (method_ == GradientMethod::Fgm)
      return fgm(victim, *plan.surface, observation, budget, plan.loss);
    return pgd_decaying(victim, *plan.surface, observation, plan.loss, budget, schedule_);
  };
  return dynamic_distortion(attack_at, candidates_).outcome;
}

std::string DynamicDistortionAttack::id() const {
  std::string name = method_ == GradientMethod::Fgm ? "fgm" : "pgd";
  if (!mode_.is_none()) name = "bifurcated_" + name;
  return "dynamic_" + name;
}

RandomNoiseAttack::RandomNoiseAttack(AttackBudget budget, std::uint64_t seed)
    : budget_(std::move(budget)), seed_(seed) {
  budget_.validate();
}

AttackOutcome RandomNoiseAttack::perturb(const agents::PolicyAgent& victim,
                                         const Vec& observation, std::size_t step_index) {
  std::mt19937_64 rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (step_index + 1)));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec delta(observation.size());
  for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = budget_.epsilon[j] * unif(rng);
  return evaluate_outcome(victim, observation, budget_.project(observation, delta));
}

}  // namespace drlab::attacks
