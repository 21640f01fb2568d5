#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "drlab/attacks/budget.hpp"
#include "drlab/attacks/surface.hpp"

namespace drlab::attacks {

/// Continuous actions closer than this are considered unchanged.
inline constexpr double kActionChangeThreshold = 0.01;
/// A targeted attack on a continuous victim succeeds within this distance.
inline constexpr double kTargetTolerance = 0.05;

struct PgdSchedule {
  double initial_stepsize = 0.01;
  int iterations = 100;
  int decay_count = 4;
  double decay_rate = 0.5;

  void validate() const;
  int decay_period() const { return iterations / decay_count; }
  /// Stepsize in force after the final iteration (for schedule traces).
  double final_stepsize() const;
};

struct AttackOutcome {
  Vec adversarial_observation;
  Vec delta;
  Vec distortion;  // |delta| per feature
  double original_action = 0.0;
  double adversarial_action = 0.0;
  int original_bin = -1;
  int adversarial_bin = -1;
  bool success = false;
};

/// Fills actions, bins, the success flag and the distortion profile for a
/// projected perturbation under the victim's deterministic policy.
AttackOutcome evaluate_outcome(const agents::PolicyAgent& victim, const Vec& x,
                               const Projection& projection);

/// Single signed-gradient step of size epsilon, then box projection. A zero
/// gradient yields delta = 0 and success = false.
AttackOutcome fgm(const agents::PolicyAgent& victim, const AttackSurface& surface, const Vec& x,
                  const AttackBudget& budget, const nn::LossSpec& spec);

/// Iterative signed-gradient ascent with projection after every step and the
/// stepsize multiplied by decay_rate every decay_period iterations.
AttackOutcome pgd_decaying(const agents::PolicyAgent& victim, const AttackSurface& surface,
                           const Vec& x, const nn::LossSpec& spec, const AttackBudget& budget,
                           const PgdSchedule& schedule);

/// Raw perturbation from the PGD loop without a victim (for schedule and
/// projection analysis).
Projection pgd_delta(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec,
                     const AttackBudget& budget, const PgdSchedule& schedule);
Projection fgm_delta(const AttackSurface& surface, const Vec& x, const AttackBudget& budget,
                     const nn::LossSpec& spec);

/// Surface plus loss realizing the default untargeted objective for this
/// victim and bifurcation mode: difference-logit for discrete actors, squared
/// error away from the original action for direct continuous attacks, and the
/// two-logit margins when bifurcated.
struct UntargetedPlan {
  std::shared_ptr<const AttackSurface> surface;
  nn::LossSpec loss;
};
UntargetedPlan untargeted_plan(const agents::PolicyAgent& victim, const BifurcationMode& mode,
                               const Vec& x);

/// Smallest candidate epsilon whose attack changes the action, found by
/// binary search over an ascending candidate list.
struct DynamicDistortionResult {
  double epsilon = 0.0;
  AttackOutcome outcome;
  bool success = false;
  int invocations = 0;
};
DynamicDistortionResult dynamic_distortion(
    const std::function<AttackOutcome(double)>& attack_at_epsilon,
    const std::vector<double>& candidates);

/// Closed-loop attack procedure: called once per step with the true
/// observation of the attacked trajectory.
class ObservationAttack {
 public:
  virtual ~ObservationAttack() = default;
  virtual AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                                std::size_t step_index) = 0;
  virtual std::string id() const = 0;
};

/// No perturbation; the baseline control.
class NoAttack : public ObservationAttack {
 public:
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t) override;
  std::string id() const override { return "none"; }
};

enum class GradientMethod { Fgm, Pgd };

/// Untargeted gradient attack (optionally bifurcated) recomputed per step.
class UntargetedGradientAttack : public ObservationAttack {
 public:
  UntargetedGradientAttack(GradientMethod method, BifurcationMode mode, AttackBudget budget,
                           PgdSchedule schedule = {});
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t) override;
  std::string id() const override;

 private:
  GradientMethod method_;
  BifurcationMode mode_;
  AttackBudget budget_;
  PgdSchedule schedule_;
};

/// Policy-induction attack: an adversarial policy picks the worst action for
/// each observation and PGD drives the victim toward it.
class TargetedAttack : public ObservationAttack {
 public:
  TargetedAttack(const agents::PolicyAgent* target_policy, AttackBudget budget,
                 PgdSchedule schedule);
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t) override;
  std::string id() const override { return "targeted"; }

 private:
  const agents::PolicyAgent* target_policy_;
  AttackBudget budget_;
  PgdSchedule schedule_;
};

/// Per-step dynamic distortion: binary search over candidate epsilons for the
/// smallest budget whose untargeted attack still flips the action.
class DynamicDistortionAttack : public ObservationAttack {
 public:
  DynamicDistortionAttack(GradientMethod method, BifurcationMode mode, AttackBudget budget_shape,
                          std::vector<double> candidate_epsilons, PgdSchedule schedule = {});
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t) override;
  std::string id() const override;

 private:
  GradientMethod method_;
  BifurcationMode mode_;
  AttackBudget budget_shape_;  // epsilon entries are rescaled per candidate
  std::vector<double> candidates_;
  PgdSchedule schedule_;
};

/// Uniform random perturbation inside the budget; the control attacks are
/// compared against.
class RandomNoiseAttack : public ObservationAttack {
 public:
  RandomNoiseAttack(AttackBudget budget, std::uint64_t seed);
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t step_index) override;
  std::string id() const override { return "random_noise"; }

 private:
  AttackBudget budget_;
  std::uint64_t seed_;
};

}  // namespace drlab::attacks
