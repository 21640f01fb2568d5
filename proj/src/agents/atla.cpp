#include "drlab/agents/atla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drlab/env/dataset.hpp"
#include "drlab/nn/boxmath.hpp"

namespace drlab::agents {

void AtlaConfig::validate(std::size_t observation_width) const {
  if (feature_budget.size() != observation_width)
    throw std::invalid_argument("atla budget width must match the observation width");
  for (double b : feature_budget)
    if (!(b >= 0.0)) throw std::invalid_argument("atla budget entries must be >= 0");
  if (alternation_period < 1 || total_alternations < 1)
    throw std::invalid_argument("atla alternation counts must be >= 1");
}

nn::Vec atla_reference_budget() {
  using env::FeatureCategory;
  nn::Vec budget(env::kObservationWidth, 0.0);
  const std::vector<std::pair<FeatureCategory, double>> per_category = {
      {FeatureCategory::Temporal, 0.0},
      {FeatureCategory::Temperature, 0.16},
      {FeatureCategory::Humidity, 0.36},
      {FeatureCategory::DiffuseIrradiance, 0.33},
      {FeatureCategory::DirectIrradiance, 0.45},
      {FeatureCategory::CarbonIntensity, 0.17},
      {FeatureCategory::NonShiftableLoad, 0.37},
      {FeatureCategory::SolarGeneration, 1.5e-3},
      {FeatureCategory::StorageSoc, 0.32},
      {FeatureCategory::NetConsumption, 3.3e-3},
      {FeatureCategory::Pricing, 0.52},
  };
  for (const auto& [category, value] : per_category)
    for (std::size_t idx : env::features_in_category(category)) budget[idx] = value;
  return budget;
}

nn::Vec apply_adversary_perturbation(const nn::Vec& observation, const nn::Vec& adversary_action,
                                     const nn::Vec& feature_budget) {
  nn::Vec out(observation.size());
  for (std::size_t j = 0; j < observation.size(); ++j) {
    const double offset = std::clamp(adversary_action[j], -1.0, 1.0) * feature_budget[j];
    out[j] = nn::project_step(observation[j], offset, feature_budget[j], 0.0, 1.0).value;
  }
  return out;
}

namespace {

// Victim trains here: a frozen adversary rewrites every observation it sees.
class VictimSideEnv : public RolloutEnv {
 public:
  VictimSideEnv(env::Environment env, const PolicyAgent* adversary, const nn::Vec* budget,
                std::uint64_t seed)
      : env_(std::move(env)), adversary_(adversary), budget_(budget), rng_(seed) {}

  nn::Vec reset() override { return perturb(env_.reset()); }

  RolloutStep step(const nn::Vec& actions) override {
    const env::EnvStep s = env_.step(actions.front());
    RolloutStep out;
    out.reward = s.reward;
    out.done = s.done;
    if (!s.done) out.observation = perturb(s.observation);
    return out;
  }

  std::size_t observation_width() const override { return env_.observation_width(); }

 private:
  nn::Vec perturb(const nn::Vec& obs) {
    const ActResult a = act_stochastic(*adversary_, obs, rng_);
    return apply_adversary_perturbation(obs, a.actions, *budget_);
  }

  env::Environment env_;
  const PolicyAgent* adversary_;
  const nn::Vec* budget_;
  std::mt19937_64 rng_;
};

// Adversary trains here: it sees clean observations, its action perturbs them,
// the frozen victim acts on the result, and the reward is negated.
class AdversarySideEnv : public RolloutEnv {
 public:
  AdversarySideEnv(env::Environment env, const PolicyAgent* victim, const nn::Vec* budget)
      : env_(std::move(env)), victim_(victim), budget_(budget) {}

  nn::Vec reset() override {
    clean_ = env_.reset();
    return clean_;
  }

  RolloutStep step(const nn::Vec& actions) override {
    const nn::Vec perturbed = apply_adversary_perturbation(clean_, actions, *budget_);
    const double victim_action = act(*victim_, perturbed).action();
    const env::EnvStep s = env_.step(victim_action);
    RolloutStep out;
    out.reward = -s.reward;
    out.done = s.done;
    if (!s.done) {
      clean_ = s.observation;
      out.observation = clean_;
    }
    return out;
  }

  std::size_t observation_width() const override { return env_.observation_width(); }

 private:
  env::Environment env_;
  const PolicyAgent* victim_;
  const nn::Vec* budget_;
  nn::Vec clean_;
};

}  // namespace

AtlaResult atla_train(env::Environment env, const PpoConfig& victim_config,
                      const ActionSpace& victim_space, const AtlaConfig& atla,
                      const std::string& agent_id) {
  atla.validate(env.observation_width());
  AtlaResult result;

  const bool all_zero =
      std::all_of(atla.feature_budget.begin(), atla.feature_budget.end(),
                  [](double b) { return b == 0.0; });
  if (all_zero)
    result.warnings.push_back("atla budget is all-zero; training degenerates to plain ppo");

  PpoTrainer victim(victim_config, victim_space, env.observation_width(), agent_id);

  PpoConfig adversary_config = victim_config;
  adversary_config.seed = victim_config.seed ^ 0xa5a5a5a55a5a5a5aULL;
  const ActionSpace adversary_space =
      ActionSpace::continuous(static_cast<int>(env.observation_width()));
  PpoTrainer adversary(adversary_config, adversary_space, env.observation_width(),
                       agent_id + "_adversary");

  for (int round = 0; round < atla.total_alternations; ++round) {
    VictimSideEnv victim_env(env, &adversary.agent(), &atla.feature_budget,
                             victim_config.seed ^ (0x51ed2700350cf347ULL + static_cast<std::uint64_t>(round)));
    victim.train(victim_env, atla.alternation_period);

    AdversarySideEnv adversary_env(env, &victim.agent(), &atla.feature_budget);
    adversary.train(adversary_env, atla.alternation_period);
  }

  result.victim = victim.agent();
  result.adversary = adversary.agent();
  result.victim_episode_returns = victim.episode_returns();
  result.adversary_episode_returns = adversary.episode_returns();
  return result;
}

}  // namespace drlab::agents
