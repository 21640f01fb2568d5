#pragma once

#include "drlab/agents/ppo.hpp"

namespace drlab::agents {

/// Alternating robust training: the adversary's continuous action perturbs
/// each observation feature j by at most feature_budget[j] (normalized units),
/// and the victim never sees a feature outside [0, 1].
struct AtlaConfig {
  nn::Vec feature_budget;
  int alternation_period = 10;
  int total_alternations = 5;

  void validate(std::size_t observation_width) const;
};

/// Static per-feature-category bounds sized from typical clean inter-hour
/// variation; temporal features are not perturbable.
nn::Vec atla_reference_budget();

struct AtlaResult {
  PolicyAgent victim;
  PolicyAgent adversary;
  std::vector<double> victim_episode_returns;
  std::vector<double> adversary_episode_returns;
  std::vector<std::string> warnings;
};

AtlaResult atla_train(env::Environment env, const PpoConfig& victim_config,
                      const ActionSpace& victim_space, const AtlaConfig& atla,
                      const std::string& agent_id = "atla");

/// Applies a frozen adversary to one observation: clamp(obs + a * B, 0, 1).
nn::Vec apply_adversary_perturbation(const nn::Vec& observation, const nn::Vec& adversary_action,
                                     const nn::Vec& feature_budget);

}  // namespace drlab::agents
