#pragma once

#include <cmath>
#include <random>
#include <string>

#include "drlab/agents/action_space.hpp"
#include "drlab/nn/network.hpp"

namespace drlab::agents {

using nn::Vec;

// State-dependent log-std outputs are clamped to this range. The floor keeps
// a sampling policy from concentrating before the critic has seen enough of
// the state space; deterministic evaluation uses the mean head, so trained
// agents still act crisply.
inline constexpr double kLogStdMin = -0.5;
inline constexpr double kLogStdMax = 1.0;

// The pre-squash mean is soft-bounded to +-kMeanBound. Saturated policies
// otherwise drift outward without any countervailing reward signal, and the
// drift distance is unbounded.
inline constexpr double kMeanBound = 3.0;

inline double bounded_mean(double raw) {
  return kMeanBound * std::tanh(raw / kMeanBound);
}
inline double bounded_mean_derivative(double raw) {
  const double t = std::tanh(raw / kMeanBound);
  return 1.0 - t * t;
}

/// Actor-critic pair. Discrete actors emit one logit per bin; continuous
/// actors emit (mean, log-std) per action dimension and squash through tanh.
struct PolicyAgent {
  nn::DenseNetwork actor;
  nn::DenseNetwork critic;
  ActionSpace space;
  bool deterministic_eval = true;
  std::string id;
};

struct ActResult {
  Vec actions;       // raw actions in [-1, 1]
  int bin = -1;      // chosen bin for discrete spaces
  Vec actor_output;  // logits, or means followed by log-stds
  double action() const { return actions.front(); }
};

PolicyAgent make_agent(const ActionSpace& space, std::size_t observation_width,
                       std::uint64_t seed, const std::string& id);

/// Deterministic evaluation: argmax logit for discrete, tanh(mean) for
/// continuous. Never mutates the agent.
ActResult act(const PolicyAgent& agent, const Vec& observation);

/// Sampling evaluation: categorical over logits, or tanh of a Gaussian draw.
ActResult act_stochastic(const PolicyAgent& agent, const Vec& observation, std::mt19937_64& rng);

void save_agent(const PolicyAgent& agent, const std::string& directory,
                const std::string& config_hash = "");
PolicyAgent load_agent(const std::string& directory);

}  // namespace drlab::agents
