#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "drlab/agents/policy.hpp"
#include "drlab/agents/rollout_env.hpp"
#include "drlab/env/environment.hpp"
#include "drlab/nn/optimizer.hpp"

namespace drlab::agents {

struct PpoConfig {
  double learning_rate = 3e-4;
  double clip_ratio = 0.2;
  int epochs_per_update = 10;
  int rollout_length = 720;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  int total_episodes = 100;
  std::uint64_t seed = 0;
  int minibatch_size = 128;

  void validate() const;
};

/// Clipped-surrogate objective value and its derivative w.r.t. the ratio;
/// the derivative is zero exactly where the active branch is clipped.
double ppo_surrogate(double advantage, double ratio, double clip_ratio);
double ppo_surrogate_ratio_gradient(double advantage, double ratio, double clip_ratio);

/// Incremental PPO driver so alternating schemes can train the same agent in
/// chunks. Deterministic given the config seed.
class PpoTrainer {
 public:
  PpoTrainer(PpoConfig config, ActionSpace space, std::size_t observation_width,
             const std::string& agent_id);

  /// Runs whole episodes, updating after every rollout_length steps.
  void train(RolloutEnv& env, int episodes);

  const PolicyAgent& agent() const { return agent_; }
  PolicyAgent& mutable_agent() { return agent_; }
  const std::vector<double>& episode_returns() const { return episode_returns_; }

 private:
  struct Sample {
    nn::Vec observation;
    int bin = 0;             // discrete action
    nn::Vec presquash;       // continuous pre-squash draw
    double log_prob = 0.0;
    double value = 0.0;
    double reward = 0.0;
    bool done = false;
  };

  void update(const std::vector<Sample>& rollout);
  double log_prob_and_output_grad(const nn::Vec& actor_output, const Sample& s,
                                  nn::Vec* grad) const;

  PpoConfig config_;
  PolicyAgent agent_;
  nn::AdamOptimizer actor_opt_;
  nn::AdamOptimizer critic_opt_;
  std::mt19937_64 rng_;
  std::vector<double> episode_returns_;

  bool mid_episode_ = false;
  nn::Vec pending_obs_;
  double current_episode_return_ = 0.0;
};

struct TrainResult {
  PolicyAgent agent;
  std::vector<double> episode_returns;
};

TrainResult ppo_train(RolloutEnv& env, const PpoConfig& config, const ActionSpace& space,
                      const std::string& agent_id = "ppo");

/// Same interface and hyperparameters as the victim, trained on the negated
/// reward; used as the target generator for optimally targeted attacks.
TrainResult train_adversarial_policy(env::Environment env, const PpoConfig& config,
                                     const ActionSpace& space,
                                     const std::string& agent_id = "adversarial_policy");

/// Battery environment adapter for the trainers.
class BatteryRolloutEnv : public RolloutEnv {
 public:
  explicit BatteryRolloutEnv(env::Environment env, bool negate_reward = false)
      : env_(std::move(env)), negate_(negate_reward) {}
  nn::Vec reset() override { return env_.reset(); }
  RolloutStep step(const nn::Vec& actions) override;
  std::size_t observation_width() const override { return env_.observation_width(); }
  const env::Environment& environment() const { return env_; }

 private:
  env::Environment env_;
  bool negate_;
};

/// Deterministic evaluation episode for a trained agent.
env::EpisodeLog evaluate_episode(env::Environment env, const PolicyAgent& agent);

}  // namespace drlab::agents
