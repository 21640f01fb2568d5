#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "drlab/env/battery.hpp"
#include "drlab/env/dataset.hpp"
#include "drlab/nn/network.hpp"

namespace drlab::env {

using nn::Vec;

enum class RewardKind { NetConsumption, SolarPenalty };

struct RewardSpec {
  RewardKind kind = RewardKind::NetConsumption;
  double penalty_weight = 1.0;
};

/// Default reward is -max(e, 0); the solar-penalty variant additionally
/// charges penalty_weight * soc whenever the building imports from the grid.
double reward_value(const RewardSpec& spec, double net_consumption, double generation, double soc);

/// Per-feature min-max bounds fixed when the environment is built. Dataset
/// features use dataset-wide bounds; soc is [0,1]; net consumption uses the
/// null-controller baseline episode's min/max.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(Vec lo, Vec hi);

  std::size_t width() const { return lo_.size(); }
  double lo(std::size_t i) const { return lo_[i]; }
  double hi(std::size_t i) const { return hi_[i]; }
  double spread(std::size_t i) const { return hi_[i] - lo_[i]; }

  double normalize_feature(std::size_t i, double raw) const;
  double denormalize_feature(std::size_t i, double normalized) const;
  Vec normalize(const Vec& raw) const;
  Vec denormalize(const Vec& normalized) const;

 private:
  Vec lo_, hi_;
};

struct StepRecord {
  Vec observation;  // normalized, what the agent acted on
  double action = 0.0;
  double reward = 0.0;
  double net_consumption = 0.0;
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  std::string agent_id;
  std::string attack_id;
  std::uint64_t seed = 0;

  std::size_t size() const { return steps.size(); }
  std::vector<Vec> observations() const;
  std::vector<double> net_consumption_series() const;
};

void save_episode_log(const EpisodeLog& log, const std::string& path);
EpisodeLog load_episode_log(const std::string& path);

struct EnvStep {
  Vec observation;  // normalized observation after the step (empty when done)
  double reward = 0.0;
  double net_consumption = 0.0;
  bool done = false;
};

/// Single-building hourly demand-response episode over one dataset pass.
/// Instances are cheap to copy (the dataset is shared read-only); each copy
/// is an independent single-threaded environment.
class Environment {
 public:
  Environment(BuildingDataset dataset, BatteryState initial_battery, RewardSpec reward);

  std::size_t episode_length() const { return dataset_->hours(); }
  std::size_t observation_width() const { return kObservationWidth; }
  const FeatureScaler& scaler() const { return scaler_; }
  const BuildingDataset& dataset() const { return *dataset_; }
  const RewardSpec& reward_spec() const { return reward_; }
  const BatteryState& initial_battery() const { return initial_battery_; }

  Vec reset();
  /// Actions outside [-1, 1] are clamped and counted.
  EnvStep step(double action);

  std::size_t current_hour() const { return t_; }
  double current_soc() const { return battery_.soc; }
  std::size_t clamped_action_count() const { return clamped_actions_; }

  /// Raw (unnormalized) observation the agent would see at the current hour.
  Vec raw_observation() const;

 private:
  std::shared_ptr<const BuildingDataset> dataset_;
  BatteryState initial_battery_;
  RewardSpec reward_;
  FeatureScaler scaler_;

  BatteryState battery_;
  std::size_t t_ = 0;
  double previous_net_ = 0.0;
  std::size_t clamped_actions_ = 0;
};

/// Episode under a fixed action for every step (the null controller when
/// action == 0). Used for KPI baselines.
EpisodeLog run_constant_action(Environment env, double action, const std::string& agent_id);

}  // namespace drlab::env
