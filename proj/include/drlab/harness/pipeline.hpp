#pragma once

#include <memory>
#include <optional>

#include "drlab/agents/atla.hpp"
#include "drlab/harness/artifacts.hpp"
#include "drlab/harness/config.hpp"
#include "drlab/harness/report.hpp"

namespace drlab::harness {

/// Typed view of a run config. Parsing consumes every recognized key so that
/// leftover (misspelled) keys can be rejected afterwards.
struct ExperimentConfig {
  // dataset
  std::string dataset_source = "synthetic";
  std::string dataset_path;
  std::uint64_t dataset_seed = 0;
  int dataset_days = 30;

  // battery and reward
  env::BatteryState battery;
  env::RewardSpec reward;

  // agent
  std::string agent_kind = "ppo";  // ppo | adversarial | atla | load
  std::string agent_path;
  std::string agent_id;
  agents::ActionSpace action_space = agents::ActionSpace::discrete(20);

  // training
  agents::PpoConfig ppo;
  bool rollout_length_explicit = false;

  // atla
  agents::AtlaConfig atla;
  std::string atla_budget_kind = "reference";  // reference | uniform
  double atla_uniform_budget = 0.05;

  // attack
  std::string attack_procedure = "none";  // none|fgm|pgd|targeted|random|snooping_fgm
  std::string attack_mode = "direct";     // direct | bifurcated
  std::string attack_preset = "uniform";  // uniform | stealthy
  double attack_epsilon = 0.05;
  attacks::PgdSchedule schedule;
  std::string target_policy_path;
  std::vector<double> dynamic_epsilons;  // non-empty enables dynamic distortion

  // snooping
  int snoop_folds = 3;
  int snoop_epochs = 30;

  // detection
  int detect_baseline_pairs = 100;
  int detect_bootstraps = 2000;
  bool detect_controls = false;

  // sweep
  std::vector<double> sweep_epsilons;

  std::uint64_t master_seed = 0;
  std::string config_hash;

  static ExperimentConfig parse(KeyValueConfig& kv,
                                std::optional<std::uint64_t> seed_override);
};

struct PipelineOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

/// Orchestrates train -> attack -> detect -> report over one config. Every
/// stage persists its artifacts before the next begins, so failures keep
/// partial outputs. Reruns with the same config and master seed write
/// byte-identical logs and report bodies.
class Pipeline {
 public:
  Pipeline(KeyValueConfig kv, const PipelineOptions& options);

  RunReport run(const std::vector<std::string>& stages);

  const ExperimentConfig& config() const { return config_; }
  const env::Environment& environment() const { return *env_; }
  const agents::PolicyAgent& agent() const { return agent_; }

 private:
  void stage_train();
  void stage_attack();
  void stage_snoop();
  void stage_detect();
  void stage_sweep();
  void persist_attack_artifacts(const std::string& run_name);
  std::unique_ptr<attacks::ObservationAttack> build_attack(double epsilon_override);
  attacks::AttackBudget build_budget(double epsilon) const;
  void note(const std::string& message) const;

  ExperimentConfig config_;
  PipelineOptions options_;
  OutputLayout layout_;

  std::unique_ptr<env::Environment> env_;
  env::EpisodeLog baseline_;
  agents::PolicyAgent agent_;
  bool have_agent_ = false;
  std::optional<agents::PolicyAgent> target_policy_;
  std::optional<attacks::ProxyModel> proxy_;

  attacks::ClosedLoopResult attack_result_;
  bool have_attack_ = false;
  std::string attack_run_name_;

  RunReport report_;
};

/// Convenience wrapper: parse, run the listed stages, write the report.
RunReport run_pipeline(KeyValueConfig kv, const PipelineOptions& options,
                       const std::vector<std::string>& stages);

}  // namespace drlab::harness
