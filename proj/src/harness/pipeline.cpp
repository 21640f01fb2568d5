#include "drlab/harness/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "drlab/harness/seeding.hpp"

namespace drlab::harness {

namespace {

agents::ActionSpace parse_action_space(const std::string& kind, int n_bins) {
  if (kind == "discrete") return agents::ActionSpace::discrete(n_bins);
  if (kind == "continuous") return agents::ActionSpace::continuous();
  throw ConfigError("agent.action_space must be 'discrete' or 'continuous'");
}

std::string default_agent_id(const ExperimentConfig& cfg) {
  std::string id = cfg.agent_kind == "atla" ? "atla_ppo" : cfg.agent_kind;
  if (cfg.agent_kind == "ppo" || cfg.agent_kind == "adversarial" || cfg.agent_kind == "atla") {
    id += cfg.action_space.is_discrete()
              ? "_discrete" + std::to_string(cfg.action_space.n_bins)
              : "_continuous";
  }
  return id;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(KeyValueConfig& kv,
                                         std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  const int schema_version = kv.get_int("schema.version", 1);
  if (schema_version != 1) throw ConfigError("unsupported schema.version");

  cfg.master_seed = kv.get_u64("run.master_seed", 7);
  if (seed_override) cfg.master_seed = *seed_override;

  cfg.dataset_source = kv.get_string("dataset.source", "synthetic");
  if (cfg.dataset_source != "synthetic" && cfg.dataset_source != "file")
    throw ConfigError("dataset.source must be 'synthetic' or 'file'");
  cfg.dataset_path = kv.get_string("dataset.path", "");
  if (cfg.dataset_source == "file" && cfg.dataset_path.empty())
    throw ConfigError("dataset.source=file needs dataset.path");
  cfg.dataset_seed = kv.get_u64("dataset.seed", sub_seed(cfg.master_seed, "dataset", 0));
  cfg.dataset_days = kv.get_int("dataset.days", 30);
  if (cfg.dataset_days < 1) throw ConfigError("dataset.days must be >= 1");

  cfg.battery.capacity_kwh = kv.get_double("battery.capacity_kwh", 6.4);
  cfg.battery.nominal_power_kw = kv.get_double("battery.nominal_power_kw", 5.0);
  cfg.battery.round_trip_efficiency = kv.get_double("battery.round_trip_efficiency", 0.9);
  cfg.battery.soc = kv.get_double("battery.initial_soc", 0.0);

  const std::string reward_kind = kv.get_string("reward.kind", "net_consumption");
  if (reward_kind == "net_consumption")
    cfg.reward.kind = env::RewardKind::NetConsumption;
  else if (reward_kind == "solar_penalty")
    cfg.reward.kind = env::RewardKind::SolarPenalty;
  else
    throw ConfigError("reward.kind must be 'net_consumption' or 'solar_penalty'");
  cfg.reward.penalty_weight = kv.get_double("reward.penalty_weight", 1.0);

  cfg.agent_kind = kv.get_string("agent.kind", "ppo");
  if (cfg.agent_kind != "ppo" && cfg.agent_kind != "adversarial" && cfg.agent_kind != "atla" &&
      cfg.agent_kind != "load")
    throw ConfigError("agent.kind must be ppo, adversarial, atla or load");
  cfg.agent_path = kv.get_string("agent.path", "");
  if (cfg.agent_kind == "load" && cfg.agent_path.empty())
    throw ConfigError("agent.kind=load needs agent.path");
  cfg.action_space = parse_action_space(kv.get_string("agent.action_space", "discrete"),
                                        kv.get_int("agent.n_bins", 20));
  cfg.agent_id = kv.get_string("agent.id", "");
  if (cfg.agent_id.empty()) cfg.agent_id = default_agent_id(cfg);

  cfg.ppo.total_episodes = kv.get_int("train.episodes", 100);
  cfg.ppo.learning_rate = kv.get_double("train.learning_rate", 3e-4);
  cfg.ppo.clip_ratio = kv.get_double("train.clip_ratio", 0.2);
  cfg.ppo.epochs_per_update = kv.get_int("train.epochs_per_update", 10);
  cfg.ppo.discount = kv.get_double("train.discount", 0.99);
  cfg.ppo.gae_lambda = kv.get_double("train.gae_lambda", 0.95);
  cfg.ppo.entropy_coef = kv.get_double("train.entropy_coef", 0.01);
  cfg.ppo.minibatch_size = kv.get_int("train.minibatch", 128);
  cfg.ppo.seed = kv.get_u64("train.seed", sub_seed(cfg.master_seed, "train", 0));
  const int rollout = kv.get_int("train.rollout_length", 0);
  cfg.rollout_length_explicit = rollout > 0;
  if (cfg.rollout_length_explicit) cfg.ppo.rollout_length = rollout;

  cfg.atla.alternation_period = kv.get_int("atla.alternation_period", 10);
  cfg.atla.total_alternations = kv.get_int("atla.total_alternations", 10);
  cfg.atla_budget_kind = kv.get_string("atla.budget", "reference");
  if (cfg.atla_budget_kind != "reference" && cfg.atla_budget_kind != "uniform")
    throw ConfigError("atla.budget must be 'reference' or 'uniform'");
  cfg.atla_uniform_budget = kv.get_double("atla.uniform_budget", 0.05);

  cfg.attack_procedure = kv.get_string("attack.procedure", "none");
  const std::vector<std::string> known_procedures = {"none",     "fgm",           "pgd",
                                                     "targeted", "random",        "snooping_fgm"};
  if (std::find(known_procedures.begin(), known_procedures.end(), cfg.attack_procedure) ==
      known_procedures.end())
    throw ConfigError("unknown attack.procedure '" + cfg.attack_procedure + "'");
  cfg.attack_mode = kv.get_string("attack.mode", "direct");
  if (cfg.attack_mode != "direct" && cfg.attack_mode != "bifurcated")
    throw ConfigError("attack.mode must be 'direct' or 'bifurcated'");
  cfg.attack_preset = kv.get_string("attack.preset", "uniform");
  if (cfg.attack_preset != "uniform" && cfg.attack_preset != "stealthy")
    throw ConfigError("attack.preset must be 'uniform' or 'stealthy'");
  cfg.attack_epsilon = kv.get_double("attack.epsilon", cfg.attack_preset == "stealthy" ? 0.03 : 0.05);
  cfg.schedule.initial_stepsize = kv.get_double("attack.stepsize", 0.01);
  cfg.schedule.iterations = kv.get_int("attack.iterations", 100);
  cfg.schedule.decay_count = kv.get_int("attack.decays", 4);
  cfg.schedule.decay_rate = kv.get_double("attack.decay_rate", 0.5);
  cfg.target_policy_path = kv.get_string("attack.target_policy", "");
  cfg.dynamic_epsilons = kv.get_double_list("attack.dynamic_epsilons", {});

  cfg.snoop_folds = kv.get_int("snoop.folds", 3);
  cfg.snoop_epochs = kv.get_int("snoop.epochs", 30);

  cfg.detect_baseline_pairs = kv.get_int("detect.baseline_pairs", 100);
  cfg.detect_bootstraps = kv.get_int("detect.bootstraps", 2000);
  cfg.detect_controls = kv.get_bool("detect.controls", false);

  cfg.sweep_epsilons = kv.get_double_list("sweep.epsilons", {});

  kv.reject_unconsumed();
  cfg.config_hash = kv.config_hash();
  return cfg;
}

Pipeline::Pipeline(KeyValueConfig kv, const PipelineOptions& options)
    : config_(ExperimentConfig::parse(kv, options.seed_override)),
      options_(options),
      layout_{options.out_dir} {
  layout_.create();

  env::BuildingDataset dataset;
  if (config_.dataset_source == "synthetic") {
    dataset = env::generate_synthetic(config_.dataset_seed, static_cast<std::size_t>(config_.dataset_days));
    const std::string dataset_path = (std::filesystem::path(options_.out_dir) / "dataset.csv").string();
    if (!std::filesystem::exists(dataset_path)) env::save_dataset(dataset, dataset_path);
  } else {
    dataset = env::load_dataset(config_.dataset_path);
  }
  env_ = std::make_unique<env::Environment>(std::move(dataset), config_.battery, config_.reward);
  if (!config_.rollout_length_explicit)
    config_.ppo.rollout_length = static_cast<int>(env_->episode_length());

  baseline_ = env::run_constant_action(*env_, 0.0, "null_controller");
  baseline_.seed = config_.master_seed;

  report_.config_hash = config_.config_hash;
  report_.run_id = config_.config_hash;
}

void Pipeline::note(const std::string& message) const {
  if (!options_.quiet) std::cout << message << "\n";
}

RunReport Pipeline::run(const std::vector<std::string>& stages) {
  const auto wants = [&stages](const char* s) {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
  };

  const bool needs_agent =
      wants("attack") || wants("snoop") || wants("sweep") || wants("detect");
  if (wants("train") || (needs_agent && config_.agent_path.empty()))
    stage_train();
  else if (!config_.agent_path.empty()) {
    agent_ = agents::load_agent(config_.agent_path);
    have_agent_ = true;
    note("loaded agent '" + agent_.id + "' from " + config_.agent_path);
  }
  if (needs_agent && !have_agent_)
    throw ConfigError("this pipeline needs an agent: run the train stage or set agent.path");

  if (wants("attack")) stage_attack();
  if (wants("snoop")) stage_snoop();
  if (wants("detect")) {
    if (!have_attack_) throw ConfigError("detect stage needs an attack stage before it");
    stage_detect();
  }
  if (wants("sweep")) stage_sweep();

  // Report stage always runs last: persist what this run produced.
  report_.agent_id = have_agent_ ? agent_.id : "none";
  if (have_agent_ && !have_attack_) {
    const env::EpisodeLog clean = agents::evaluate_episode(*env_, agent_);
    report_.clean_kpis = env::compute_kpis(clean, baseline_);
  }
  const std::string report_name = attack_run_name_.empty() ? config_.agent_id : attack_run_name_;
  report_.run_id = report_name + "_" + config_.config_hash;
  write_report_json(report_, layout_.report_path(report_name, "report.json"));
  write_report_text(report_, layout_.report_path(report_name, "report.txt"));
  note("report written to " + layout_.report_path(report_name, "report.txt"));
  return report_;
}

void Pipeline::stage_train() {
  agents::BatteryRolloutEnv rollout_env(*env_, config_.agent_kind == "adversarial");
  if (config_.agent_kind == "ppo" || config_.agent_kind == "adversarial") {
    const agents::TrainResult result =
        agents::ppo_train(rollout_env, config_.ppo, config_.action_space, config_.agent_id);
    agent_ = result.agent;
  } else if (config_.agent_kind == "atla") {
    agents::AtlaConfig atla = config_.atla;
    atla.feature_budget = config_.atla_budget_kind == "reference"
                              ? agents::atla_reference_budget()
                              : nn::Vec(env_->observation_width(), config_.atla_uniform_budget);
    const agents::AtlaResult result =
        agents::atla_train(*env_, config_.ppo, config_.action_space, atla, config_.agent_id);
    for (const std::string& w : result.warnings) note("warning: " + w);
    agent_ = result.victim;
    agents::save_agent(result.adversary, layout_.agent_dir(config_.agent_id + "_adversary"),
                       config_.config_hash);
  } else if (config_.agent_kind == "load") {
    agent_ = agents::load_agent(config_.agent_path);
  } else {
    throw ConfigError("unsupported agent.kind '" + config_.agent_kind + "'");
  }
  have_agent_ = true;
  agents::save_agent(agent_, layout_.agent_dir(agent_.id), config_.config_hash);

  env::EpisodeLog clean = agents::evaluate_episode(*env_, agent_);
  clean.seed = config_.master_seed;
  env::save_episode_log(baseline_, layout_.log_path(agent_.id + ".baseline"));
  env::save_episode_log(clean, layout_.log_path(agent_.id + ".clean"));
  report_.clean_kpis = env::compute_kpis(clean, baseline_);
  note("trained agent '" + agent_.id + "', clean consumption KPI " +
       std::to_string(report_.clean_kpis.electricity_consumption));
  if (env_->clamped_action_count() > 0)
    note("warning: " + std::to_string(env_->clamped_action_count()) + " actions clamped");
}

attacks::AttackBudget Pipeline::build_budget(double epsilon) const {
  if (config_.attack_preset == "stealthy")
    return attacks::stealthy_preset(env_->scaler(), epsilon);
  return attacks::AttackBudget::uniform(env_->observation_width(), epsilon);
}

std::unique_ptr<attacks::ObservationAttack> Pipeline::build_attack(double epsilon) {
  using namespace attacks;
  const BifurcationMode mode = config_.attack_mode == "bifurcated"
                                   ? BifurcationMode::standard_for(agent_.space)
                                   : BifurcationMode::none();
  const AttackBudget budget = build_budget(epsilon);

  if (config_.attack_procedure == "none") return std::make_unique<NoAttack>();
  if (config_.attack_procedure == "fgm") {
    if (!config_.dynamic_epsilons.empty())
      return std::make_unique<DynamicDistortionAttack>(GradientMethod::Fgm, mode, budget,
                                                       config_.dynamic_epsilons);
    return std::make_unique<UntargetedGradientAttack>(GradientMethod::Fgm, mode, budget);
  }
  if (config_.attack_procedure == "pgd") {
    if (!config_.dynamic_epsilons.empty())
      return std::make_unique<DynamicDistortionAttack>(GradientMethod::Pgd, mode, budget,
                                                       config_.dynamic_epsilons, config_.schedule);
    return std::make_unique<UntargetedGradientAttack>(GradientMethod::Pgd, mode, budget,
                                                      config_.schedule);
  }
  if (config_.attack_procedure == "random")
    return std::make_unique<RandomNoiseAttack>(budget, sub_seed(config_.master_seed, "attack", 0));
  if (config_.attack_procedure == "targeted") {
    if (config_.target_policy_path.empty())
      throw ConfigError("attack.procedure=targeted needs attack.target_policy");
    if (!target_policy_) target_policy_ = agents::load_agent(config_.target_policy_path);
    return std::make_unique<TargetedAttack>(&*target_policy_, budget, config_.schedule);
  }
  if (config_.attack_procedure == "snooping_fgm") {
    if (!proxy_) {
      env::EpisodeLog history = agents::evaluate_episode(*env_, agent_);
      attacks::ProxySearchGrid grid =
          attacks::ProxySearchGrid::small_default(sub_seed(config_.master_seed, "proxy", 0));
      grid.folds = config_.snoop_folds;
      grid.epochs = config_.snoop_epochs;
      proxy_ = attacks::train_proxy({history}, grid, agent_.space);
      save_proxy(*proxy_, layout_.agent_dir(agent_.id + "_proxy"));
      note("trained proxy: " + proxy_->provenance);
    }
    return std::make_unique<SnoopingFgmAttack>(&*proxy_, budget, mode);
  }
  throw ConfigError("unsupported attack.procedure '" + config_.attack_procedure + "'");
}

void Pipeline::persist_attack_artifacts(const std::string& run_name) {
  attack_result_.clean_log.seed = config_.master_seed;
  attack_result_.adversarial_log.seed = config_.master_seed;
  env::save_episode_log(baseline_, layout_.log_path(run_name + ".baseline"));
  env::save_episode_log(attack_result_.clean_log, layout_.log_path(run_name + ".clean"));
  env::save_episode_log(attack_result_.adversarial_log, layout_.log_path(run_name + ".adversarial"));
  save_outcomes(attack_result_.outcomes, layout_.log_path(run_name + ".outcomes"));
}

void Pipeline::stage_attack() {
  std::unique_ptr<attacks::ObservationAttack> attack = build_attack(config_.attack_epsilon);
  attack_result_ = attacks::closed_loop_attack(*env_, agent_, *attack);
  have_attack_ = true;
  attack_run_name_ = agent_.id + "_" + attack->id();
  persist_attack_artifacts(attack_run_name_);

  const attacks::AttackMetrics m = attacks::attack_metrics(
      attack_result_.clean_log, attack_result_.adversarial_log, attack_result_.outcomes, baseline_);
  report_.has_attack = true;
  report_.attack_id = attack->id();
  report_.clean_kpis = m.clean_kpis;
  report_.attacked_kpis = m.adversarial_kpis;
  report_.consumption_regret = m.consumption_regret;
  report_.daily_peak_regret = m.daily_peak_regret;
  report_.ramping_regret = m.ramping_regret;
  report_.asr = m.asr;
  report_.action_mae = m.action_mae;
  report_.reversal_rate = m.reversal_rate;
  note("attack '" + attack->id() + "': consumption regret " +
       std::to_string(m.consumption_regret) + ", asr " + std::to_string(m.asr));
}

void Pipeline::stage_snoop() {
  // Snooping is the attack stage with the snooping procedure forced on.
  config_.attack_procedure = "snooping_fgm";
  stage_attack();
}

void Pipeline::stage_detect() {
  const auto clean_obs = attack_result_.clean_log.observations();
  const auto adv_obs = attack_result_.adversarial_log.observations();

  DetectionSummary summary;
  summary.baseline_pairs = config_.detect_baseline_pairs;
  summary.bootstraps = config_.detect_bootstraps;
  summary.estimator_note =
      "unbiased squared-MMD, Gaussian kernel, median-heuristic bandwidth frozen per test";

  const detect::CleanBaseline obs_baseline =
      detect::clean_baseline(clean_obs, config_.detect_baseline_pairs, config_.detect_bootstraps,
                             sub_seed(config_.master_seed, "detect", 0));
  detect::SampleSet clean_set{clean_obs, "clean"};
  detect::SampleSet adv_set{adv_obs, "adversarial"};
  const detect::MmdResult observed = detect::bootstrap_p_value(
      clean_set, adv_set, config_.detect_bootstraps, sub_seed(config_.master_seed, "detect", 1));
  summary.observation_space = detect::evaluate_against_baseline(obs_baseline, observed);

  const detect::SampleSet clean_var = detect::abs_variation(clean_obs);
  const detect::SampleSet adv_var = detect::abs_variation(adv_obs);
  const detect::CleanBaseline var_baseline = detect::clean_baseline(
      detect::truncate_to_whole_days(clean_var.rows), config_.detect_baseline_pairs,
      config_.detect_bootstraps, sub_seed(config_.master_seed, "detect", 2));
  const detect::MmdResult observed_var = detect::bootstrap_p_value(
      clean_var, adv_var, config_.detect_bootstraps, sub_seed(config_.master_seed, "detect", 3));
  summary.variation_space = detect::evaluate_against_baseline(var_baseline, observed_var);

  report_.detection = summary;
  note(std::string("detection: observations ") +
       (summary.observation_space.plausible ? "plausible" : "implausible") + ", variations " +
       (summary.variation_space.plausible ? "plausible" : "implausible"));

  if (config_.detect_controls) {
    const auto halves = detect::split_consecutive_halves(clean_obs);
    const auto evenodd = detect::split_even_odd_hours(clean_obs);
    const detect::MmdResult p_halves =
        detect::bootstrap_p_value(halves.first, halves.second, config_.detect_bootstraps,
                                  sub_seed(config_.master_seed, "detect", 4));
    const detect::MmdResult p_evenodd =
        detect::bootstrap_p_value(evenodd.first, evenodd.second, config_.detect_bootstraps,
                                  sub_seed(config_.master_seed, "detect", 5));
    note("negative controls: consecutive-halves p=" + std::to_string(p_halves.p_value) +
         ", even/odd-hours p=" + std::to_string(p_evenodd.p_value));
  }
}

void Pipeline::stage_sweep() {
  if (config_.sweep_epsilons.empty())
    throw ConfigError("sweep stage needs sweep.epsilons");
  report_.sweep_label = config_.attack_procedure +
                        (config_.attack_mode == "bifurcated" ? " (bifurcated)" : " (direct)");
  for (double epsilon : config_.sweep_epsilons) {
    std::unique_ptr<attacks::ObservationAttack> attack = build_attack(epsilon);
    const attacks::ClosedLoopResult result = attacks::closed_loop_attack(*env_, agent_, *attack);
    const attacks::AttackMetrics m =
        attacks::attack_metrics(result.clean_log, result.adversarial_log, result.outcomes, baseline_);
    SweepRow row;
    row.epsilon = epsilon;
    row.clean_consumption_kpi = m.clean_kpis.electricity_consumption;
    row.attacked_consumption_kpi = m.adversarial_kpis.electricity_consumption;
    row.consumption_regret = m.consumption_regret;
    row.asr = m.asr;
    report_.sweep.push_back(row);
    note("sweep epsilon " + std::to_string(epsilon) + ": consumption KPI " +
         std::to_string(row.attacked_consumption_kpi));
  }
  if (attack_run_name_.empty()) attack_run_name_ = agent_.id + "_sweep_" + config_.attack_procedure;
}

RunReport run_pipeline(KeyValueConfig kv, const PipelineOptions& options,
                       const std::vector<std::string>& stages) {
  Pipeline pipeline(std::move(kv), options);
  return pipeline.run(stages);
}

}  // namespace drlab::harness
