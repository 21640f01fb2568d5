#pragma once

#include "drlab/attacks/gradient_attacks.hpp"
#include "drlab/env/kpi.hpp"

namespace drlab::attacks {

struct ClosedLoopResult {
  env::EpisodeLog clean_log;        // unattacked reference episode
  env::EpisodeLog adversarial_log;  // perturbed observations the victim saw
  std::vector<AttackOutcome> outcomes;
};

/// Runs one clean and one attacked episode. At every attacked step the true
/// observation of the attacked trajectory is perturbed before the victim
/// acts, so the environment diverges under the induced actions.
ClosedLoopResult closed_loop_attack(env::Environment env, const agents::PolicyAgent& agent,
                                    ObservationAttack& attack);

struct AttackMetrics {
  double asr = 0.0;
  double action_mae = 0.0;
  double reversal_rate = 0.0;
  env::KpiReport clean_kpis;
  env::KpiReport adversarial_kpis;
  double consumption_regret = 0.0;
  double daily_peak_regret = 0.0;
  double ramping_regret = 0.0;
};

/// ASR, action MAE and (dis)charge reversal come from the per-step
/// (original, adversarial) action pairs; with no outcomes the two logs are
/// compared stepwise. Regrets are attacked KPI minus clean KPI, both
/// normalized by the same no-controller baseline.
AttackMetrics attack_metrics(const env::EpisodeLog& clean, const env::EpisodeLog& adversarial,
                             const std::vector<AttackOutcome>& outcomes,
                             const env::EpisodeLog& baseline);

/// Budget-soundness check: every |delta_j| <= epsilon_j (exact) and every
/// adversarial feature inside the valid box. Throws on violation.
void assert_budget_sound(const std::vector<AttackOutcome>& outcomes, const AttackBudget& budget);

}  // namespace drlab::attacks
