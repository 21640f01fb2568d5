#include "drlab/attacks/closed_loop.hpp"

#include <cmath>
#include <stdexcept>

#include "drlab/agents/ppo.hpp"

namespace drlab::attacks {

ClosedLoopResult closed_loop_attack(env::Environment env, const agents::PolicyAgent& agent,
                                    ObservationAttack& attack) {
  ClosedLoopResult result;
  result.clean_log = agents::evaluate_episode(env, agent);
  result.clean_log.attack_id = "none";

  env::EpisodeLog& adv = result.adversarial_log;
  adv.agent_id = agent.id;
  adv.attack_id = attack.id();
  Vec obs = env.reset();
  const std::size_t length = env.episode_length();
  result.outcomes.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    AttackOutcome outcome = attack.perturb(agent, obs, t);
    const double action = agents::act(agent, outcome.adversarial_observation).action();
    const env::EnvStep s = env.step(action);
    adv.steps.push_back(
        env::StepRecord{outcome.adversarial_observation, action, s.reward, s.net_consumption});
    result.outcomes.push_back(std::move(outcome));
    if (s.done) break;
    obs = s.observation;
  }
  return result;
}

AttackMetrics attack_metrics(const env::EpisodeLog& clean, const env::EpisodeLog& adversarial,
                             const std::vector<AttackOutcome>& outcomes,
                             const env::EpisodeLog& baseline) {
  if (clean.size() != adversarial.size())
    throw std::invalid_argument("attack metrics need equally long logs");
  if (!outcomes.empty() && outcomes.size() != adversarial.size())
    throw std::invalid_argument("outcome count must match the adversarial log");

  AttackMetrics m;
  const std::size_t n = adversarial.size();
  std::size_t changed = 0, reversed = 0;
  double mae = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double a_orig, a_adv;
    bool flipped;
    if (!outcomes.empty()) {
      a_orig = outcomes[t].original_action;
      a_adv = outcomes[t].adversarial_action;
      flipped = outcomes[t].success;
    } else {
      a_orig = clean.steps[t].action;
      a_adv = adversarial.steps[t].action;
      flipped = std::abs(a_adv - a_orig) > kActionChangeThreshold;
    }
    if (flipped) ++changed;
    mae += std::abs(a_adv - a_orig);
    // Zero counts as a positive (charge-side) action.
    const bool orig_charge = a_orig >= 0.0;
    const bool adv_charge = a_adv >= 0.0;
    if (orig_charge != adv_charge) ++reversed;
  }
  m.asr = static_cast<double>(changed) / static_cast<double>(n);
  m.action_mae = mae / static_cast<double>(n);
  m.reversal_rate = static_cast<double>(reversed) / static_cast<double>(n);

  m.clean_kpis = env::compute_kpis(clean, baseline);
  m.adversarial_kpis = env::compute_kpis(adversarial, baseline);
  m.consumption_regret =
      m.adversarial_kpis.electricity_consumption - m.clean_kpis.electricity_consumption;
  m.daily_peak_regret = m.adversarial_kpis.daily_peaks - m.clean_kpis.daily_peaks;
  m.ramping_regret = m.adversarial_kpis.ramping - m.clean_kpis.ramping;
  return m;
}

void assert_budget_sound(const std::vector<AttackOutcome>& outcomes, const AttackBudget& budget) {
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const AttackOutcome& o = outcomes[t];
    for (std::size_t j = 0; j < o.delta.size(); ++j) {
      if (std::abs(o.delta[j]) > budget.epsilon[j])
        throw std::logic_error("budget violation at step " + std::to_string(t) + " feature " +
                               std::to_string(j));
      if (o.adversarial_observation[j] < budget.box_lo[j] ||
          o.adversarial_observation[j] > budget.box_hi[j])
        throw std::logic_error("valid-box violation at step " + std::to_string(t) + " feature " +
                               std::to_string(j));
      if (budget.epsilon[j] == 0.0 && o.delta[j] != 0.0)
        throw std::logic_error("masked feature changed at step " + std::to_string(t) +
                               " feature " + std::to_string(j));
    }
  }
}

}  // namespace drlab::attacks
