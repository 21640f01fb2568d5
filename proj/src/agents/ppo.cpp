#include "drlab/agents/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace drlab::agents {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)

std::vector<double> softmax(const nn::Vec& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

void PpoConfig::validate() const {
  if (!(clip_ratio > 0.0) || clip_ratio >= 1.0)
    throw std::invalid_argument("clip ratio must be in (0, 1)");
  if (!(discount > 0.0) || discount > 1.0)
    throw std::invalid_argument("discount must be in (0, 1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("learning rate must be positive");
  if (epochs_per_update < 1 || rollout_length < 1 || total_episodes < 1 || minibatch_size < 1)
    throw std::invalid_argument("ppo counts must be >= 1");
  if (!(gae_lambda >= 0.0) || gae_lambda > 1.0)
    throw std::invalid_argument("gae lambda must be in [0, 1]");
}

double ppo_surrogate(double advantage, double ratio, double clip_ratio) {
  const double clipped = std::clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio);
  return std::min(ratio * advantage, clipped * advantage);
}

double ppo_surrogate_ratio_gradient(double advantage, double ratio, double clip_ratio) {
  const double clipped = std::clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio);
  const double unclipped_value = ratio * advantage;
  const double clipped_value = clipped * advantage;
  if (unclipped_value <= clipped_value) return advantage;
  // Clipped branch selected: flat wherever the clamp is active.
  const bool inside = ratio > 1.0 - clip_ratio && ratio < 1.0 + clip_ratio;
  return inside ? advantage : 0.0;
}

PpoTrainer::PpoTrainer(PpoConfig config, ActionSpace space, std::size_t observation_width,
                       const std::string& agent_id)
    : config_(config),
      agent_(make_agent(space, observation_width, config.seed, agent_id)),
      actor_opt_(config.learning_rate),
      critic_opt_(config.learning_rate),
      rng_(config.seed ^ 0xd1b54a32d192ed03ULL) {
  config_.validate();
}

double PpoTrainer::log_prob_and_output_grad(const nn::Vec& actor_output, const Sample& s,
                                            nn::Vec* grad) const {
  if (agent_.space.is_discrete()) {
    const auto p = softmax(actor_output);
    if (grad) {
      grad->assign(actor_output.size(), 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) (*grad)[i] = -p[i];
      (*grad)[static_cast<std::size_t>(s.bin)] += 1.0;
    }
    return std::log(std::max(p[static_cast<std::size_t>(s.bin)], 1e-300));
  }
  const int dims = agent_.space.dims;
  if (grad) grad->assign(actor_output.size(), 0.0);
  double logp = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double raw_mean = actor_output[static_cast<std::size_t>(d)];
    const double mean = bounded_mean(raw_mean);
    const double raw_log_std = actor_output[static_cast<std::size_t>(dims + d)];
    const double log_std = std::clamp(raw_log_std, kLogStdMin, kLogStdMax);
    const double sigma = std::exp(log_std);
    const double u = s.presquash[static_cast<std::size_t>(d)];
    const double zscore = (u - mean) / sigma;
    const double tanh_u = std::tanh(u);
    logp += -0.5 * zscore * zscore - log_std - kHalfLog2Pi - std::log1p(-tanh_u * tanh_u + 1e-12);
    if (grad) {
      (*grad)[static_cast<std::size_t>(d)] = zscore / sigma * bounded_mean_derivative(raw_mean);
      const bool clamped = raw_log_std <= kLogStdMin || raw_log_std >= kLogStdMax;
      (*grad)[static_cast<std::size_t>(dims + d)] = clamped ? 0.0 : (zscore * zscore - 1.0);
    }
  }
  return logp;
}

void PpoTrainer::train(RolloutEnv& env, int episodes) {
  if (episodes < 1) return;
  const ActionSpace& space = agent_.space;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  int completed = 0;
  nn::Vec obs = env.reset();
  current_episode_return_ = 0.0;
  std::vector<Sample> rollout;
  rollout.reserve(static_cast<std::size_t>(config_.rollout_length));

  while (completed < episodes) {
    Sample s;
    s.observation = obs;
    const nn::Vec actor_out = agent_.actor.forward(obs);
    s.value = agent_.critic.forward(obs)[0];

    nn::Vec actions;
    if (space.is_discrete()) {
      const auto p = softmax(actor_out);
      double draw = unif(rng_);
      std::size_t pick = p.size() - 1;
      for (std::size_t i = 0; i < p.size(); ++i) {
        draw -= p[i];
        if (draw <= 0.0) {
          pick = i;
          break;
        }
      }
      s.bin = static_cast<int>(pick);
      actions = {space.bin_value(s.bin)};
    } else {
      s.presquash.resize(static_cast<std::size_t>(space.dims));
      actions.resize(static_cast<std::size_t>(space.dims));
      for (int d = 0; d < space.dims; ++d) {
        const double mean = bounded_mean(actor_out[static_cast<std::size_t>(d)]);
        const double log_std = std::clamp(actor_out[static_cast<std::size_t>(space.dims + d)],
                                          kLogStdMin, kLogStdMax);
        const double u = mean + std::exp(log_std) * gauss(rng_);
        s.presquash[static_cast<std::size_t>(d)] = u;
        actions[static_cast<std::size_t>(d)] = std::tanh(u);
      }
    }
    s.log_prob = log_prob_and_output_grad(actor_out, s, nullptr);

    RolloutStep fb = env.step(actions);
    s.reward = fb.reward;
    s.done = fb.done;
    current_episode_return_ += fb.reward;
    rollout.push_back(std::move(s));

    if (fb.done) {
      episode_returns_.push_back(current_episode_return_);
      current_episode_return_ = 0.0;
      ++completed;
      if (completed < episodes) obs = env.reset();
    } else {
      obs = std::move(fb.observation);
    }

    if (rollout.size() >= static_cast<std::size_t>(config_.rollout_length) ||
        completed >= episodes) {
      pending_obs_ = obs;
      mid_episode_ = !rollout.back().done;
      update(rollout);
      rollout.clear();
    }
  }
}

void PpoTrainer::update(const std::vector<Sample>& rollout) {
  const std::size_t n = rollout.size();
  if (n == 0) return;

  // GAE advantages with a critic bootstrap when the rollout was cut mid-episode.
  std::vector<double> advantages(n, 0.0), returns(n, 0.0);
  double next_value = mid_episode_ ? agent_.critic.forward(pending_obs_)[0] : 0.0;
  double next_advantage = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const Sample& s = rollout[t];
    const double not_done = s.done ? 0.0 : 1.0;
    const double delta = s.reward + config_.discount * not_done * next_value - s.value;
    next_advantage = delta + config_.discount * config_.gae_lambda * not_done * next_advantage;
    advantages[t] = next_advantage;
    returns[t] = advantages[t] + s.value;
    next_value = s.value;
  }

  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / static_cast<double>(n)) + 1e-8;
  std::vector<double> norm_adv(n);
  for (std::size_t t = 0; t < n; ++t) norm_adv[t] = (advantages[t] - mean) / stddev;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config_.epochs_per_update; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config_.minibatch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config_.minibatch_size));
      const double batch_size = static_cast<double>(stop - start);
      auto actor_grad = nn::zero_gradients(agent_.actor);
      auto critic_grad = nn::zero_gradients(agent_.critic);
      double actor_loss = 0.0, critic_loss = 0.0;

      for (std::size_t k = start; k < stop; ++k) {
        const Sample& s = rollout[order[k]];
        const double adv = norm_adv[order[k]];
        const double ret = returns[order[k]];

        const nn::ForwardTrace atr = agent_.actor.trace(s.observation);
        nn::Vec logp_grad;
        const double logp = log_prob_and_output_grad(atr.output(), s, &logp_grad);
        const double ratio = std::exp(logp - s.log_prob);
        const double dsurr_dratio = ppo_surrogate_ratio_gradient(adv, ratio, config_.clip_ratio);
        actor_loss -= ppo_surrogate(adv, ratio, config_.clip_ratio) / batch_size;

        nn::Vec out_grad(atr.output().size(), 0.0);
        const double surr_coef = -dsurr_dratio * ratio / batch_size;
        for (std::size_t i = 0; i < out_grad.size(); ++i) out_grad[i] = surr_coef * logp_grad[i];

        // Entropy bonus: categorical entropy for discrete heads, Gaussian
        // entropy for continuous heads.
        if (agent_.space.is_discrete()) {
          const auto p = softmax(atr.output());
          double entropy = 0.0;
          for (double pi : p)
            if (pi > 0.0) entropy -= pi * std::log(pi);
          actor_loss -= config_.entropy_coef * entropy / batch_size;
          for (std::size_t i = 0; i < out_grad.size(); ++i) {
            const double dent = p[i] > 0.0 ? -p[i] * (std::log(p[i]) + entropy) : 0.0;
            out_grad[i] += -config_.entropy_coef * dent / batch_size;
          }
        } else {
          const int dims = agent_.space.dims;
          for (int d = 0; d < dims; ++d) {
            const double raw = atr.output()[static_cast<std::size_t>(dims + d)];
            const double log_std = std::clamp(raw, kLogStdMin, kLogStdMax);
            actor_loss -= config_.entropy_coef * (log_std + 0.5 + kHalfLog2Pi) / batch_size;
            if (raw > kLogStdMin && raw < kLogStdMax)
              out_grad[static_cast<std::size_t>(dims + d)] += -config_.entropy_coef / batch_size;
          }
        }

        const nn::BackpropResult ab = agent_.actor.backprop(atr, out_grad);
        nn::accumulate(actor_grad, ab.parameter_gradients, 1.0);

        const nn::ForwardTrace ctr = agent_.critic.trace(s.observation);
        const double verr = ctr.output()[0] - ret;
        critic_loss += verr * verr / batch_size;
        const nn::BackpropResult cb = agent_.critic.backprop(ctr, {2.0 * verr / batch_size});
        nn::accumulate(critic_grad, cb.parameter_gradients, 1.0);
      }

      if (!std::isfinite(actor_loss) || !std::isfinite(critic_loss))
        throw std::runtime_error("ppo training diverged: non-finite loss at episode " +
                                 std::to_string(episode_returns_.size()));
      actor_opt_.step(agent_.actor, actor_grad);
      critic_opt_.step(agent_.critic, critic_grad);
    }
  }
}

TrainResult ppo_train(RolloutEnv& env, const PpoConfig& config, const ActionSpace& space,
                      const std::string& agent_id) {
  PpoTrainer trainer(config, space, env.observation_width(), agent_id);
  trainer.train(env, config.total_episodes);
  return TrainResult{trainer.agent(), trainer.episode_returns()};
}

TrainResult train_adversarial_policy(env::Environment env, const PpoConfig& config,
                                     const ActionSpace& space, const std::string& agent_id) {
  BatteryRolloutEnv rollout_env(std::move(env), /*negate_reward=*/true);
  return ppo_train(rollout_env, config, space, agent_id);
}

RolloutStep BatteryRolloutEnv::step(const nn::Vec& actions) {
  const env::EnvStep s = env_.step(actions.front());
  RolloutStep out;
  out.observation = s.observation;
  out.reward = negate_ ? -s.reward : s.reward;
  out.done = s.done;
  return out;
}

env::EpisodeLog evaluate_episode(env::Environment env, const PolicyAgent& agent) {
  env::EpisodeLog log;
  log.agent_id = agent.id;
  log.attack_id = "none";
  nn::Vec obs = env.reset();
  for (std::size_t t = 0; t < env.episode_length(); ++t) {
    const ActResult a = act(agent, obs);
    const env::EnvStep s = env.step(a.action());
    log.steps.push_back(env::StepRecord{obs, a.action(), s.reward, s.net_consumption});
    if (s.done) break;
    obs = s.observation;
  }
  return log;
}

}  // namespace drlab::agents
