#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "drlab/agents/atla.hpp"
#include "drlab/agents/ppo.hpp"

using namespace drlab;
using namespace drlab::agents;
using drlab::nn::Vec;

namespace {

env::Environment tiny_env(std::uint64_t seed = 11, std::size_t days = 1) {
  return env::Environment(env::generate_synthetic(seed, days), env::BatteryState{},
                          env::RewardSpec{});
}

PpoConfig tiny_config(std::uint64_t seed, int episodes, int rollout) {
  PpoConfig cfg;
  cfg.total_episodes = episodes;
  cfg.rollout_length = rollout;
  cfg.minibatch_size = 64;
  cfg.seed = seed;
  return cfg;
}

// Reward +1 iff the action is positive; observations are seeded noise.
class PositiveActionEnv : public RolloutEnv {
 public:
  explicit PositiveActionEnv(std::uint64_t seed) : rng_(seed) {}
  Vec reset() override {
    t_ = 0;
    return draw();
  }
  RolloutStep step(const Vec& actions) override {
    RolloutStep s;
    s.reward = actions.front() > 0.0 ? 1.0 : 0.0;
    s.done = ++t_ >= 64;
    if (!s.done) s.observation = draw();
    return s;
  }
  std::size_t observation_width() const override { return 6; }

 private:
  Vec draw() {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec v(6);
    for (double& x : v) x = unif(rng_);
    return v;
  }
  std::mt19937_64 rng_;
  int t_ = 0;
};

}  // namespace

TEST_CASE("discrete bins map symmetrically onto [-1, 1]") {
  const ActionSpace s = ActionSpace::discrete(20);
  CHECK(s.bin_value(0) == doctest::Approx(-1.0));
  CHECK(s.bin_value(19) == doctest::Approx(1.0));
  CHECK(s.bin_value(10) == doctest::Approx(1.0 / 19.0));
  for (int i = 0; i < 20; ++i) CHECK(s.bin_value(i) == -s.bin_value(19 - i));  // exact
  CHECK(s.nearest_bin(s.bin_value(13)) == 13);
  CHECK_THROWS_AS(ActionSpace::discrete(7), std::invalid_argument);
  CHECK_THROWS_AS(ActionSpace::discrete(0), std::invalid_argument);
}

TEST_CASE("continuous act squashes the mean head; zero mean gives zero action") {
  PolicyAgent agent = make_agent(ActionSpace::continuous(), 4, 3, "c");
  for (auto& layer : agent.actor.mutable_layers()) {
    std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  const ActResult r = act(agent, {0.1, 0.2, 0.3, 0.4});
  CHECK(r.action() == 0.0);
}

TEST_CASE("act in deterministic mode never mutates the agent") {
  const PolicyAgent agent = make_agent(ActionSpace::discrete(10), 5, 99, "d");
  const PolicyAgent before = agent;
  const Vec obs = {0.1, 0.9, 0.4, 0.2, 0.7};
  const ActResult a = act(agent, obs);
  const ActResult b = act(agent, obs);
  CHECK(a.bin == b.bin);
  for (std::size_t k = 0; k < agent.actor.layer_count(); ++k)
    CHECK(agent.actor.layers()[k].weight.data == before.actor.layers()[k].weight.data);
}

TEST_CASE("ppo surrogate gradient is zero exactly where the ratio is clipped") {
  const double clip = 0.2;
  // advantage > 0: clipped above
  CHECK(ppo_surrogate_ratio_gradient(2.0, 1.5, clip) == 0.0);
  CHECK(ppo_surrogate_ratio_gradient(2.0, 1.0, clip) == 2.0);
  CHECK(ppo_surrogate_ratio_gradient(2.0, 0.5, clip) == 2.0);  // pessimistic side unclipped
  // advantage < 0: clipped below
  CHECK(ppo_surrogate_ratio_gradient(-1.0, 0.5, clip) == 0.0);
  CHECK(ppo_surrogate_ratio_gradient(-1.0, 1.5, clip) == -1.0);
  // synthetic sweep: gradient matches finite differences of the surrogate
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> adv(-2.0, 2.0), ratio(0.2, 2.0);
  for (int i = 0; i < 300; ++i) {
    const double a = adv(rng);
    const double r = ratio(rng);
    if (std::abs(r - (1.0 - clip)) < 1e-6 || std::abs(r - (1.0 + clip)) < 1e-6) continue;
    const double h = 1e-7;
    const double fd =
        (ppo_surrogate(a, r + h, clip) - ppo_surrogate(a, r - h, clip)) / (2.0 * h);
    CHECK(ppo_surrogate_ratio_gradient(a, r, clip) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("ppo config validation") {
  PpoConfig bad;
  bad.clip_ratio = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PpoConfig{};
  bad.discount = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ppo learns to pick positive actions in a degenerate env") {
  PositiveActionEnv env(5);
  PpoConfig cfg = tiny_config(21, 30, 64);
  cfg.learning_rate = 3e-3;
  cfg.discount = 0.5;
  const TrainResult result = ppo_train(env, cfg, ActionSpace::discrete(8), "sanity");

  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int positive = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    Vec obs(6);
    for (double& v : obs) v = unif(rng);
    if (act(result.agent, obs).action() > 0.0) ++positive;
  }
  CHECK(positive >= static_cast<int>(0.95 * trials));
}

TEST_CASE("ppo training is deterministic given the seed") {
  env::Environment e = tiny_env();
  agents::BatteryRolloutEnv env_a(e), env_b(e);
  const PpoConfig cfg = tiny_config(7, 3, 24);
  const TrainResult a = ppo_train(env_a, cfg, ActionSpace::discrete(4), "a");
  const TrainResult b = ppo_train(env_b, cfg, ActionSpace::discrete(4), "b");
  CHECK(a.episode_returns == b.episode_returns);
  for (std::size_t k = 0; k < a.agent.actor.layer_count(); ++k)
    CHECK(a.agent.actor.layers()[k].weight.data == b.agent.actor.layers()[k].weight.data);

  agents::BatteryRolloutEnv env_c(e);
  PpoConfig other = cfg;
  other.seed = 8;
  const TrainResult c = ppo_train(env_c, other, ActionSpace::discrete(4), "c");
  CHECK(a.episode_returns != c.episode_returns);
}

TEST_CASE("adversarial training sees the exact negated reward") {
  env::Environment e = tiny_env();
  agents::BatteryRolloutEnv plain(e, false), negated(e, true);
  plain.reset();
  negated.reset();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 24; ++t) {
    const double a = unif(rng);
    const RolloutStep sp = plain.step({a});
    const RolloutStep sn = negated.step({a});
    CHECK(sn.reward == -sp.reward);
    if (sp.done) break;
  }
}

TEST_CASE("continuous ppo trains without diverging on a short run") {
  env::Environment e = tiny_env(3, 1);
  agents::BatteryRolloutEnv env(e);
  PpoConfig cfg = tiny_config(13, 3, 24);
  const TrainResult result = ppo_train(env, cfg, ActionSpace::continuous(), "cont");
  CHECK(result.episode_returns.size() == 3);
  for (double r : result.episode_returns) CHECK(std::isfinite(r));
}

TEST_CASE("adversary perturbation obeys the per-feature bound and the [0,1] box") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-2.0, 2.0), obs_dist(0.0, 1.0);
  Vec budget = {0.1, 0.0, 0.5, 0.02};
  for (int trial = 0; trial < 200; ++trial) {
    Vec obs(4), action(4);
    for (double& v : obs) v = obs_dist(rng);
    for (double& v : action) v = unif(rng);
    const Vec out = apply_adversary_perturbation(obs, action, budget);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::abs(out[j] - obs[j]) <= budget[j]);
      CHECK(out[j] >= 0.0);
      CHECK(out[j] <= 1.0);
    }
    CHECK(out[1] == obs[1]);  // masked feature never moves
  }
}

TEST_CASE("atla with an all-zero budget degenerates to plain ppo") {
  env::Environment e = tiny_env(19, 1);
  const PpoConfig cfg = tiny_config(31, 4, 24);

  AtlaConfig atla;
  atla.feature_budget = Vec(e.observation_width(), 0.0);
  atla.alternation_period = 2;
  atla.total_alternations = 2;
  const AtlaResult robust = atla_train(e, cfg, ActionSpace::discrete(4), atla, "atla");
  REQUIRE(robust.warnings.size() == 1);

  agents::BatteryRolloutEnv plain_env(e);
  const TrainResult plain = ppo_train(plain_env, cfg, ActionSpace::discrete(4), "plain");
  CHECK(robust.victim_episode_returns == plain.episode_returns);
  for (std::size_t k = 0; k < plain.agent.actor.layer_count(); ++k)
    CHECK(robust.victim.actor.layers()[k].weight.data ==
          plain.agent.actor.layers()[k].weight.data);
}

TEST_CASE("atla reference budget covers categories and masks temporal features") {
  const Vec b = atla_reference_budget();
  REQUIRE(b.size() == env::kObservationWidth);
  CHECK(b[env::kMonth] == 0.0);
  CHECK(b[env::kHour] == 0.0);
  CHECK(b[env::kTemperature] == doctest::Approx(0.16));
  CHECK(b[env::kTemperaturePred24h] == doctest::Approx(0.16));
  CHECK(b[env::kSolarGeneration] == doctest::Approx(1.5e-3));
  CHECK(b[env::kSocFeature] == doctest::Approx(0.32));
  CHECK(b[env::kNetConsumptionFeature] == doctest::Approx(3.3e-3));
  CHECK(b[env::kPricingPred6h] == doctest::Approx(0.52));
}

TEST_CASE("atla config validation") {
  env::Environment e = tiny_env();
  AtlaConfig atla;
  atla.feature_budget = Vec(3, 0.1);  // wrong width
  CHECK_THROWS_AS(atla_train(e, tiny_config(1, 2, 24), ActionSpace::discrete(4), atla),
                  std::invalid_argument);
  atla.feature_budget = Vec(e.observation_width(), -0.1);
  CHECK_THROWS_AS(atla_train(e, tiny_config(1, 2, 24), ActionSpace::discrete(4), atla),
                  std::invalid_argument);
}

TEST_CASE("agent save/load round-trips through the manifest") {
  const PolicyAgent agent = make_agent(ActionSpace::discrete(6), 5, 2024, "roundtrip");
  const std::string dir =
      (std::filesystem::temp_directory_path() / "drlab_agent_roundtrip").string();
  save_agent(agent, dir, "deadbeef");
  const PolicyAgent loaded = load_agent(dir);
  CHECK(loaded.id == "roundtrip");
  CHECK(loaded.space.is_discrete());
  CHECK(loaded.space.n_bins == 6);
  const Vec obs = {0.3, 0.1, 0.8, 0.5, 0.2};
  CHECK(act(loaded, obs).bin == act(agent, obs).bin);
  CHECK(loaded.actor.layers()[0].weight.data == agent.actor.layers()[0].weight.data);
  std::filesystem::remove_all(dir);
}
