#include "drlab/agents/policy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace drlab::agents {

namespace {

std::size_t argmax_index(const Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

PolicyAgent make_agent(const ActionSpace& space, std::size_t observation_width,
                       std::uint64_t seed, const std::string& id) {
  using nn::Activation;
  const std::vector<std::size_t> actor_widths = {observation_width, 64, 64,
                                                 space.actor_output_width()};
  const std::vector<std::size_t> critic_widths = {observation_width, 64, 64, 1};
  const std::vector<Activation> acts = {Activation::Rectifier, Activation::Rectifier,
                                        Activation::Identity};
  PolicyAgent agent;
  agent.actor = nn::DenseNetwork::random(actor_widths, acts, seed);
  agent.critic = nn::DenseNetwork::random(critic_widths, acts, seed ^ 0x9e3779b97f4a7c15ULL);
  if (!space.is_discrete()) {
    // Start continuous exploration at the clamp floor so early draws stay off
    // the saturated ends of the squashed range.
    auto& head = agent.actor.mutable_layers().back();
    for (int d = 0; d < space.dims; ++d)
      head.bias[static_cast<std::size_t>(space.dims + d)] = kLogStdMin;
  }
  agent.space = space;
  agent.id = id;
  return agent;
}

ActResult act(const PolicyAgent& agent, const Vec& observation) {
  ActResult r;
  r.actor_output = agent.actor.forward(observation);
  if (agent.space.is_discrete()) {
    r.bin = static_cast<int>(argmax_index(r.actor_output));
    r.actions = {agent.space.bin_value(r.bin)};
  } else {
    r.actions.resize(agent.space.dims);
    for (int d = 0; d < agent.space.dims; ++d)
      r.actions[d] = std::tanh(bounded_mean(r.actor_output[d]));
  }
  return r;
}

ActResult act_stochastic(const PolicyAgent& agent, const Vec& observation, std::mt19937_64& rng) {
  ActResult r;
  r.actor_output = agent.actor.forward(observation);
  if (agent.space.is_discrete()) {
    // Gumbel-max sampling over the categorical logits.
    std::uniform_real_distribution<double> unif(1e-12, 1.0);
    double best = -1e300;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < r.actor_output.size(); ++i) {
      const double g = r.actor_output[i] - std::log(-std::log(unif(rng)));
      if (g > best) {
        best = g;
        pick = i;
      }
    }
    r.bin = static_cast<int>(pick);
    r.actions = {agent.space.bin_value(r.bin)};
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    r.actions.resize(agent.space.dims);
    for (int d = 0; d < agent.space.dims; ++d) {
      const double mean = bounded_mean(r.actor_output[d]);
      const double log_std =
          std::clamp(r.actor_output[agent.space.dims + d], kLogStdMin, kLogStdMax);
      const double u = mean + std::exp(log_std) * gauss(rng);
      r.actions[d] = std::tanh(u);
    }
  }
  return r;
}

void save_agent(const PolicyAgent& agent, const std::string& directory,
                const std::string& config_hash) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  agent.actor.save_file((fs::path(directory) / "actor.net").string());
  agent.critic.save_file((fs::path(directory) / "critic.net").string());
  nlohmann::json j;
  j["schema"] = "drlab-agent-v1";
  j["id"] = agent.id;
  j["action_space"]["kind"] = agent.space.is_discrete() ? "discrete" : "continuous";
  j["action_space"]["n_bins"] = agent.space.n_bins;
  j["action_space"]["dims"] = agent.space.dims;
  j["deterministic_eval"] = agent.deterministic_eval;
  j["training_config_hash"] = config_hash;
  std::ofstream os((fs::path(directory) / "manifest.json").string());
  if (!os) throw std::runtime_error("cannot write agent manifest in " + directory);
  os << j.dump(2) << "\n";
}

PolicyAgent load_agent(const std::string& directory) {
  namespace fs = std::filesystem;
  std::ifstream is((fs::path(directory) / "manifest.json").string());
  if (!is) throw std::runtime_error("cannot open agent manifest in " + directory);
  nlohmann::json j;
  is >> j;
  if (j.value("schema", "") != "drlab-agent-v1")
    throw std::runtime_error("unknown agent manifest schema in " + directory);
  PolicyAgent agent;
  const std::string kind = j.at("action_space").at("kind").get<std::string>();
  if (kind == "discrete")
    agent.space = ActionSpace::discrete(j.at("action_space").at("n_bins").get<int>());
  else
    agent.space = ActionSpace::continuous(j.at("action_space").at("dims").get<int>());
  agent.deterministic_eval = j.value("deterministic_eval", true);
  agent.id = j.value("id", "agent");
  agent.actor = nn::DenseNetwork::load_file((fs::path(directory) / "actor.net").string());
  agent.critic = nn::DenseNetwork::load_file((fs::path(directory) / "critic.net").string());
  return agent;
}

}  // namespace drlab::agents
