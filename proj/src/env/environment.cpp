#include "drlab/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace drlab::env {

double reward_value(const RewardSpec& spec, double net_consumption, double /*generation*/,
                    double soc) {
  const double base = -std::max(net_consumption, 0.0);
  if (spec.kind == RewardKind::SolarPenalty && net_consumption > 0.0)
    return base - spec.penalty_weight * soc;
  return base;
}

FeatureScaler::FeatureScaler(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("scaler bound widths differ");
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (lo_[i] > hi_[i]) throw std::invalid_argument("scaler lo > hi at feature " + std::to_string(i));
}

double FeatureScaler::normalize_feature(std::size_t i, double raw) const {
  const double span = hi_[i] - lo_[i];
  if (span == 0.0) return 0.5;  // constant feature maps to midpoint
  return std::clamp((raw - lo_[i]) / span, 0.0, 1.0);
}

double FeatureScaler::denormalize_feature(std::size_t i, double normalized) const {
  const double span = hi_[i] - lo_[i];
  if (span == 0.0) return lo_[i];
  return lo_[i] + normalized * span;
}

Vec FeatureScaler::normalize(const Vec& raw) const {
  if (raw.size() != lo_.size()) throw std::invalid_argument("scaler width mismatch");
  Vec out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = normalize_feature(i, raw[i]);
  return out;
}

Vec FeatureScaler::denormalize(const Vec& normalized) const {
  if (normalized.size() != lo_.size()) throw std::invalid_argument("scaler width mismatch");
  Vec out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) out[i] = denormalize_feature(i, normalized[i]);
  return out;
}

std::vector<Vec> EpisodeLog::observations() const {
  std::vector<Vec> out;
  out.reserve(steps.size());
  for (const StepRecord& s : steps) out.push_back(s.observation);
  return out;
}

std::vector<double> EpisodeLog::net_consumption_series() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const StepRecord& s : steps) out.push_back(s.net_consumption);
  return out;
}

void save_episode_log(const EpisodeLog& log, const std::string& path) {
  nlohmann::json j;
  j["agent_id"] = log.agent_id;
  j["attack_id"] = log.attack_id;
  j["seed"] = log.seed;
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& s : log.steps) {
    nlohmann::json js;
    js["obs"] = s.observation;
    js["action"] = s.action;
    js["reward"] = s.reward;
    js["net"] = s.net_consumption;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open episode log for write: " + path);
  os << j.dump(0) << "\n";
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open episode log: " + path);
  nlohmann::json j;
  is >> j;
  EpisodeLog log;
  log.agent_id = j.at("agent_id").get<std::string>();
  log.attack_id = j.at("attack_id").get<std::string>();
  log.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& js : j.at("steps")) {
    StepRecord s;
    s.observation = js.at("obs").get<Vec>();
    s.action = js.at("action").get<double>();
    s.reward = js.at("reward").get<double>();
    s.net_consumption = js.at("net").get<double>();
    log.steps.push_back(std::move(s));
  }
  return log;
}

namespace {

// Bounds for every observation feature. Net consumption bounds come from the
// null-controller baseline (e_t = load - generation), fixed here so epsilon
// scaling stays reproducible across runs.
FeatureScaler build_scaler(const BuildingDataset& dataset) {
  Vec lo(kObservationWidth, std::numeric_limits<double>::infinity());
  Vec hi(kObservationWidth, -std::numeric_limits<double>::infinity());
  for (const auto& row : dataset.rows) {
    for (std::size_t c = 0; c < kDatasetColumnCount; ++c) {
      lo[c] = std::min(lo[c], row[c]);
      hi[c] = std::max(hi[c], row[c]);
    }
    const double net = row[kNonShiftableLoad] - row[kSolarGeneration];
    lo[kNetConsumptionFeature] = std::min(lo[kNetConsumptionFeature], net);
    hi[kNetConsumptionFeature] = std::max(hi[kNetConsumptionFeature], net);
  }
  lo[kSocFeature] = 0.0;
  hi[kSocFeature] = 1.0;
  return FeatureScaler(std::move(lo), std::move(hi));
}

}  // namespace

Environment::Environment(BuildingDataset dataset, BatteryState initial_battery, RewardSpec reward)
    : dataset_(std::make_shared<const BuildingDataset>(std::move(dataset))),
      initial_battery_(initial_battery),
      reward_(reward),
      scaler_(build_scaler(*dataset_)) {
  validate_dataset(*dataset_);
  if (initial_battery_.soc < 0.0 || initial_battery_.soc > 1.0)
    throw std::invalid_argument("initial soc must be in [0, 1]");
  battery_ = initial_battery_;
  previous_net_ = dataset_->at(0, kNonShiftableLoad) - dataset_->at(0, kSolarGeneration);
}

Vec Environment::raw_observation() const {
  Vec raw(kObservationWidth);
  const auto& row = dataset_->rows[t_];
  for (std::size_t c = 0; c < kDatasetColumnCount; ++c) raw[c] = row[c];
  raw[kSocFeature] = battery_.soc;
  raw[kNetConsumptionFeature] = previous_net_;
  return raw;
}

Vec Environment::reset() {
  battery_ = initial_battery_;
  t_ = 0;
  clamped_actions_ = 0;
  previous_net_ = dataset_->at(0, kNonShiftableLoad) - dataset_->at(0, kSolarGeneration);
  return scaler_.normalize(raw_observation());
}

EnvStep Environment::step(double action) {
  if (t_ >= dataset_->hours()) throw std::logic_error("step called on a finished episode");
  if (action < -1.0 || action > 1.0) ++clamped_actions_;
  const double a = std::clamp(action, -1.0, 1.0);

  const auto& row = dataset_->rows[t_];
  const BatteryStepResult b = battery_step(battery_, a);
  battery_ = b.next;
  const double generation = row[kSolarGeneration];
  const double net = row[kNonShiftableLoad] - generation + b.grid_energy_kwh;
  EnvStep out;
  out.reward = reward_value(reward_, net, generation, battery_.soc);
  out.net_consumption = net;
  previous_net_ = net;
  ++t_;
  out.done = t_ >= dataset_->hours();
  if (!out.done) out.observation = scaler_.normalize(raw_observation());
  return out;
}

EpisodeLog run_constant_action(Environment env, double action, const std::string& agent_id) {
  EpisodeLog log;
  log.agent_id = agent_id;
  log.attack_id = "none";
  Vec obs = env.reset();
  for (std::size_t t = 0; t < env.episode_length(); ++t) {
    EnvStep s = env.step(action);
    log.steps.push_back(StepRecord{obs, action, s.reward, s.net_consumption});
    if (s.done) break;
    obs = std::move(s.observation);
  }
  return log;
}

}  // namespace drlab::env
