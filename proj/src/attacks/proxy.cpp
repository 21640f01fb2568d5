#include "drlab/attacks/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "drlab/nn/optimizer.hpp"

namespace drlab::attacks {

namespace {

struct CloningSet {
  std::vector<Vec> observations;
  std::vector<double> actions;
  std::vector<int> bins;
};

CloningSet collect(const std::vector<env::EpisodeLog>& logs,
                   const agents::ActionSpace& victim_space) {
  CloningSet set;
  for (const env::EpisodeLog& log : logs) {
    for (const env::StepRecord& s : log.steps) {
      set.observations.push_back(s.observation);
      set.actions.push_back(s.action);
      if (victim_space.is_discrete()) set.bins.push_back(victim_space.nearest_bin(s.action));
    }
  }
  return set;
}

nn::DenseNetwork make_imitator(const ProxyGridPoint& point, std::size_t in_width,
                               std::size_t out_width, std::uint64_t seed) {
  std::vector<std::size_t> widths = {in_width};
  widths.insert(widths.end(), point.hidden_widths.begin(), point.hidden_widths.end());
  widths.push_back(out_width);
  std::vector<nn::Activation> acts(widths.size() - 1, nn::Activation::Rectifier);
  acts.back() = nn::Activation::Identity;
  return nn::DenseNetwork::random(widths, acts, seed);
}

double sample_loss(const nn::DenseNetwork& net, const CloningSet& set, std::size_t idx,
                   bool discrete) {
  nn::LossSpec spec = discrete
                          ? nn::LossSpec::cross_entropy(static_cast<std::size_t>(set.bins[idx]),
                                                        nn::LossDirection::MinimizeTowardTarget)
                          : nn::LossSpec::mse({set.actions[idx]},
                                              nn::LossDirection::MinimizeTowardTarget);
  return nn::loss_value(net, set.observations[idx], spec);
}

void fit(nn::DenseNetwork& net, const CloningSet& set, std::size_t begin, std::size_t end,
         bool discrete, const ProxyGridPoint& point, const ProxySearchGrid& grid,
         std::mt19937_64& rng) {
  nn::AdamOptimizer opt(point.learning_rate);
  std::vector<std::size_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  nn::LossSpec spec = discrete ? nn::LossSpec::cross_entropy(0, nn::LossDirection::MinimizeTowardTarget)
                               : nn::LossSpec::mse({0.0}, nn::LossDirection::MinimizeTowardTarget);
  for (int epoch = 0; epoch < grid.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(grid.minibatch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(grid.minibatch_size));
      std::vector<nn::BatchSample> batch;
      batch.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        nn::BatchSample b;
        b.input = set.observations[order[k]];
        if (discrete)
          b.label = static_cast<std::size_t>(set.bins[order[k]]);
        else
          b.reference = {set.actions[order[k]]};
        batch.push_back(std::move(b));
      }
      opt.step(net, nn::parameter_gradient(net, batch, spec));
    }
  }
}

}  // namespace

ProxySearchGrid ProxySearchGrid::small_default(std::uint64_t seed) {
  ProxySearchGrid grid;
  grid.points = {
      {{32}, 1e-3},
      {{64}, 1e-3},
      {{64, 64}, 1e-3},
      {{64, 64}, 3e-4},
  };
  grid.seed = seed;
  return grid;
}

double ProxyModel::predict_action(const Vec& observation) const {
  const Vec out = imitator.forward(observation);
  if (!discrete) return std::clamp(out[0], -1.0, 1.0);
  return agents::ActionSpace::discrete(n_bins).bin_value(predict_bin(observation));
}

int ProxyModel::predict_bin(const Vec& observation) const {
  if (!discrete) throw std::logic_error("predict_bin on a continuous proxy");
  const Vec out = imitator.forward(observation);
  return static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
}

std::vector<std::size_t> time_series_split_bounds(std::size_t n, int folds) {
  if (folds < 1) throw std::invalid_argument("need folds >= 1");
  if (n < static_cast<std::size_t>(folds + 1))
    throw std::invalid_argument("not enough samples for time-series splits");
  std::vector<std::size_t> bounds(static_cast<std::size_t>(folds) + 1);
  for (int i = 0; i <= folds; ++i)
    bounds[static_cast<std::size_t>(i)] = n * static_cast<std::size_t>(i + 1) / static_cast<std::size_t>(folds + 1);
  return bounds;
}

ProxyModel train_proxy(const std::vector<env::EpisodeLog>& logs, const ProxySearchGrid& grid,
                       const agents::ActionSpace& victim_space) {
  if (logs.empty()) throw std::invalid_argument("proxy training needs at least one episode log");
  if (grid.points.empty()) throw std::invalid_argument("proxy search grid is empty");
  const CloningSet set = collect(logs, victim_space);
  if (set.observations.empty()) throw std::invalid_argument("proxy training logs are empty");

  const bool discrete = victim_space.is_discrete();
  const std::size_t in_width = set.observations.front().size();
  const std::size_t out_width =
      discrete ? static_cast<std::size_t>(victim_space.n_bins) : std::size_t{1};
  const auto bounds = time_series_split_bounds(set.observations.size(), grid.folds);

  double best_score = 0.0;
  std::size_t best_point = 0;
  for (std::size_t p = 0; p < grid.points.size(); ++p) {
    double score = 0.0;
    for (int fold = 0; fold < grid.folds; ++fold) {
      const std::size_t train_end = bounds[static_cast<std::size_t>(fold)];
      const std::size_t val_end = bounds[static_cast<std::size_t>(fold) + 1];
      nn::DenseNetwork net =
          make_imitator(grid.points[p], in_width, out_width, grid.seed + 1000 * p + static_cast<std::size_t>(fold));
      std::mt19937_64 rng(grid.seed ^ (0x2545f4914f6cdd1dULL * (p + 1)) ^ static_cast<std::uint64_t>(fold));
      fit(net, set, 0, train_end, discrete, grid.points[p], grid, rng);
      double val = 0.0;
      for (std::size_t i = train_end; i < val_end; ++i) val += sample_loss(net, set, i, discrete);
      score += val / static_cast<double>(val_end - train_end);
    }
    score /= static_cast<double>(grid.folds);
    if (p == 0 || score < best_score) {
      best_score = score;
      best_point = p;
    }
  }

  ProxyModel proxy;
  proxy.discrete = discrete;
  proxy.n_bins = victim_space.n_bins;
  proxy.validation_score = best_score;
  {
    std::ostringstream os;
    os << "behavior-cloning grid search over " << grid.points.size() << " points, " << grid.folds
       << " chronological folds, " << set.observations.size() << " samples; winner hidden=[";
    const auto& hw = grid.points[best_point].hidden_widths;
    for (std::size_t i = 0; i < hw.size(); ++i) os << (i ? "," : "") << hw[i];
    os << "] lr=" << grid.points[best_point].learning_rate;
    proxy.provenance = os.str();
  }
  nn::DenseNetwork net = make_imitator(grid.points[best_point], in_width, out_width,
                                       grid.seed + 999983);
  std::mt19937_64 rng(grid.seed ^ 0x6a09e667f3bcc909ULL);
  fit(net, set, 0, set.observations.size(), discrete, grid.points[best_point], grid, rng);
  proxy.imitator = std::move(net);
  return proxy;
}

namespace {

UntargetedPlan proxy_plan(const ProxyModel& proxy, const BifurcationMode& mode, const Vec& x) {
  UntargetedPlan plan;
  auto raw = std::make_shared<NetworkSurface>(&proxy.imitator);
  if (proxy.discrete) {
    const int bin = proxy.predict_bin(x);
    if (mode.is_none()) {
      plan.surface = raw;
      plan.loss = nn::LossSpec::difference_logit(static_cast<std::size_t>(bin),
                                                 nn::LossDirection::MaximizeAwayFromOriginal);
    } else {
      plan.surface = bifurcate(raw, mode);
      const auto& charge = mode.charge_indices;
      const bool in_charge =
          std::find(charge.begin(), charge.end(), static_cast<std::size_t>(bin)) != charge.end();
      plan.loss = nn::LossSpec::difference_logit(in_charge ? 0 : 1,
                                                 nn::LossDirection::MaximizeAwayFromOriginal);
    }
    return plan;
  }
  if (mode.is_none()) {
    plan.surface = raw;
    plan.loss = nn::LossSpec::mse({proxy.imitator.forward(x)[0]},
                                  nn::LossDirection::MaximizeAwayFromOriginal);
  } else {
    plan.surface = bifurcate(raw, BifurcationMode::continuous_negation());
    const double y = proxy.imitator.forward(x)[0];
    plan.loss = nn::LossSpec::difference_logit(y >= 0.0 ? 0 : 1,
                                               nn::LossDirection::MaximizeAwayFromOriginal);
  }
  return plan;
}

}  // namespace

SnoopingFgmAttack::SnoopingFgmAttack(const ProxyModel* proxy, AttackBudget budget,
                                     BifurcationMode mode)
    : proxy_(proxy), budget_(std::move(budget)), mode_(std::move(mode)) {
  budget_.validate();
}

AttackOutcome SnoopingFgmAttack::perturb(const agents::PolicyAgent& victim,
                                         const Vec& observation, std::size_t) {
  const UntargetedPlan plan = proxy_plan(*proxy_, mode_, observation);
  return fgm(victim, *plan.surface, observation, budget_, plan.loss);
}

std::string SnoopingFgmAttack::id() const {
  return mode_.is_none() ? "snooping_fgm" : "bifurcated_snooping_fgm";
}

ClosedLoopResult snooping_attack(env::Environment env, const agents::PolicyAgent& victim,
                                 const ProxyModel& proxy, const AttackBudget& budget,
                                 const BifurcationMode& mode) {
  SnoopingFgmAttack attack(&proxy, budget, mode);
  return closed_loop_attack(std::move(env), victim, attack);
}

}  // namespace drlab::attacks
