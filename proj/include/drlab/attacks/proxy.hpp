#pragma once

#include "drlab/attacks/closed_loop.hpp"

namespace drlab::attacks {

struct ProxyGridPoint {
  std::vector<std::size_t> hidden_widths;
  double learning_rate = 1e-3;
};

struct ProxySearchGrid {
  std::vector<ProxyGridPoint> points;
  int folds = 3;
  int epochs = 30;
  int minibatch_size = 64;
  std::uint64_t seed = 0;

  static ProxySearchGrid small_default(std::uint64_t seed);
};

/// Behavior-cloning imitator of a victim policy, trained purely from logged
/// (observation, action) history. Discrete victims get a bin-logit head,
/// continuous victims a scalar action head.
struct ProxyModel {
  nn::DenseNetwork imitator;
  bool discrete = false;
  int n_bins = 0;
  double validation_score = 0.0;  // mean chronological-split validation loss
  std::string provenance;

  double predict_action(const Vec& observation) const;
  int predict_bin(const Vec& observation) const;
};

/// Chronological K-fold boundaries over n samples: fold i trains on
/// [0, bounds[i]) and validates on [bounds[i], bounds[i+1]).
std::vector<std::size_t> time_series_split_bounds(std::size_t n, int folds);

/// Grid search over widths/learning rates scored by mean time-series split
/// validation loss; the winner is refit on the full history.
ProxyModel train_proxy(const std::vector<env::EpisodeLog>& logs, const ProxySearchGrid& grid,
                       const agents::ActionSpace& victim_space);

/// FGM against the (optionally bifurcated) proxy, applied to the victim.
class SnoopingFgmAttack : public ObservationAttack {
 public:
  SnoopingFgmAttack(const ProxyModel* proxy, AttackBudget budget, BifurcationMode mode);
  AttackOutcome perturb(const agents::PolicyAgent& victim, const Vec& observation,
                        std::size_t) override;
  std::string id() const override;

 private:
  const ProxyModel* proxy_;
  AttackBudget budget_;
  BifurcationMode mode_;
};

ClosedLoopResult snooping_attack(env::Environment env, const agents::PolicyAgent& victim,
                                 const ProxyModel& proxy, const AttackBudget& budget,
                                 const BifurcationMode& mode);

}  // namespace drlab::attacks
