#pragma once

#include "drlab/detect/splits.hpp"
#include "drlab/detect/variation.hpp"

namespace drlab::detect {

/// Distribution of MMD statistics and p-values over repeated day-stratified
/// splits of one clean episode.
struct CleanBaseline {
  std::vector<double> mmds;
  std::vector<double> p_values;
  int bootstraps = 0;

  double max_mmd() const;
  /// Fraction of baseline p-values <= p.
  double p_percentile(double p) const;
};

CleanBaseline clean_baseline(const std::vector<Vec>& clean_observations, int pairs, int bootstraps,
                             std::uint64_t seed);

/// Pass rule: the observed MMD must not exceed any baseline MMD and the
/// observed p-value must not sit in the extreme low tail (its percentile in
/// the baseline p distribution must reach at least 0.05).
struct DetectionVerdict {
  MmdResult observed;
  double baseline_max_mmd = 0.0;
  double p_percentile = 0.0;
  bool mmd_within_baseline = false;
  bool p_within_baseline = false;
  bool plausible = false;
};

DetectionVerdict evaluate_against_baseline(const CleanBaseline& baseline,
                                           const MmdResult& observed);

/// Truncates a variation series (length T-1) to whole pseudo-days of 24 rows
/// so the stratified baseline machinery applies to variation space too.
std::vector<Vec> truncate_to_whole_days(const std::vector<Vec>& rows);

}  // namespace drlab::detect
