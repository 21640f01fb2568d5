#include "drlab/detect/baseline.hpp"

#include <algorithm>
#include <stdexcept>

namespace drlab::detect {

double CleanBaseline::max_mmd() const {
  if (mmds.empty()) throw std::logic_error("empty baseline");
  return *std::max_element(mmds.begin(), mmds.end());
}

double CleanBaseline::p_percentile(double p) const {
  if (p_values.empty()) throw std::logic_error("empty baseline");
  std::size_t at_or_below = 0;
  for (double v : p_values)
    if (v <= p) ++at_or_below;
  return static_cast<double>(at_or_below) / static_cast<double>(p_values.size());
}

CleanBaseline clean_baseline(const std::vector<Vec>& clean_observations, int pairs, int bootstraps,
                             std::uint64_t seed) {
  if (pairs < 1) throw std::invalid_argument("baseline needs at least one split pair");
  CleanBaseline baseline;
  baseline.bootstraps = bootstraps;
  baseline.mmds.reserve(static_cast<std::size_t>(pairs));
  baseline.p_values.reserve(static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    const std::uint64_t split_seed = seed + static_cast<std::uint64_t>(i);
    const SplitPair split = day_stratified_split(clean_observations, split_seed);
    const MmdResult r = bootstrap_p_value(split.first, split.second, bootstraps,
                                          split_seed ^ 0x8f1bbcdcbfa53e0bULL);
    baseline.mmds.push_back(r.mmd);
    baseline.p_values.push_back(r.p_value);
  }
  return baseline;
}

DetectionVerdict evaluate_against_baseline(const CleanBaseline& baseline,
                                           const MmdResult& observed) {
  DetectionVerdict v;
  v.observed = observed;
  v.baseline_max_mmd = baseline.max_mmd();
  v.p_percentile = baseline.p_percentile(observed.p_value);
  v.mmd_within_baseline = observed.mmd <= v.baseline_max_mmd;
  v.p_within_baseline = v.p_percentile >= 0.05;
  v.plausible = v.mmd_within_baseline && v.p_within_baseline;
  return v;
}

std::vector<Vec> truncate_to_whole_days(const std::vector<Vec>& rows) {
  const std::size_t whole = (rows.size() / 24) * 24;
  if (whole == 0) throw std::invalid_argument("fewer than 24 rows");
  return std::vector<Vec>(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(whole));
}

}  // namespace drlab::detect
