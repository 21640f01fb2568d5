#pragma once

#include "drlab/detect/mmd.hpp"

namespace drlab::detect {

/// Row t is |x_{t+1} - x_t| elementwise; the result has T-1 rows.
SampleSet abs_variation(const std::vector<Vec>& series);

struct FeatureVariationStats {
  double mean_abs_variation = 0.0;
  double clean_min = 0.0;
  double clean_max = 0.0;
  std::size_t outlier_count = 0;  // adversarial variations outside the clean range
};

struct VariationReport {
  std::vector<FeatureVariationStats> per_feature;
  std::vector<std::size_t> outlying_features_per_row;  // one count per adversarial row
  double fraction_rows_within_clean_range = 0.0;       // rows with zero outlying features
  double fraction_rows_multi_outlier = 0.0;            // rows with more than one outlying feature
};

/// Compares adversarial inter-observation variations against the clean
/// per-feature ranges.
VariationReport variation_outlier_report(const SampleSet& adversarial_variations,
                                         const SampleSet& clean_variations);

}  // namespace drlab::detect
