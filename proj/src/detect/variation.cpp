#include "drlab/detect/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::detect {

SampleSet abs_variation(const std::vector<Vec>& series) {
  if (series.size() < 2) throw std::invalid_argument("abs variation needs at least 2 observations");
  SampleSet out;
  out.provenance = "abs-variation";
  out.rows.reserve(series.size() - 1);
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    Vec row(series[t].size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = std::abs(series[t + 1][j] - series[t][j]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

VariationReport variation_outlier_report(const SampleSet& adversarial_variations,
                                         const SampleSet& clean_variations) {
  if (adversarial_variations.width() != clean_variations.width())
    throw std::invalid_argument("variation sets have different widths");
  const std::size_t width = clean_variations.width();

  VariationReport report;
  report.per_feature.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    FeatureVariationStats& fs = report.per_feature[j];
    fs.clean_min = clean_variations.rows.front()[j];
    fs.clean_max = fs.clean_min;
    for (const Vec& row : clean_variations.rows) {
      fs.clean_min = std::min(fs.clean_min, row[j]);
      fs.clean_max = std::max(fs.clean_max, row[j]);
    }
    double mean = 0.0;
    for (const Vec& row : adversarial_variations.rows) mean += row[j];
    fs.mean_abs_variation = mean / static_cast<double>(adversarial_variations.size());
  }

  report.outlying_features_per_row.reserve(adversarial_variations.size());
  std::size_t clean_rows = 0, multi_rows = 0;
  for (const Vec& row : adversarial_variations.rows) {
    std::size_t outliers = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (row[j] < report.per_feature[j].clean_min || row[j] > report.per_feature[j].clean_max) {
        ++outliers;
        ++report.per_feature[j].outlier_count;
      }
    }
    report.outlying_features_per_row.push_back(outliers);
    if (outliers == 0) ++clean_rows;
    if (outliers > 1) ++multi_rows;
  }
  const double n = static_cast<double>(adversarial_variations.size());
  report.fraction_rows_within_clean_range = static_cast<double>(clean_rows) / n;
  report.fraction_rows_multi_outlier = static_cast<double>(multi_rows) / n;
  return report;
}

}  // namespace drlab::detect
