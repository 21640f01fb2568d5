#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/nn/network.hpp"

namespace drlab::detect {

using nn::Vec;

struct SampleSet {
  std::vector<Vec> rows;
  std::string provenance;

  std::size_t size() const { return rows.size(); }
  std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

void validate_sample_set(const SampleSet& s);

struct MmdResult {
  double mmd = 0.0;       // unbiased squared-MMD estimate; may be slightly negative
  double p_value = 1.0;
  int bootstraps = 0;
  double bandwidth = 0.0; // Gaussian kernel sigma (median heuristic)
};

/// Median pairwise Euclidean distance over the pooled rows. Throws when every
/// pairwise distance is zero (degenerate data).
double median_heuristic_bandwidth(const SampleSet& x, const SampleSet& y);

/// Unbiased squared-MMD with Gaussian kernel k(a,b) = exp(-|a-b|^2/(2 sigma^2)).
/// For equal sample sizes the estimator excludes the index-paired cross terms,
/// so exactly duplicated sets score 0.
double gaussian_mmd(const SampleSet& x, const SampleSet& y);
double gaussian_mmd(const SampleSet& x, const SampleSet& y, double bandwidth);

/// Permutation test: pool the rows, re-split at the original sizes, recompute
/// the statistic with the bandwidth frozen from the original pooled pair.
/// p = fraction of permuted statistics >= observed (ties count as exceedances).
MmdResult bootstrap_p_value(const SampleSet& x, const SampleSet& y, int bootstraps = 10000,
                            std::uint64_t seed = 0);

}  // namespace drlab::detect
