#include "drlab/detect/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace drlab::detect {

namespace {

double squared_distance(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Symmetric pooled kernel matrix with row sums; lets permutation re-splits
// reuse every kernel evaluation. Exactly duplicated rows (kernel value 1)
// are tracked so their cross terms can be excluded.
struct PooledKernel {
  std::size_t n = 0;
  std::vector<double> k;        // n*n, k[i*n+j]
  std::vector<double> row_sum;  // includes the diagonal
  std::vector<std::pair<std::size_t, std::size_t>> duplicate_pairs;  // i < j, rows equal

  double at(std::size_t i, std::size_t j) const { return k[i * n + j]; }
};

PooledKernel build_kernel(const std::vector<const Vec*>& rows, double sigma) {
  PooledKernel pk;
  pk.n = rows.size();
  pk.k.assign(pk.n * pk.n, 0.0);
  const double inv = -1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < pk.n; ++i) {
    pk.k[i * pk.n + i] = 1.0;
    for (std::size_t j = i + 1; j < pk.n; ++j) {
      const double d2 = squared_distance(*rows[i], *rows[j]);
      const double v = std::exp(inv * d2);
      pk.k[i * pk.n + j] = v;
      pk.k[j * pk.n + i] = v;
      if (d2 == 0.0) pk.duplicate_pairs.emplace_back(i, j);
    }
  }
  pk.row_sum.assign(pk.n, 0.0);
  for (std::size_t i = 0; i < pk.n; ++i) {
    double s = 0.0;
    const double* row = pk.k.data() + i * pk.n;
    for (std::size_t j = 0; j < pk.n; ++j) s += row[j];
    pk.row_sum[i] = s;
  }
  return pk;
}

// Off-diagonal sum of the kernel restricted to one index set.
double within_sum(const PooledKernel& pk, const std::vector<std::size_t>& idx) {
  double acc = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const double* row = pk.k.data() + idx[a] * pk.n;
    for (std::size_t b = a + 1; b < idx.size(); ++b) acc += row[idx[b]];
  }
  return 2.0 * acc;
}

// Unbiased squared MMD for one partition of the pooled rows. The cross term
// omits pairs of exactly duplicated rows, so two copies of the same set score
// zero; the estimate depends only on the row multisets, never on row order.
double partition_mmd(const PooledKernel& pk, const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b, const std::vector<char>& in_a) {
  const double m = static_cast<double>(a.size());
  const double n = static_cast<double>(b.size());
  const double s_aa = within_sum(pk, a);
  const double s_bb = within_sum(pk, b);
  double a_row_total = 0.0;
  for (std::size_t i : a) a_row_total += pk.row_sum[i];
  double cross = a_row_total - s_aa - m;  // sum over all of A x B
  double cross_count = m * n;
  for (const auto& [i, j] : pk.duplicate_pairs) {
    if (in_a[i] != in_a[j]) {
      cross -= 1.0;
      cross_count -= 1.0;
    }
  }
  if (cross_count <= 0.0)
    throw std::invalid_argument("degenerate data: every cross pair is an exact duplicate");
  return s_aa / (m * (m - 1.0)) + s_bb / (n * (n - 1.0)) - 2.0 * cross / cross_count;
}

std::vector<char> membership(std::size_t n, const std::vector<std::size_t>& a) {
  std::vector<char> in_a(n, 0);
  for (std::size_t i : a) in_a[i] = 1;
  return in_a;
}

std::vector<const Vec*> pool_rows(const SampleSet& x, const SampleSet& y) {
  std::vector<const Vec*> rows;
  rows.reserve(x.size() + y.size());
  for (const Vec& r : x.rows) rows.push_back(&r);
  for (const Vec& r : y.rows) rows.push_back(&r);
  return rows;
}

double median_bandwidth(const std::vector<const Vec*>& rows) {
  std::vector<double> distances;
  distances.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      distances.push_back(std::sqrt(squared_distance(*rows[i], *rows[j])));
  if (std::all_of(distances.begin(), distances.end(), [](double d) { return d == 0.0; }))
    throw std::invalid_argument("degenerate data: every pooled pairwise distance is zero");
  const std::size_t mid = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid),
                   distances.end());
  double median = distances[mid];
  if (median == 0.0) {
    // Over half the pooled rows coincide; fall back to the smallest positive distance.
    double smallest = std::numeric_limits<double>::infinity();
    for (double d : distances)
      if (d > 0.0) smallest = std::min(smallest, d);
    median = smallest;
  }
  return median;
}

void check_pair(const SampleSet& x, const SampleSet& y) {
  validate_sample_set(x);
  validate_sample_set(y);
  if (x.width() != y.width())
    throw std::invalid_argument("sample sets have different feature widths");
}

}  // namespace

void validate_sample_set(const SampleSet& s) {
  if (s.rows.size() < 2) throw std::invalid_argument("sample set needs at least 2 rows");
  const std::size_t w = s.rows.front().size();
  for (const Vec& r : s.rows) {
    if (r.size() != w) throw std::invalid_argument("ragged sample set");
    for (double v : r)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry in sample set");
  }
}

double median_heuristic_bandwidth(const SampleSet& x, const SampleSet& y) {
  check_pair(x, y);
  return median_bandwidth(pool_rows(x, y));
}

double gaussian_mmd(const SampleSet& x, const SampleSet& y, double bandwidth) {
  check_pair(x, y);
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const auto rows = pool_rows(x, y);
  const PooledKernel pk = build_kernel(rows, bandwidth);
  std::vector<std::size_t> a(x.size()), b(y.size());
  std::iota(a.begin(), a.end(), std::size_t{0});
  std::iota(b.begin(), b.end(), x.size());
  return partition_mmd(pk, a, b, membership(pk.n, a));
}

double gaussian_mmd(const SampleSet& x, const SampleSet& y) {
  return gaussian_mmd(x, y, median_heuristic_bandwidth(x, y));
}

MmdResult bootstrap_p_value(const SampleSet& x, const SampleSet& y, int bootstraps,
                            std::uint64_t seed) {
  check_pair(x, y);
  if (bootstraps < 1) throw std::invalid_argument("need at least one bootstrap");

  const auto rows = pool_rows(x, y);
  const double sigma = median_bandwidth(rows);
  const PooledKernel pk = build_kernel(rows, sigma);

  std::vector<std::size_t> a(x.size()), b(y.size());
  std::iota(a.begin(), a.end(), std::size_t{0});
  std::iota(b.begin(), b.end(), x.size());
  const double observed = partition_mmd(pk, a, b, membership(pk.n, a));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pooled(rows.size());
  std::iota(pooled.begin(), pooled.end(), std::size_t{0});
  int exceedances = 0;
  for (int it = 0; it < bootstraps; ++it) {
    std::shuffle(pooled.begin(), pooled.end(), rng);
    std::vector<std::size_t> pa(pooled.begin(),
                                pooled.begin() + static_cast<std::ptrdiff_t>(x.size()));
    std::vector<std::size_t> pb(pooled.begin() + static_cast<std::ptrdiff_t>(x.size()),
                                pooled.end());
    if (partition_mmd(pk, pa, pb, membership(pk.n, pa)) >= observed) ++exceedances;
  }

  MmdResult r;
  r.mmd = observed;
  r.p_value = static_cast<double>(exceedances) / static_cast<double>(bootstraps);
  r.bootstraps = bootstraps;
  r.bandwidth = sigma;
  return r;
}

}  // namespace drlab::detect
