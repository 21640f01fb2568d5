#include "drlab/detect/splits.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <stdexcept>

namespace drlab::detect {

namespace {

void require_whole_days(const std::vector<Vec>& observations) {
  if (observations.empty() || observations.size() % 24 != 0)
    throw std::invalid_argument("split needs an observation count divisible by 24");
}

SampleSet gather(const std::vector<Vec>& observations, const std::vector<std::size_t>& idx,
                 const char* provenance) {
  SampleSet s;
  s.provenance = provenance;
  s.rows.reserve(idx.size());
  for (std::size_t i : idx) s.rows.push_back(observations[i]);
  return s;
}

}  // namespace

SplitPair day_stratified_split(const std::vector<Vec>& observations, std::uint64_t seed) {
  require_whole_days(observations);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> a_idx, b_idx;
  a_idx.reserve(observations.size() / 2);
  b_idx.reserve(observations.size() / 2);
  std::array<std::size_t, 24> hours{};
  for (std::size_t day = 0; day < observations.size() / 24; ++day) {
    std::iota(hours.begin(), hours.end(), std::size_t{0});
    std::shuffle(hours.begin(), hours.end(), rng);
    for (std::size_t k = 0; k < 24; ++k) {
      const std::size_t idx = day * 24 + hours[k];
      (k < 12 ? a_idx : b_idx).push_back(idx);
    }
  }
  std::sort(a_idx.begin(), a_idx.end());
  std::sort(b_idx.begin(), b_idx.end());
  return {gather(observations, a_idx, "split-A"), gather(observations, b_idx, "split-B")};
}

SplitPair split_consecutive_halves(const std::vector<Vec>& observations) {
  require_whole_days(observations);
  const std::size_t days = observations.size() / 24;
  const std::size_t cut = (days / 2) * 24;
  if (cut == 0 || cut == observations.size())
    throw std::invalid_argument("consecutive-halves split needs at least 2 days");
  std::vector<std::size_t> a_idx(cut), b_idx(observations.size() - cut);
  std::iota(a_idx.begin(), a_idx.end(), std::size_t{0});
  std::iota(b_idx.begin(), b_idx.end(), cut);
  return {gather(observations, a_idx, "consecutive-first-half"),
          gather(observations, b_idx, "consecutive-second-half")};
}

SplitPair split_even_odd_hours(const std::vector<Vec>& observations) {
  require_whole_days(observations);
  std::vector<std::size_t> a_idx, b_idx;
  for (std::size_t t = 0; t < observations.size(); ++t) (t % 2 == 0 ? a_idx : b_idx).push_back(t);
  return {gather(observations, a_idx, "even-hours"), gather(observations, b_idx, "odd-hours")};
}

SplitPair split_alternating_days(const std::vector<Vec>& observations) {
  require_whole_days(observations);
  std::vector<std::size_t> a_idx, b_idx;
  for (std::size_t t = 0; t < observations.size(); ++t)
    ((t / 24) % 2 == 0 ? a_idx : b_idx).push_back(t);
  return {gather(observations, a_idx, "even-days"), gather(observations, b_idx, "odd-days")};
}

}  // namespace drlab::detect
