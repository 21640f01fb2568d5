#pragma once

#include <cstdint>
#include <utility>

#include "drlab/detect/mmd.hpp"

namespace drlab::detect {

using SplitPair = std::pair<SampleSet, SampleSet>;

/// For every day, 12 uniformly random hours go to A and the remaining 12 to
/// B; both sides get the same number of rows from each day.
SplitPair day_stratified_split(const std::vector<Vec>& observations, std::uint64_t seed);

/// Negative controls: split strategies a representative pair should NOT be
/// built with. They bias one side toward a different part of the series.
SplitPair split_consecutive_halves(const std::vector<Vec>& observations);  // month-style blocks
SplitPair split_even_odd_hours(const std::vector<Vec>& observations);
SplitPair split_alternating_days(const std::vector<Vec>& observations);

}  // namespace drlab::detect
