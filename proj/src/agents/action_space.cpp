#include "drlab/agents/action_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::agents {

ActionSpace ActionSpace::discrete(int n_bins) {
  if (n_bins < 2 || n_bins % 2 != 0)
    throw std::invalid_argument("discrete action space needs an even bin count >= 2");
  ActionSpace s;
  s.kind = Kind::Discrete;
  s.n_bins = n_bins;
  s.dims = 1;
  return s;
}

ActionSpace ActionSpace::continuous(int dims) {
  if (dims < 1) throw std::invalid_argument("continuous action space needs dims >= 1");
  ActionSpace s;
  s.kind = Kind::Continuous;
  s.dims = dims;
  return s;
}

double ActionSpace::bin_value(int i) const {
  if (!is_discrete()) throw std::logic_error("bin_value on a continuous space");
  if (i < 0 || i >= n_bins) throw std::out_of_range("bin index out of range");
  // Integer numerator over one division keeps bin i and bin n-1-i exact
  // negatives of each other.
  return static_cast<double>(2 * i - (n_bins - 1)) / static_cast<double>(n_bins - 1);
}

int ActionSpace::nearest_bin(double action) const {
  if (!is_discrete()) throw std::logic_error("nearest_bin on a continuous space");
  const double clamped = std::clamp(action, -1.0, 1.0);
  const double idx = (clamped + 1.0) * static_cast<double>(n_bins - 1) / 2.0;
  return std::clamp(static_cast<int>(std::lround(idx)), 0, n_bins - 1);
}

std::size_t ActionSpace::actor_output_width() const {
  return is_discrete() ? static_cast<std::size_t>(n_bins) : static_cast<std::size_t>(2 * dims);
}

std::string ActionSpace::describe() const {
  if (is_discrete()) return "discrete(" + std::to_string(n_bins) + ")";
  return dims == 1 ? "continuous" : "continuous(" + std::to_string(dims) + ")";
}

}  // namespace drlab::agents
