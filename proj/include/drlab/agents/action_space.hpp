#pragma once

#include <cstddef>
#include <string>

namespace drlab::agents {

/// Discrete spaces map bin i to -1 + 2i/(n-1), symmetric about zero (which
/// needs an even bin count). Continuous spaces act in [-1, 1]^dims.
struct ActionSpace {
  enum class Kind { Discrete, Continuous };

  Kind kind = Kind::Continuous;
  int n_bins = 0;
  int dims = 1;

  static ActionSpace discrete(int n_bins);
  static ActionSpace continuous(int dims = 1);

  bool is_discrete() const { return kind == Kind::Discrete; }
  double bin_value(int i) const;
  int nearest_bin(double action) const;
  std::size_t actor_output_width() const;
  std::string describe() const;
};

}  // namespace drlab::agents
