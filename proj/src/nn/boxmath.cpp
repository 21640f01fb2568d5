#include "drlab/nn/boxmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drlab::nn {

BoxedDelta project_step(double x, double requested_delta, double eps, double lo, double hi) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (x < lo || x > hi) throw std::invalid_argument("x must start inside the valid box");
  constexpr double inf = std::numeric_limits<double>::infinity();

  double d = std::clamp(requested_delta, -eps, eps);
  // Rounding in x + d or in the later subtraction can overshoot a bound by
  // one ulp; shrink |d| until every guarantee holds exactly.
  while (true) {
    const double a = x + d;
    if (a > hi) {
      const double fit = hi - x;
      d = fit < d ? fit : std::nextafter(d, -inf);
      continue;
    }
    if (a < lo) {
      const double fit = lo - x;
      d = fit > d ? fit : std::nextafter(d, inf);
      continue;
    }
    const double realized = a - x;
    if (std::abs(realized) > eps) {
      d = std::nextafter(d, 0.0);
      continue;
    }
    return BoxedDelta{realized, a};
  }
}

}  // namespace drlab::nn
