#include "drlab/env/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab::env {

namespace {

struct RawCosts {
  double consumption = 0.0;
  double daily_peak = 0.0;
  double ramping = 0.0;
};

RawCosts raw_costs(const std::vector<double>& e) {
  RawCosts c;
  for (double v : e) c.consumption += std::max(v, 0.0);
  const std::size_t days = e.size() / 24;
  for (std::size_t d = 0; d < days; ++d) {
    double peak = e[d * 24];
    for (std::size_t h = 1; h < 24; ++h) peak = std::max(peak, e[d * 24 + h]);
    c.daily_peak += peak;
  }
  c.daily_peak /= static_cast<double>(days);
  for (std::size_t t = 1; t < e.size(); ++t) c.ramping += std::abs(e[t] - e[t - 1]);
  return c;
}

}  // namespace

KpiReport compute_kpis(const EpisodeLog& log, const EpisodeLog& baseline) {
  if (log.size() != baseline.size())
    throw std::invalid_argument("kpi logs must have equal lengths");
  if (log.size() == 0 || log.size() % 24 != 0)
    throw std::invalid_argument("kpi logs must cover whole days");

  const RawCosts num = raw_costs(log.net_consumption_series());
  const RawCosts den = raw_costs(baseline.net_consumption_series());
  if (!(den.consumption > 0.0) || !(den.daily_peak > 0.0) || !(den.ramping > 0.0))
    throw std::invalid_argument("degenerate baseline: KPI denominator is not positive");

  KpiReport r;
  r.consumption_numerator = num.consumption;
  r.consumption_denominator = den.consumption;
  r.peak_numerator = num.daily_peak;
  r.peak_denominator = den.daily_peak;
  r.ramping_numerator = num.ramping;
  r.ramping_denominator = den.ramping;
  r.electricity_consumption = num.consumption / den.consumption;
  r.daily_peaks = num.daily_peak / den.daily_peak;
  r.ramping = num.ramping / den.ramping;
  return r;
}

}  // namespace drlab::env
