#pragma once

#include "drlab/env/environment.hpp"

namespace drlab::env {

/// Episode cost ratios against the no-controller baseline. 1.0 means the
/// controller changed nothing; lower is better.
struct KpiReport {
  double electricity_consumption = 0.0;
  double daily_peaks = 0.0;
  double ramping = 0.0;

  double consumption_numerator = 0.0, consumption_denominator = 0.0;
  double peak_numerator = 0.0, peak_denominator = 0.0;
  double ramping_numerator = 0.0, ramping_denominator = 0.0;
};

/// consumption = sum of positive net imports; daily peak = mean over days of
/// the day's max net consumption; ramping = sum |e_t - e_{t-1}|. Each is
/// divided by the same quantity on the baseline log.
KpiReport compute_kpis(const EpisodeLog& log, const EpisodeLog& baseline);

}  // namespace drlab::env
