#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drlab/attacks/closed_loop.hpp"
#include "drlab/detect/baseline.hpp"

namespace drlab::harness {

inline constexpr const char* kVersion = "0.1.0";

struct DetectionSummary {
  detect::DetectionVerdict observation_space;
  detect::DetectionVerdict variation_space;
  int baseline_pairs = 0;
  int bootstraps = 0;
  std::string estimator_note;
};

struct SweepRow {
  double epsilon = 0.0;
  double clean_consumption_kpi = 0.0;
  double attacked_consumption_kpi = 0.0;
  double consumption_regret = 0.0;
  double asr = 0.0;
};

/// Everything one pipeline run reports; numbers all trace back to persisted
/// episode logs. No timestamps, so identical runs serialize identically.
struct RunReport {
  std::string run_id;
  std::string config_hash;
  std::string version = kVersion;
  std::string agent_id;
  std::string attack_id;

  env::KpiReport clean_kpis;
  bool has_attack = false;
  env::KpiReport attacked_kpis;
  double consumption_regret = 0.0;
  double daily_peak_regret = 0.0;
  double ramping_regret = 0.0;
  double asr = 0.0;
  double action_mae = 0.0;
  double reversal_rate = 0.0;

  std::optional<DetectionSummary> detection;
  std::vector<SweepRow> sweep;
  std::string sweep_label;
};

void write_report_json(const RunReport& report, const std::string& path);
RunReport read_report_json(const std::string& path);
void write_report_text(const RunReport& report, const std::string& path);
std::string render_report_text(const RunReport& report);

/// One comparison table over every report found in a reports directory.
std::string aggregate_reports(const std::vector<RunReport>& reports);
std::vector<RunReport> load_reports_in(const std::string& reports_dir);

}  // namespace drlab::harness
