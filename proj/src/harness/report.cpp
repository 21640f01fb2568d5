#include "drlab/harness/report.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace drlab::harness {

namespace {

using nlohmann::json;

json kpi_to_json(const env::KpiReport& k) {
  json j;
  j["electricity_consumption"] = k.electricity_consumption;
  j["daily_peaks"] = k.daily_peaks;
  j["ramping"] = k.ramping;
  j["numerators"] = {k.consumption_numerator, k.peak_numerator, k.ramping_numerator};
  j["denominators"] = {k.consumption_denominator, k.peak_denominator, k.ramping_denominator};
  return j;
}

env::KpiReport kpi_from_json(const json& j) {
  env::KpiReport k;
  k.electricity_consumption = j.at("electricity_consumption").get<double>();
  k.daily_peaks = j.at("daily_peaks").get<double>();
  k.ramping = j.at("ramping").get<double>();
  const auto num = j.at("numerators");
  const auto den = j.at("denominators");
  k.consumption_numerator = num[0];
  k.peak_numerator = num[1];
  k.ramping_numerator = num[2];
  k.consumption_denominator = den[0];
  k.peak_denominator = den[1];
  k.ramping_denominator = den[2];
  return k;
}

json verdict_to_json(const detect::DetectionVerdict& v) {
  json j;
  j["mmd"] = v.observed.mmd;
  j["p_value"] = v.observed.p_value;
  j["bandwidth"] = v.observed.bandwidth;
  j["bootstraps"] = v.observed.bootstraps;
  j["baseline_max_mmd"] = v.baseline_max_mmd;
  j["p_percentile"] = v.p_percentile;
  j["mmd_within_baseline"] = v.mmd_within_baseline;
  j["p_within_baseline"] = v.p_within_baseline;
  j["plausible"] = v.plausible;
  return j;
}

detect::DetectionVerdict verdict_from_json(const json& j) {
  detect::DetectionVerdict v;
  v.observed.mmd = j.at("mmd").get<double>();
  v.observed.p_value = j.at("p_value").get<double>();
  v.observed.bandwidth = j.at("bandwidth").get<double>();
  v.observed.bootstraps = j.at("bootstraps").get<int>();
  v.baseline_max_mmd = j.at("baseline_max_mmd").get<double>();
  v.p_percentile = j.at("p_percentile").get<double>();
  v.mmd_within_baseline = j.at("mmd_within_baseline").get<bool>();
  v.p_within_baseline = j.at("p_within_baseline").get<bool>();
  v.plausible = j.at("plausible").get<bool>();
  return v;
}

void append_line(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out += buf;
  out += '\n';
}

}  // namespace

void write_report_json(const RunReport& r, const std::string& path) {
  json j;
  j["run_id"] = r.run_id;
  j["config_hash"] = r.config_hash;
  j["version"] = r.version;
  j["agent_id"] = r.agent_id;
  j["attack_id"] = r.attack_id;
  j["clean_kpis"] = kpi_to_json(r.clean_kpis);
  j["has_attack"] = r.has_attack;
  if (r.has_attack) {
    j["attacked_kpis"] = kpi_to_json(r.attacked_kpis);
    j["regret"]["electricity_consumption"] = r.consumption_regret;
    j["regret"]["daily_peaks"] = r.daily_peak_regret;
    j["regret"]["ramping"] = r.ramping_regret;
    j["asr"] = r.asr;
    j["action_mae"] = r.action_mae;
    j["reversal_rate"] = r.reversal_rate;
  }
  if (r.detection) {
    j["detection"]["observation_space"] = verdict_to_json(r.detection->observation_space);
    j["detection"]["variation_space"] = verdict_to_json(r.detection->variation_space);
    j["detection"]["baseline_pairs"] = r.detection->baseline_pairs;
    j["detection"]["bootstraps"] = r.detection->bootstraps;
    j["detection"]["estimator_note"] = r.detection->estimator_note;
  }
  if (!r.sweep.empty()) {
    j["sweep_label"] = r.sweep_label;
    json rows = json::array();
    for (const SweepRow& row : r.sweep) {
      json jr;
      jr["epsilon"] = row.epsilon;
      jr["clean_consumption_kpi"] = row.clean_consumption_kpi;
      jr["attacked_consumption_kpi"] = row.attacked_consumption_kpi;
      jr["consumption_regret"] = row.consumption_regret;
      jr["asr"] = row.asr;
      rows.push_back(std::move(jr));
    }
    j["sweep"] = std::move(rows);
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write report: " + path);
  os << j.dump(2) << "\n";
}

RunReport read_report_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read report: " + path);
  json j;
  is >> j;
  RunReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.agent_id = j.at("agent_id").get<std::string>();
  r.attack_id = j.at("attack_id").get<std::string>();
  r.clean_kpis = kpi_from_json(j.at("clean_kpis"));
  r.has_attack = j.at("has_attack").get<bool>();
  if (r.has_attack) {
    r.attacked_kpis = kpi_from_json(j.at("attacked_kpis"));
    r.consumption_regret = j.at("regret").at("electricity_consumption").get<double>();
    r.daily_peak_regret = j.at("regret").at("daily_peaks").get<double>();
    r.ramping_regret = j.at("regret").at("ramping").get<double>();
    r.asr = j.at("asr").get<double>();
    r.action_mae = j.at("action_mae").get<double>();
    r.reversal_rate = j.at("reversal_rate").get<double>();
  }
  if (j.contains("detection")) {
    DetectionSummary d;
    d.observation_space = verdict_from_json(j.at("detection").at("observation_space"));
    d.variation_space = verdict_from_json(j.at("detection").at("variation_space"));
    d.baseline_pairs = j.at("detection").at("baseline_pairs").get<int>();
    d.bootstraps = j.at("detection").at("bootstraps").get<int>();
    d.estimator_note = j.at("detection").at("estimator_note").get<std::string>();
    r.detection = d;
  }
  if (j.contains("sweep")) {
    r.sweep_label = j.value("sweep_label", "");
    for (const auto& jr : j.at("sweep")) {
      SweepRow row;
      row.epsilon = jr.at("epsilon").get<double>();
      row.clean_consumption_kpi = jr.at("clean_consumption_kpi").get<double>();
      row.attacked_consumption_kpi = jr.at("attacked_consumption_kpi").get<double>();
      row.consumption_regret = jr.at("consumption_regret").get<double>();
      row.asr = jr.at("asr").get<double>();
      r.sweep.push_back(row);
    }
  }
  return r;
}

std::string render_report_text(const RunReport& r) {
  std::string out;
  append_line(out, "run %s (config %s, version %s)", r.run_id.c_str(), r.config_hash.c_str(),
              r.version.c_str());
  append_line(out, "agent: %s   attack: %s", r.agent_id.c_str(), r.attack_id.c_str());
  append_line(out, "%-26s %10s %10s %10s", "KPI", "clean", "attacked", "regret");
  const auto row = [&](const char* name, double c, double a, double g) {
    if (r.has_attack)
      append_line(out, "%-26s %10.4f %10.4f %10.4f", name, c, a, g);
    else
      append_line(out, "%-26s %10.4f %10s %10s", name, c, "-", "-");
  };
  row("electricity_consumption", r.clean_kpis.electricity_consumption,
      r.attacked_kpis.electricity_consumption, r.consumption_regret);
  row("daily_peaks", r.clean_kpis.daily_peaks, r.attacked_kpis.daily_peaks, r.daily_peak_regret);
  row("ramping", r.clean_kpis.ramping, r.attacked_kpis.ramping, r.ramping_regret);
  if (r.has_attack)
    append_line(out, "asr %.4f   action_mae %.4f   reversal_rate %.4f", r.asr, r.action_mae,
                r.reversal_rate);
  if (r.detection) {
    const auto& d = *r.detection;
    append_line(out, "detection (%d baseline pairs, %d bootstraps; %s):", d.baseline_pairs,
                d.bootstraps, d.estimator_note.c_str());
    const auto verdict_row = [&](const char* name, const detect::DetectionVerdict& v) {
      append_line(out, "  %-16s mmd %.6g (baseline max %.6g)  p %.4f (pct %.2f)  -> %s", name,
                  v.observed.mmd, v.baseline_max_mmd, v.observed.p_value, v.p_percentile,
                  v.plausible ? "plausible" : "implausible");
    };
    verdict_row("observations", d.observation_space);
    verdict_row("abs-variations", d.variation_space);
  }
  if (!r.sweep.empty()) {
    append_line(out, "sweep %s:", r.sweep_label.c_str());
    append_line(out, "  %8s %12s %12s %12s %8s", "epsilon", "clean_kpi", "attacked", "regret",
                "asr");
    for (const SweepRow& s : r.sweep)
      append_line(out, "  %8.4f %12.4f %12.4f %12.4f %8.4f", s.epsilon, s.clean_consumption_kpi,
                  s.attacked_consumption_kpi, s.consumption_regret, s.asr);
  }
  return out;
}

void write_report_text(const RunReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write report: " + path);
  os << render_report_text(r);
}

std::vector<RunReport> load_reports_in(const std::string& reports_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  if (fs::exists(reports_dir))
    for (const auto& entry : fs::directory_iterator(reports_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<RunReport> reports;
  for (const std::string& p : paths) reports.push_back(read_report_json(p));
  return reports;
}

std::string aggregate_reports(const std::vector<RunReport>& reports) {
  std::string out;
  append_line(out, "%-28s %-24s %10s %10s %10s %8s %8s", "agent", "attack", "clean_kpi",
              "attacked", "regret", "asr", "reversal");
  for (const RunReport& r : reports) {
    if (r.has_attack)
      append_line(out, "%-28s %-24s %10.4f %10.4f %10.4f %8.4f %8.4f", r.agent_id.c_str(),
                  r.attack_id.c_str(), r.clean_kpis.electricity_consumption,
                  r.attacked_kpis.electricity_consumption, r.consumption_regret, r.asr,
                  r.reversal_rate);
    else
      append_line(out, "%-28s %-24s %10.4f %10s %10s %8s %8s", r.agent_id.c_str(),
                  r.attack_id.c_str(), r.clean_kpis.electricity_consumption, "-", "-", "-", "-");
  }
  return out;
}

}  // namespace drlab::harness
