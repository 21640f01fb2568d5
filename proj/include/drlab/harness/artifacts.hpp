#pragma once

#include <string>

#include "drlab/attacks/proxy.hpp"

namespace drlab::harness {

/// Output directory layout: <out>/agents/, <out>/logs/, <out>/reports/.
struct OutputLayout {
  std::string root;

  std::string agents_dir() const;
  std::string logs_dir() const;
  std::string reports_dir() const;
  std::string agent_dir(const std::string& agent_id) const;
  std::string log_path(const std::string& name) const;
  std::string report_path(const std::string& name, const std::string& ext) const;
  void create() const;
};

void save_proxy(const attacks::ProxyModel& proxy, const std::string& directory);
attacks::ProxyModel load_proxy(const std::string& directory);

void save_outcomes(const std::vector<attacks::AttackOutcome>& outcomes, const std::string& path);

}  // namespace drlab::harness
