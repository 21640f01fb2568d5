#include "drlab/harness/artifacts.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace drlab::harness {

namespace fs = std::filesystem;

std::string OutputLayout::agents_dir() const { return (fs::path(root) / "agents").string(); }
std::string OutputLayout::logs_dir() const { return (fs::path(root) / "logs").string(); }
std::string OutputLayout::reports_dir() const { return (fs::path(root) / "reports").string(); }

std::string OutputLayout::agent_dir(const std::string& agent_id) const {
  return (fs::path(agents_dir()) / agent_id).string();
}

std::string OutputLayout::log_path(const std::string& name) const {
  return (fs::path(logs_dir()) / (name + ".json")).string();
}

std::string OutputLayout::report_path(const std::string& name, const std::string& ext) const {
  return (fs::path(reports_dir()) / (name + "." + ext)).string();
}

void OutputLayout::create() const {
  fs::create_directories(agents_dir());
  fs::create_directories(logs_dir());
  fs::create_directories(reports_dir());
}

void save_proxy(const attacks::ProxyModel& proxy, const std::string& directory) {
  fs::create_directories(directory);
  proxy.imitator.save_file((fs::path(directory) / "imitator.net").string());
  nlohmann::json j;
  j["schema"] = "drlab-proxy-v1";
  j["discrete"] = proxy.discrete;
  j["n_bins"] = proxy.n_bins;
  j["validation_score"] = proxy.validation_score;
  j["provenance"] = proxy.provenance;
  std::ofstream os((fs::path(directory) / "manifest.json").string());
  if (!os) throw std::runtime_error("cannot write proxy manifest in " + directory);
  os << j.dump(2) << "\n";
}

attacks::ProxyModel load_proxy(const std::string& directory) {
  std::ifstream is((fs::path(directory) / "manifest.json").string());
  if (!is) throw std::runtime_error("cannot open proxy manifest in " + directory);
  nlohmann::json j;
  is >> j;
  if (j.value("schema", "") != "drlab-proxy-v1")
    throw std::runtime_error("unknown proxy manifest schema in " + directory);
  attacks::ProxyModel proxy;
  proxy.discrete = j.at("discrete").get<bool>();
  proxy.n_bins = j.at("n_bins").get<int>();
  proxy.validation_score = j.at("validation_score").get<double>();
  proxy.provenance = j.at("provenance").get<std::string>();
  proxy.imitator = nn::DenseNetwork::load_file((fs::path(directory) / "imitator.net").string());
  return proxy;
}

void save_outcomes(const std::vector<attacks::AttackOutcome>& outcomes, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (const attacks::AttackOutcome& o : outcomes) {
    nlohmann::json j;
    j["delta"] = o.delta;
    j["original_action"] = o.original_action;
    j["adversarial_action"] = o.adversarial_action;
    j["original_bin"] = o.original_bin;
    j["adversarial_bin"] = o.adversarial_bin;
    j["success"] = o.success;
    double linf = 0.0;
    for (double d : o.distortion) linf = std::max(linf, d);
    j["distortion_linf"] = linf;
    rows.push_back(std::move(j));
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write outcomes: " + path);
  os << rows.dump(0) << "\n";
}

}  // namespace drlab::harness
