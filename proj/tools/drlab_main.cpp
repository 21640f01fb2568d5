#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drlab/harness/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "path to a run config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", [&args](const std::vector<std::string>& vals) {
        args.seed = std::stoull(vals.front());
        return true;
      },
      "master seed override");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run_stages(const CommonArgs& args, const std::vector<std::string>& stages,
               const std::string& force_agent_kind = "") {
  drlab::harness::KeyValueConfig kv =
      drlab::harness::KeyValueConfig::parse_file(args.config_path);
  if (!force_agent_kind.empty()) kv.set("agent.kind", force_agent_kind);
  drlab::harness::PipelineOptions options;
  options.out_dir = args.out_dir;
  options.seed_override = args.seed;
  options.quiet = args.quiet;
  drlab::harness::run_pipeline(std::move(kv), options, stages);
  return 0;
}

int run_report(const CommonArgs& args) {
  namespace fs = std::filesystem;
  const std::string reports_dir = (fs::path(args.out_dir) / "reports").string();
  const auto reports = drlab::harness::load_reports_in(reports_dir);
  if (reports.empty()) {
    std::cerr << "no reports found in " << reports_dir << "\n";
    return 1;
  }
  const std::string table = drlab::harness::aggregate_reports(reports);
  const std::string summary_path = (fs::path(reports_dir) / "summary.txt").string();
  std::ofstream os(summary_path);
  os << table;
  if (!args.quiet) std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demand-response DRL testbed: train, attack, detect, defend"};
  app.require_subcommand(1);

  CommonArgs train_args, atla_args, attack_args, snoop_args, detect_args, sweep_args, report_args;

  CLI::App* cmd_train = app.add_subcommand("train", "train an agent and report clean KPIs");
  add_common(cmd_train, train_args);
  CLI::App* cmd_atla = app.add_subcommand("atla", "train a victim with the alternating adversary");
  add_common(cmd_atla, atla_args);
  CLI::App* cmd_attack = app.add_subcommand("attack", "run a closed-loop observation attack");
  add_common(cmd_attack, attack_args);
  CLI::App* cmd_snoop = app.add_subcommand("snoop", "black-box snooping attack via a proxy");
  add_common(cmd_snoop, snoop_args);
  CLI::App* cmd_detect = app.add_subcommand("detect", "attack then test statistical plausibility");
  add_common(cmd_detect, detect_args);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "attack across an epsilon list");
  add_common(cmd_sweep, sweep_args);
  CLI::App* cmd_report = app.add_subcommand("report", "aggregate run reports in --out");
  add_common(cmd_report, report_args, /*config_required=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (cmd_train->parsed()) return run_stages(train_args, {"train"});
    if (cmd_atla->parsed()) return run_stages(atla_args, {"train"}, "atla");
    if (cmd_attack->parsed()) return run_stages(attack_args, {"attack"});
    if (cmd_snoop->parsed()) return run_stages(snoop_args, {"snoop"});
    if (cmd_detect->parsed()) return run_stages(detect_args, {"attack", "detect"});
    if (cmd_sweep->parsed()) return run_stages(sweep_args, {"sweep"});
    if (cmd_report->parsed()) return run_report(report_args);
  } catch (const drlab::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
