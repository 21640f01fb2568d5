#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drlab/harness/config.hpp"
#include "drlab/harness/pipeline.hpp"
#include "drlab/harness/seeding.hpp"

using namespace drlab::harness;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTinyConfig =
    "schema.version = 1\n"
    "run.master_seed = 5\n"
    "dataset.source = synthetic\n"
    "dataset.days = 2\n"
    "train.episodes = 2\n"
    "agent.action_space = discrete\n"
    "agent.n_bins = 4\n"
    "attack.procedure = fgm\n"
    "attack.mode = bifurcated\n"
    "attack.epsilon = 0\n";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DRLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing: comments, trimming, duplicates, malformed lines") {
  const KeyValueConfig cfg = KeyValueConfig::parse_text(
      "# comment\n"
      "  a.b = 12  \n"
      "\n"
      "c.d = hello\n");
  CHECK(cfg.has("a.b"));
  CHECK(cfg.has("c.d"));

  CHECK_THROWS_AS(KeyValueConfig::parse_text("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("not a key value line\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("= 3\n"), ConfigError);
}

TEST_CASE("config typed getters and error messages") {
  KeyValueConfig cfg = KeyValueConfig::parse_text("x.num = 2.5\nx.int = 7\nx.flag = true\nx.list = 1,2,3\n");
  CHECK(cfg.get_double("x.num", 0.0) == 2.5);
  CHECK(cfg.get_int("x.int", 0) == 7);
  CHECK(cfg.get_bool("x.flag", false));
  CHECK(cfg.get_double_list("x.list", {}) == std::vector<double>{1, 2, 3});
  CHECK(cfg.get_string("x.missing", "fallback") == "fallback");
  CHECK_THROWS_AS(cfg.get_string("x.required"), ConfigError);

  KeyValueConfig bad = KeyValueConfig::parse_text("x.num = abc\n");
  CHECK_THROWS_AS(bad.get_double("x.num", 0.0), ConfigError);
}

TEST_CASE("unknown config keys are rejected, fail-fast") {
  KeyValueConfig cfg = KeyValueConfig::parse_text(std::string(kTinyConfig) + "attack.epsilonn = 0.1\n");
  try {
    ExperimentConfig::parse(cfg, std::nullopt);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("attack.epsilonn") != std::string::npos);
  }
}

TEST_CASE("config hash is stable under key reordering and changes with values") {
  const KeyValueConfig a = KeyValueConfig::parse_text("x.a = 1\nx.b = 2\n");
  const KeyValueConfig b = KeyValueConfig::parse_text("x.b = 2\nx.a = 1\n");
  CHECK(a.config_hash() == b.config_hash());
  const KeyValueConfig c = KeyValueConfig::parse_text("x.a = 1\nx.b = 3\n");
  CHECK(a.config_hash() != c.config_hash());
}

TEST_CASE("sub-seed derivation is pure and sensitive to every input") {
  CHECK(sub_seed(1, "train", 0) == sub_seed(1, "train", 0));
  CHECK(sub_seed(1, "train", 0) != sub_seed(2, "train", 0));
  CHECK(sub_seed(1, "train", 0) != sub_seed(1, "detect", 0));
  CHECK(sub_seed(1, "train", 0) != sub_seed(1, "train", 1));
}

TEST_CASE("pipeline: zero-epsilon attack reports zero regret and zero asr") {
  const fs::path out = fresh_dir("drlab_pipe_zero");
  PipelineOptions options;
  options.out_dir = out.string();
  options.quiet = true;
  const RunReport report =
      run_pipeline(KeyValueConfig::parse_text(kTinyConfig), options, {"attack"});
  CHECK(report.has_attack);
  CHECK(report.consumption_regret == 0.0);
  CHECK(report.daily_peak_regret == 0.0);
  CHECK(report.asr == 0.0);
  CHECK(fs::exists(out / "logs"));
  CHECK(fs::exists(out / "reports"));
  fs::remove_all(out);
}

TEST_CASE("pipeline reruns are byte-identical for the same config and seed") {
  const fs::path out_a = fresh_dir("drlab_pipe_a");
  const fs::path out_b = fresh_dir("drlab_pipe_b");
  const std::string cfg_text =
      "schema.version = 1\n"
      "run.master_seed = 9\n"
      "dataset.source = synthetic\n"
      "dataset.days = 2\n"
      "train.episodes = 2\n"
      "agent.action_space = discrete\n"
      "agent.n_bins = 4\n"
      "attack.procedure = pgd\n"
      "attack.mode = bifurcated\n"
      "attack.epsilon = 0.05\n"
      "attack.iterations = 10\n"
      "attack.decays = 2\n";
  for (const fs::path& out : {out_a, out_b}) {
    PipelineOptions options;
    options.out_dir = out.string();
    options.quiet = true;
    run_pipeline(KeyValueConfig::parse_text(cfg_text), options, {"attack"});
  }
  std::vector<std::string> relative_files;
  for (const auto& entry : fs::recursive_directory_iterator(out_a))
    if (entry.is_regular_file())
      relative_files.push_back(fs::relative(entry.path(), out_a).string());
  REQUIRE(!relative_files.empty());
  for (const std::string& rel : relative_files)
    CHECK(slurp((out_a / rel).string()) == slurp((out_b / rel).string()));
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("report regrets equal KPIs recomputed from the persisted logs") {
  const fs::path out = fresh_dir("drlab_pipe_recompute");
  const std::string cfg_text =
      "schema.version = 1\n"
      "run.master_seed = 3\n"
      "dataset.source = synthetic\n"
      "dataset.days = 2\n"
      "train.episodes = 2\n"
      "agent.action_space = discrete\n"
      "agent.n_bins = 4\n"
      "attack.procedure = fgm\n"
      "attack.mode = bifurcated\n"
      "attack.epsilon = 0.08\n";
  PipelineOptions options;
  options.out_dir = out.string();
  options.quiet = true;
  const RunReport report =
      run_pipeline(KeyValueConfig::parse_text(cfg_text), options, {"attack"});

  const std::string prefix = (out / "logs").string() + "/ppo_discrete4_bifurcated_fgm";
  const drlab::env::EpisodeLog baseline = drlab::env::load_episode_log(prefix + ".baseline.json");
  const drlab::env::EpisodeLog clean = drlab::env::load_episode_log(prefix + ".clean.json");
  const drlab::env::EpisodeLog adversarial =
      drlab::env::load_episode_log(prefix + ".adversarial.json");
  const auto clean_kpis = drlab::env::compute_kpis(clean, baseline);
  const auto attacked_kpis = drlab::env::compute_kpis(adversarial, baseline);
  CHECK(report.consumption_regret ==
        doctest::Approx(attacked_kpis.electricity_consumption -
                        clean_kpis.electricity_consumption)
            .epsilon(1e-12));
  CHECK(report.ramping_regret ==
        doctest::Approx(attacked_kpis.ramping - clean_kpis.ramping).epsilon(1e-12));
  fs::remove_all(out);
}

TEST_CASE("report json round-trips and aggregates") {
  RunReport r;
  r.run_id = "abc";
  r.config_hash = "ff00";
  r.agent_id = "agent";
  r.attack_id = "pgd";
  r.has_attack = true;
  r.clean_kpis.electricity_consumption = 0.9;
  r.attacked_kpis.electricity_consumption = 1.1;
  r.consumption_regret = 0.2;
  r.asr = 0.5;
  const fs::path out = fresh_dir("drlab_report_roundtrip");
  const std::string path = (out / "r.report.json").string();
  write_report_json(r, path);
  const RunReport loaded = read_report_json(path);
  CHECK(loaded.run_id == "abc");
  CHECK(loaded.consumption_regret == 0.2);
  const std::string table = aggregate_reports({loaded});
  CHECK(table.find("agent") != std::string::npos);
  CHECK(table.find("pgd") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("cli: missing config file exits 1 and names the path") {
  CHECK(run_cli("attack --config /nonexistent/conf.cfg --out /tmp/drlab_cli_x") == 1);
}

TEST_CASE("cli: unknown subcommand or flag exits 1") {
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("train --nonsense") == 1);
}

TEST_CASE("cli: tiny end-to-end attack run exits 0 and writes artifacts") {
  const fs::path out = fresh_dir("drlab_cli_run");
  const fs::path cfg = out / "run.cfg";
  std::ofstream(cfg.string()) << kTinyConfig;
  CHECK(run_cli("attack --config " + cfg.string() + " --seed 7 --out " + out.string() +
                " --quiet") == 0);
  CHECK(fs::exists(out / "reports"));
  bool has_report = false;
  for (const auto& entry : fs::directory_iterator(out / "reports"))
    if (entry.path().extension() == ".json") has_report = true;
  CHECK(has_report);
  CHECK(run_cli("report --out " + out.string() + " --quiet") == 0);
  CHECK(fs::exists(out / "reports" / "summary.txt"));
  fs::remove_all(out);
}
