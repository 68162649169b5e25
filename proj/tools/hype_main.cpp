// Copyright 2026 The hype-bench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Operator CLI: serve, pool build, simulate, score, compare, replay.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hype/error.hpp"
#include "hype/pool.hpp"
#include "hype/scoring.hpp"
#include "hype/service/analysis.hpp"
#include "hype/service/config.hpp"
#include "hype/service/http_server.hpp"
#include "hype/service/platform.hpp"
#include "hype/service/response_log.hpp"
#include "hype/simulator.hpp"

namespace fs = std::filesystem;
using namespace hype;
using namespace hype::service;

namespace {

struct Globals {
  uint64_t seed = 0;
  std::string out;
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) fail(ErrorKind::kConfiguration, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<ImageRecord> load_source(const std::string& path, Label source,
                                     const std::optional<std::string>& model) {
  if (fs::is_directory(path)) {
    const std::string prefix = source == Label::kReal ? "real" : "fake/" + model.value_or("model");
    return scan_image_directory(path, source, model, prefix);
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kNotFound, "cannot read " + path);
  std::vector<ImageRecord> records = read_image_records(in);
  for (ImageRecord& r : records) {
    if (r.source != source) fail(ErrorKind::kInput, path + " mixes real and fake records");
    if (source == Label::kFake && !r.model_id) r.model_id = model;
  }
  return records;
}

void print_comparison_table(std::ostream& out, const ComparisonReport& report) {
  if (report.models.empty()) return;
  out << report_table_header(report.models.front().mode) << '\n';
  for (const ModelScoreReport& m : report.models) out << format_report_row(m) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hype: human-evaluation benchmark for generative models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base random seed")->default_val(0);
  app.add_option("--out", g.out, "Output file (default: stdout)");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string config_path;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> data_dir;
  serve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Override server.host");
  serve->add_option("--port", port, "Override server.port");
  serve->add_option("--data-dir", data_dir, "Override server.data_dir");

  // pool build
  auto* pool_cmd = app.add_subcommand("pool", "Image pool tools");
  pool_cmd->require_subcommand(1);
  auto* pool_build = pool_cmd->add_subcommand("build", "Sample a balanced pool");
  std::string real_src;
  std::string fake_src;
  std::string model_id;
  std::size_t k = kDefaultPoolSize;
  std::string pool_id;
  pool_build->add_option("--real", real_src, "Directory or JSONL manifest of real images")
      ->required();
  pool_build->add_option("--fake", fake_src, "Directory or JSONL manifest of generated images")
      ->required();
  pool_build->add_option("--model", model_id, "Model id of the generated images")->required();
  pool_build->add_option("--k", k, "Images drawn from each source")->default_val(kDefaultPoolSize);
  pool_build->add_option("--pool-id", pool_id, "Pool id (default: --out file stem)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulated evaluator experiments");
  sim->require_subcommand(1);
  TimeExperimentConfig time_cfg;
  auto* sim_time = sim->add_subcommand("time", "Staircase sessions of psychometric evaluators");
  sim_time->add_option("--evaluators", time_cfg.evaluators)->default_val(30);
  sim_time->add_option("--t75", time_cfg.model.threshold_t75, "75%-correct exposure (ms)")
      ->default_val(400.0);
  sim_time->add_option("--slope", time_cfg.model.slope)->default_val(6.0);
  sim_time->add_option("--lapse", time_cfg.model.lapse_rate)->default_val(0.02);

  InfinityExperimentConfig inf_cfg;
  auto* sim_inf = sim->add_subcommand("infinity", "Untimed sessions with fixed error rates");
  sim_inf->add_option("--p-fooled", inf_cfg.model.p_fooled_by_fake)->default_val(0.5);
  sim_inf->add_option("--p-misjudge", inf_cfg.model.p_misjudge_real)->default_val(0.5);
  sim_inf->add_option("--evaluators", inf_cfg.evaluators)->default_val(30);
  sim_inf->add_option("--iterations", inf_cfg.bootstrap.iterations)
      ->default_val(kDefaultBootstrapIterations);

  InfinityBehaviorModel trade_model{0.5, 0.5};
  int trade_pool = 120;
  TradeoffConfig trade_cfg;
  auto* sim_trade = sim->add_subcommand("tradeoff", "Bootstrap CI width against evaluator count");
  sim_trade->add_option("--p-fooled", trade_model.p_fooled_by_fake)->default_val(0.5);
  sim_trade->add_option("--p-misjudge", trade_model.p_misjudge_real)->default_val(0.5);
  sim_trade->add_option("--pool-size", trade_pool)->default_val(120);
  sim_trade->add_option("--iterations", trade_cfg.iterations)
      ->default_val(kDefaultBootstrapIterations);
  sim_trade->add_option("--grid", trade_cfg.n_grid, "Evaluator counts");

  ConvergenceConfig conv_cfg;
  auto* sim_conv = sim->add_subcommand("convergence", "Drift of fixed-accuracy responders");
  sim_conv->add_option("--p", conv_cfg.responder_p)->default_val(0.75);
  sim_conv->add_option("--blocks", conv_cfg.blocks)->default_val(10000);

  // score / compare / replay
  std::string data = "hype-data";
  auto* score_cmd = app.add_subcommand("score", "Score a run from the data directory");
  std::string run_id;
  bool table = false;
  score_cmd->add_option("run", run_id)->required();
  score_cmd->add_option("--data-dir", data)->default_val("hype-data");
  score_cmd->add_flag("--table", table, "Print a text table instead of JSON");

  auto* compare_cmd = app.add_subcommand("compare", "Compare runs and correlate with metrics");
  std::vector<std::string> run_ids;
  std::string metrics_csv;
  compare_cmd->add_option("runs", run_ids)->required();
  compare_cmd->add_option("--metrics", metrics_csv, "CSV model_id,metric,value")
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--data-dir", data)->default_val("hype-data");
  compare_cmd->add_flag("--table", table, "Print a ranked table before the JSON");

  auto* replay_cmd = app.add_subcommand("replay", "Rebuild run reports from a response log");
  std::string log_file;
  std::string runs_dir;
  replay_cmd->add_option("log", log_file)->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--runs-dir", runs_dir, "Run manifests (default: <log dir>/runs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      const auto env = process_environment();
      nlohmann::json j = nlohmann::json::object();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::kConfiguration, "config file is not valid JSON");
      }
      j = apply_env_overrides(std::move(j), env);
      if (host) j["server"]["host"] = *host;
      if (port) j["server"]["port"] = *port;
      if (data_dir) j["server"]["data_dir"] = *data_dir;
      if (app.get_option("--seed")->count() > 0) j["seed"] = g.seed;
      const ServiceConfig config = config_from_json(j);
      Platform platform(config);
      HttpServer server(platform);
      const int bound = server.bind(config.server.host, config.server.port);
      std::cerr << "hype: serving " << config.server.data_dir << " on " << config.server.host
                << ":" << bound << std::endl;
      server.listen();
      return 0;
    }

    Output out(g.out);
    std::ostream& os = out.stream();

    if (pool_build->parsed()) {
      if (pool_id.empty()) {
        if (g.out.empty()) fail(ErrorKind::kInput, "--pool-id or --out is required");
        pool_id = fs::path(g.out).stem().string();
      }
      const auto reals = load_source(real_src, Label::kReal, std::nullopt);
      const auto fakes = load_source(fake_src, Label::kFake, model_id);
      const ImagePool pool = build_pool(reals, fakes, k, g.seed, pool_id);
      write_pool_manifest(os, pool);
      std::cerr << "hype: pool " << pool_id << " with " << pool.real_images.size() << " real and "
                << pool.fake_images.size() << " fake images" << std::endl;
      return 0;
    }

    if (sim_time->parsed()) {
      write_jsonl(os, run_time_experiment(time_cfg, g.seed));
      return 0;
    }
    if (sim_inf->parsed()) {
      write_jsonl(os, run_infinity_experiment(inf_cfg, g.seed));
      return 0;
    }
    if (sim_trade->parsed()) {
      trade_cfg.pool_scores =
          simulate_infinity_pool(trade_model, {}, trade_pool, derive_seed(g.seed, 1));
      write_jsonl(os, run_cost_tradeoff_experiment(trade_cfg, g.seed));
      return 0;
    }
    if (sim_conv->parsed()) {
      write_jsonl(os, run_convergence_experiment(conv_cfg, g.seed));
      return 0;
    }

    if (score_cmd->parsed()) {
      const fs::path dir(data);
      const LogReplay replay = replay_log(dir / "responses.jsonl");
      const auto j = nlohmann::json::parse(read_file(dir / "runs" / (run_id + ".json")));
      const ScoredRun scored =
          score_run(run_manifest_from_json(j), replay.entries, replay.truncated_tail);
      if (table) {
        os << report_table_header(scored.report.mode) << '\n'
           << format_report_row(scored.report) << '\n';
      } else {
        os << to_json(scored.report).dump() << '\n';
      }
      return 0;
    }

    if (compare_cmd->parsed()) {
      const fs::path dir(data);
      const LogReplay replay = replay_log(dir / "responses.jsonl");
      std::vector<ScoredRun> scored;
      for (const std::string& id : run_ids) {
        const auto j = nlohmann::json::parse(read_file(dir / "runs" / (id + ".json")));
        scored.push_back(score_run(run_manifest_from_json(j), replay.entries, replay.truncated_tail));
      }
      const MetricTable metrics =
          metrics_csv.empty() ? MetricTable{} : MetricTable::parse_csv(read_file(metrics_csv));
      const ComparisonReport report = compare_models(scored, metrics);
      if (table) print_comparison_table(os, report);
      os << to_json(report).dump(2) << '\n';
      for (const std::string& w : report.warnings) std::cerr << "hype: warning: " << w << '\n';
      return 0;
    }

    if (replay_cmd->parsed()) {
      const fs::path log(log_file);
      const fs::path runs = runs_dir.empty() ? log.parent_path() / "runs" : fs::path(runs_dir);
      for (const ScoredRun& s : replay_scores(log, runs)) os << to_json(s.report).dump() << '\n';
      return 0;
    }
  } catch (const CorruptionError& e) {
    std::cerr << "hype: corruption at line " << e.offset() << ": " << e.what() << std::endl;
    return 3;
  } catch (const Error& e) {
    std::cerr << "hype: " << to_string(e.kind()) << ": " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hype: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
