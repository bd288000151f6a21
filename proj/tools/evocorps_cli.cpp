// Command-line runner on top of the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evocorps/evocorps.h"

using nlohmann::json;

namespace {

int report(evc_status s, const char* what) {
  std::cerr << "evocorps: " << what << ": " << evc_status_string(s);
  const std::string msg = evc_last_error();
  if (!msg.empty()) std::cerr << ": " << msg;
  std::cerr << "\n";
  return static_cast<int>(s) == 0 ? 0 : (s == EVC_ERR_INVALID_CONFIG || s == EVC_ERR_PARSE ? 2 : 1);
}

std::string take(char* p) {
  std::string s = p == nullptr ? "" : p;
  evc_free(p);
  return s;
}

std::vector<int> parse_steps(const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw CLI::ValidationError("--snapshots", "bad step '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string fmt(const json& v) {
  if (v.is_null()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v.get<double>());
  return buf;
}

struct RunOptions {
  std::string config_path;
  int case_id = 0;
  long long seed = -1;
  int steps = 0;
  int users = 0;
  std::string backend;
  std::string endpoint;
  std::string model;
  std::vector<std::string> ablation;
  std::string out = "out";
  std::string snapshots;
  std::string data_dir;
  std::string prompt_dir;
  bool quiet = false;
};

int cmd_run(const RunOptions& o) {
  json cfg = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      std::cerr << "evocorps: cannot open config '" << o.config_path << "'\n";
      return 2;
    }
    try {
      cfg = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
      std::cerr << "evocorps: config '" << o.config_path << "': " << e.what() << "\n";
      return 2;
    }
    if (!cfg.is_object()) {
      std::cerr << "evocorps: config must be a JSON object\n";
      return 2;
    }
  }
  if (o.case_id != 0) cfg["case"] = o.case_id;
  if (o.seed >= 0) cfg["seed"] = o.seed;
  if (o.steps != 0) cfg["horizon"] = o.steps;
  if (o.users != 0) cfg["population"] = o.users;
  if (!o.ablation.empty()) cfg["ablation"] = o.ablation;
  if (!o.snapshots.empty()) cfg["snapshot_steps"] = parse_steps(o.snapshots);
  if (!o.data_dir.empty()) cfg["data_dir"] = o.data_dir;
  if (!o.prompt_dir.empty()) cfg["prompt_dir"] = o.prompt_dir;
  if (!o.backend.empty() || !o.endpoint.empty() || !o.model.empty()) {
    json b = cfg.contains("backend") && cfg["backend"].is_object() ? cfg["backend"] : json::object();
    if (cfg.contains("backend") && cfg["backend"].is_string()) b["kind"] = cfg["backend"];
    if (!o.backend.empty()) b["kind"] = o.backend;
    if (!o.endpoint.empty()) b["endpoint"] = o.endpoint;
    if (!o.model.empty()) b["model"] = o.model;
    cfg["backend"] = b;
  }

  evc_sim* sim = nullptr;
  if (auto s = evc_sim_create(cfg.dump().c_str(), &sim); s != EVC_OK) return report(s, "config");

  const evc_status run_status = evc_sim_run(sim);
  int rc = 0;
  if (run_status != EVC_OK) rc = report(run_status, "run");

  if (auto s = evc_sim_write_outputs(sim, o.out.c_str()); s != EVC_OK) {
    rc = report(s, "write outputs");
    evc_sim_destroy(sim);
    return rc;
  }

  if (!o.quiet) {
    char* metrics = nullptr;
    if (evc_sim_metrics_json(sim, &metrics) == EVC_OK) {
      const json arr = json::parse(take(metrics));
      std::printf("%5s %6s %9s %9s %9s %7s %8s %9s\n", "t", "n", "sentiment", "toxicity",
                  "extremity", "aqs", "fallacy", "evidence");
      for (const auto& m : arr) {
        std::printf("%5d %6d %9s %9s %9s %7s %8s %9s\n", m["t"].get<int>(),
                    m["n_comments"].get<int>(), fmt(m["sentiment"]).c_str(),
                    fmt(m["toxicity"]).c_str(), fmt(m["extremity"]).c_str(),
                    fmt(m["aqs"]).c_str(), fmt(m["fallacy"]).c_str(),
                    fmt(m["evidence"]).c_str());
      }
    }
    char* rewards = nullptr;
    if (evc_sim_rewards_json(sim, &rewards) == EVC_OK) {
      const json arr = json::parse(take(rewards));
      double sum = 0.0;
      for (const auto& r : arr) sum += r.get<double>();
      std::printf("rounds %zu  cumulative reward %.4f\n", arr.size(), sum);
    }
  }
  char digest[EVC_DIGEST_HEX_LEN];
  if (evc_sim_replay_digest(sim, digest) == EVC_OK) {
    std::printf("replay digest %s\n", digest);
  } else {
    std::printf("replay digest unavailable (incomplete log)\n");
  }
  std::printf("outputs in %s\n", o.out.c_str());
  evc_sim_destroy(sim);
  return rc;
}

int cmd_digest(const std::string& path, bool world) {
  char digest[EVC_DIGEST_HEX_LEN];
  const evc_status s = world ? evc_log_file_world_digest(path.c_str(), digest)
                             : evc_log_file_digest(path.c_str(), digest);
  if (s != EVC_OK) return report(s, "digest");
  std::printf("%s\n", digest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EvoCorps discourse simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(evc_version()));

  RunOptions ro;
  auto* run = app.add_subcommand("run", "run one scenario and write its outputs");
  run->add_option("--config", ro.config_path, "JSON config file (comments allowed)");
  run->add_option("--case", ro.case_id, "scenario case")->check(CLI::Range(1, 4));
  run->add_option("--seed", ro.seed, "master seed")->check(CLI::NonNegativeNumber);
  run->add_option("--steps", ro.steps, "horizon in rounds")->check(CLI::PositiveNumber);
  run->add_option("--users", ro.users, "ordinary user count")->check(CLI::PositiveNumber);
  run->add_option("--backend", ro.backend, "generation backend")
      ->check(CLI::IsMember({"scripted", "remote"}));
  run->add_option("--endpoint", ro.endpoint, "chat-completions URL for the remote backend");
  run->add_option("--model", ro.model, "model name for the remote backend");
  run->add_option("--ablation", ro.ablation, "disable a team role (case 4 only)")
      ->check(CLI::IsMember({"analyst", "strategist", "leader", "amplifiers"}))
      ->delimiter(',');
  run->add_option("--out", ro.out, "output directory")->capture_default_str();
  run->add_option("--snapshots", ro.snapshots, "comma-separated snapshot steps");
  run->add_option("--data", ro.data_dir, "data directory");
  run->add_option("--prompts", ro.prompt_dir, "prompt template directory");
  run->add_flag("-q,--quiet", ro.quiet, "skip the metrics table");

  std::string log_path;
  bool world = false;
  auto* dig = app.add_subcommand("digest", "print the replay digest of a run_log.jsonl");
  dig->add_option("log", log_path, "path to run_log.jsonl")->required()->check(CLI::ExistingFile);
  dig->add_flag("--world", world, "digest of the world rebuilt from the log instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*run) return cmd_run(ro);
    if (*dig) return cmd_digest(log_path, world);
  } catch (const std::exception& e) {
    std::cerr << "evocorps: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
