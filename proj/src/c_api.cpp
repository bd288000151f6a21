#include "evocorps/evocorps.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "evocorps/engine.hpp"
#include "evocorps/error.hpp"

using nlohmann::json;
namespace eng = evocorps::engine;

struct evc_sim {
  std::unique_ptr<eng::Simulation> sim;
  std::optional<eng::RunResult> result;
  std::optional<std::vector<evocorps::metrics::MetricSnapshot>> snapshots;
};

namespace {

thread_local std::string g_last_error;

evc_status map_code(evocorps::ErrorCode c) {
  using evocorps::ErrorCode;
  switch (c) {
    case ErrorCode::kOk: return EVC_OK;
    case ErrorCode::kInvalidConfig: return EVC_ERR_INVALID_CONFIG;
    case ErrorCode::kInvalidArgument: return EVC_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNotFound: return EVC_ERR_NOT_FOUND;
    case ErrorCode::kDuplicate: return EVC_ERR_DUPLICATE;
    case ErrorCode::kParse: return EVC_ERR_PARSE;
    case ErrorCode::kIo: return EVC_ERR_IO;
    case ErrorCode::kBackend: return EVC_ERR_BACKEND;
    case ErrorCode::kIncompleteLog: return EVC_ERR_INCOMPLETE_LOG;
  }
  return EVC_ERR_INTERNAL;
}

evc_status fail(evc_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
evc_status guard(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const evocorps::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(EVC_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EVC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EVC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EVC_ERR_INTERNAL, "unknown error");
  }
}

evc_status give(const std::string& s, char** out) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) return fail(EVC_ERR_INTERNAL, "out of memory");
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
  return EVC_OK;
}

void copy_digest(const std::string& hex, char* out) {
  std::memset(out, 0, EVC_DIGEST_HEX_LEN);
  std::memcpy(out, hex.data(), std::min<std::size_t>(hex.size(), EVC_DIGEST_HEX_LEN - 1));
}

const eng::RunResult& finished(evc_sim* s) {
  if (!s->result) {
    if (!s->sim->done()) {
      throw evocorps::Error(evocorps::ErrorCode::kInvalidArgument, "run has not finished");
    }
    s->result = s->sim->run();
  }
  return *s->result;
}

json snapshot_json(const evocorps::metrics::MetricSnapshot& m) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"t", m.t},
          {"n_comments", m.n_comments},
          {"sentiment", opt(m.sentiment)},
          {"toxicity", opt(m.toxicity)},
          {"extremity", opt(m.extremity)},
          {"aqs", opt(m.aqs)},
          {"fallacy", opt(m.fallacy)},
          {"evidence", opt(m.evidence)},
          {"extremity_entropy", opt(m.extremity_entropy)},
          {"extremity_histogram", m.extremity_histogram}};
}

}  // namespace

extern "C" {

const char* evc_version(void) { return "0.1.0"; }

const char* evc_last_error(void) { return g_last_error.c_str(); }

const char* evc_status_string(evc_status status) {
  switch (status) {
    case EVC_OK: return "ok";
    case EVC_ERR_INVALID_CONFIG: return "invalid_config";
    case EVC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case EVC_ERR_NOT_FOUND: return "not_found";
    case EVC_ERR_DUPLICATE: return "duplicate";
    case EVC_ERR_PARSE: return "parse";
    case EVC_ERR_IO: return "io";
    case EVC_ERR_BACKEND: return "backend";
    case EVC_ERR_INCOMPLETE_LOG: return "incomplete_log";
    case EVC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void evc_free(void* p) { std::free(p); }

evc_status evc_sim_create(const char* config_json, evc_sim** out) {
  if (out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  return guard([&] {
    eng::ScenarioConfig cfg;
    if (config_json != nullptr && *config_json != '\0') {
      cfg = eng::apply_config_json(cfg, json::parse(config_json, nullptr, true, true));
    }
    auto h = std::make_unique<evc_sim>();
    h->sim = std::make_unique<eng::Simulation>(std::move(cfg));
    *out = h.release();
    return EVC_OK;
  });
}

void evc_sim_destroy(evc_sim* sim) { delete sim; }

evc_status evc_sim_step(evc_sim* sim) {
  if (sim == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "sim is null");
  return guard([&] {
    sim->sim->step();
    return EVC_OK;
  });
}

evc_status evc_sim_run(evc_sim* sim) {
  if (sim == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "sim is null");
  return guard([&] {
    sim->result = sim->sim->run();
    sim->snapshots.reset();
    if (!sim->result->log.complete) return fail(EVC_ERR_BACKEND, sim->result->log.error);
    return EVC_OK;
  });
}

int evc_sim_done(const evc_sim* sim) { return sim != nullptr && sim->sim->done() ? 1 : 0; }

int evc_sim_current_step(const evc_sim* sim) {
  return sim == nullptr ? -1 : sim->sim->current_step();
}

evc_status evc_sim_metrics_json(evc_sim* sim, char** out) {
  if (sim == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const auto& r = finished(sim);
    if (!sim->snapshots) sim->snapshots = eng::compute_snapshots(sim->sim->config(), r.world);
    json arr = json::array();
    for (const auto& m : *sim->snapshots) arr.push_back(snapshot_json(m));
    return give(arr.dump(), out);
  });
}

evc_status evc_sim_write_outputs(evc_sim* sim, const char* out_dir) {
  if (sim == nullptr || out_dir == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const auto& r = finished(sim);
    if (!sim->snapshots) sim->snapshots = eng::compute_snapshots(sim->sim->config(), r.world);
    eng::write_outputs(sim->sim->config(), r, *sim->snapshots, out_dir);
    return EVC_OK;
  });
}

evc_status evc_sim_world_digest(const evc_sim* sim, char out[EVC_DIGEST_HEX_LEN]) {
  if (sim == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    copy_digest(eng::world_digest(sim->sim->world()), out);
    return EVC_OK;
  });
}

evc_status evc_sim_replay_digest(const evc_sim* sim, char out[EVC_DIGEST_HEX_LEN]) {
  if (sim == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    copy_digest(eng::replay_digest(sim->sim->log()), out);
    return EVC_OK;
  });
}

evc_status evc_sim_log_jsonl(const evc_sim* sim, char** out) {
  if (sim == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { return give(sim->sim->log().to_jsonl(), out); });
}

evc_status evc_sim_rewards_json(const evc_sim* sim, char** out) {
  if (sim == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    json arr = json::array();
    for (const auto& e : sim->sim->log().events) {
      if (e.kind == "reward") arr.push_back(e.payload.at("reward"));
    }
    return give(arr.dump(), out);
  });
}

evc_status evc_sim_probe(const evc_sim* sim, const char* user_id, char** out) {
  if (sim == nullptr || user_id == nullptr || out == nullptr) {
    return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guard([&] { return give(sim->sim->probe_user(user_id).to_json().dump(), out); });
}

evc_status evc_log_file_digest(const char* path, char out[EVC_DIGEST_HEX_LEN]) {
  if (path == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    copy_digest(eng::replay_digest(eng::RunLog::load(path)), out);
    return EVC_OK;
  });
}

evc_status evc_log_file_world_digest(const char* path, char out[EVC_DIGEST_HEX_LEN]) {
  if (path == nullptr || out == nullptr) return fail(EVC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    copy_digest(eng::world_digest(eng::replay(eng::RunLog::load(path))), out);
    return EVC_OK;
  });
}

}  // extern "C"
