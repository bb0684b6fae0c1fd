// SPDX-License-Identifier: Apache-2.0
#include "svabench/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "svabench/errors.hpp"

namespace svabench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + where + key + "'");
  }
}

template <typename T>
T get(const json& doc, const char* key, const std::string& where) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config key '" + where + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& p, const fs::path& base_dir) {
  return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
}

}  // namespace

std::string_view to_string(CheckMode mode) { return mode == CheckMode::Random ? "random" : "exhaustive"; }

std::optional<CheckMode> check_mode_from_string(std::string_view text) {
  if (text == "exhaustive") return CheckMode::Exhaustive;
  if (text == "random") return CheckMode::Random;
  return std::nullopt;
}

RunConfig apply_config_json(RunConfig cfg, const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  reject_unknown(doc,
                 {"benchmark_root", "endpoint", "models", "shots", "gen_params", "check", "output_dir", "parallelism",
                  "requests_per_minute", "task_description", "zero_shot", "ice_seed"},
                 "");
  if (doc.contains("benchmark_root")) cfg.benchmark_root = resolve(get<std::string>(doc, "benchmark_root", ""), base_dir);
  if (doc.contains("output_dir")) cfg.output_dir = resolve(get<std::string>(doc, "output_dir", ""), base_dir);
  if (doc.contains("endpoint")) {
    std::string ep = get<std::string>(doc, "endpoint", "");
    // A relative mock directory is taken relative to the config file.
    if (is_mock_endpoint(ep)) ep = "mock://" + resolve(ep.substr(7), base_dir).string();
    cfg.endpoint = ep;
  }
  if (doc.contains("models")) {
    const json& models = doc.at("models");
    if (!models.is_array()) throw std::invalid_argument("config key 'models' must be an array");
    cfg.models.clear();
    for (const auto& m : models) {
      if (m.is_string()) {
        cfg.models.push_back({m.get<std::string>(), cfg.endpoint});
      } else if (m.is_object()) {
        reject_unknown(m, {"id", "endpoint"}, "models[].");
        ModelEndpoint me{get<std::string>(m, "id", "models[]."), cfg.endpoint};
        if (m.contains("endpoint")) {
          me.endpoint = get<std::string>(m, "endpoint", "models[].");
          if (is_mock_endpoint(me.endpoint)) me.endpoint = "mock://" + resolve(me.endpoint.substr(7), base_dir).string();
        }
        cfg.models.push_back(std::move(me));
      } else {
        throw std::invalid_argument("config key 'models' entries must be strings or objects");
      }
    }
  } else if (doc.contains("endpoint")) {
    for (auto& m : cfg.models) m.endpoint = cfg.endpoint;
  }
  if (doc.contains("shots")) cfg.shots = get<std::vector<int>>(doc, "shots", "");
  if (doc.contains("gen_params")) {
    const json& g = doc.at("gen_params");
    const std::string where = "gen_params.";
    reject_unknown(g, {"max_output_tokens", "temperature", "top_p", "random_seed"}, where);
    if (g.contains("max_output_tokens")) cfg.gen_params.max_output_tokens = get<int>(g, "max_output_tokens", where);
    if (g.contains("temperature")) cfg.gen_params.temperature = get<double>(g, "temperature", where);
    if (g.contains("top_p")) cfg.gen_params.top_p = get<double>(g, "top_p", where);
    if (g.contains("random_seed")) cfg.gen_params.random_seed = get<std::uint64_t>(g, "random_seed", where);
  }
  if (doc.contains("check")) {
    const json& c = doc.at("check");
    const std::string where = "check.";
    reject_unknown(c, {"mode", "bit_budget", "random_trials", "reachability_depth", "seed"}, where);
    if (c.contains("mode")) {
      auto mode = check_mode_from_string(get<std::string>(c, "mode", where));
      if (!mode) throw std::invalid_argument("config key 'check.mode' must be \"exhaustive\" or \"random\"");
      cfg.check_config.mode = *mode;
    }
    if (c.contains("bit_budget")) cfg.check_config.bit_budget = get<int>(c, "bit_budget", where);
    if (c.contains("random_trials")) cfg.check_config.random_trials = get<std::uint64_t>(c, "random_trials", where);
    if (c.contains("reachability_depth")) cfg.check_config.reachability_depth = get<int>(c, "reachability_depth", where);
    if (c.contains("seed")) cfg.check_config.seed = get<std::uint64_t>(c, "seed", where);
  }
  if (doc.contains("parallelism")) cfg.parallelism = get<int>(doc, "parallelism", "");
  if (doc.contains("requests_per_minute")) cfg.requests_per_minute = get<int>(doc, "requests_per_minute", "");
  if (doc.contains("task_description")) cfg.task_description = get<std::string>(doc, "task_description", "");
  if (doc.contains("zero_shot")) cfg.allow_zero_shot = get<bool>(doc, "zero_shot", "");
  if (doc.contains("ice_seed")) cfg.ice_seed = get<std::uint64_t>(doc, "ice_seed", "");
  return cfg;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false, true);
  if (doc.is_discarded()) throw std::invalid_argument("config " + path.string() + " is not valid JSON");
  return apply_config_json(std::move(base), doc, path.parent_path());
}

EnvLookup process_environment() {
  return [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
}

RunConfig apply_environment(RunConfig cfg, const EnvLookup& env) {
  if (auto key = env(kApiKeyEnv)) cfg.api_key = *key;
  if (auto url = env(kApiUrlEnv)) {
    cfg.endpoint = *url;
    for (auto& m : cfg.models) m.endpoint = *url;
  }
  return cfg;
}

std::string endpoint_for(const RunConfig& cfg, const std::string& model_id) {
  for (const auto& m : cfg.models) {
    if (m.id == model_id) return m.endpoint;
  }
  return cfg.endpoint;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json out;
  out["benchmark_root"] = cfg.benchmark_root.string();
  out["endpoint"] = cfg.endpoint;
  auto& models = out["models"] = nlohmann::ordered_json::array();
  for (const auto& m : cfg.models) models.push_back({{"id", m.id}, {"endpoint", m.endpoint}});
  out["shots"] = cfg.shots;
  out["gen_params"] = {{"max_output_tokens", cfg.gen_params.max_output_tokens},
                       {"temperature", cfg.gen_params.temperature},
                       {"top_p", cfg.gen_params.top_p},
                       {"random_seed", cfg.gen_params.random_seed}};
  out["check"] = {{"mode", to_string(cfg.check_config.mode)},
                  {"bit_budget", cfg.check_config.bit_budget},
                  {"random_trials", cfg.check_config.random_trials},
                  {"reachability_depth", cfg.check_config.reachability_depth},
                  {"seed", cfg.check_config.seed}};
  out["output_dir"] = cfg.output_dir.string();
  out["parallelism"] = cfg.parallelism;
  out["requests_per_minute"] = cfg.requests_per_minute;
  out["task_description"] = cfg.task_description;
  out["zero_shot"] = cfg.allow_zero_shot;
  out["ice_seed"] = cfg.ice_seed;
  return out;
}

}  // namespace svabench
