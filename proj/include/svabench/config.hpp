// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. Precedence: command-line flags > environment >
// config file > built-in defaults.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "svabench/checker.hpp"
#include "svabench/llm_client.hpp"
#include "svabench/pipeline.hpp"

namespace svabench {

inline constexpr const char* kApiKeyEnv = "SVABENCH_API_KEY";
inline constexpr const char* kApiUrlEnv = "SVABENCH_API_URL";

struct ModelEndpoint {
  std::string id;
  std::string endpoint;

  bool operator==(const ModelEndpoint&) const = default;
};

struct RunConfig {
  std::filesystem::path benchmark_root = "benchmarks/bundled";
  std::string endpoint{kDefaultEndpoint};  // for models listed without one
  std::vector<ModelEndpoint> models{{"gpt-4o", std::string(kDefaultEndpoint)}};
  std::vector<int> shots{1, 5};
  GenParams gen_params;
  CheckConfig check_config;
  std::filesystem::path output_dir = "results";
  int parallelism = 4;
  int requests_per_minute = 60;
  std::string task_description{kDefaultTaskDescription};
  bool allow_zero_shot = false;
  std::uint64_t ice_seed = 50;
  std::string api_key;  // environment only, never read from files

  bool operator==(const RunConfig&) const = default;
};

/// Applies the keys present in `doc` on top of `base`. Relative paths are
/// resolved against `base_dir`. Throws std::invalid_argument on unknown
/// keys or ill-typed values.
RunConfig apply_config_json(RunConfig base, const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads a JSON config file. Throws UnreadableFile or std::invalid_argument.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_environment();

/// SVABENCH_API_URL replaces every endpoint; SVABENCH_API_KEY sets the key.
RunConfig apply_environment(RunConfig cfg, const EnvLookup& env);

/// Endpoint for `model_id`: the configured one for a known model, else the
/// default endpoint.
std::string endpoint_for(const RunConfig& cfg, const std::string& model_id);

nlohmann::ordered_json to_json(const RunConfig& cfg);

std::string_view to_string(CheckMode mode);
std::optional<CheckMode> check_mode_from_string(std::string_view text);

}  // namespace svabench
