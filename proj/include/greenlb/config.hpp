#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "greenlb/design_space.hpp"
#include "greenlb/engine.hpp"
#include "greenlb/policy.hpp"

namespace greenlb {

inline constexpr int kSchemaVersion = 1;

/// A parsed scenario file.
///
/// Layout (JSON):
///   schema_version   required, must be 1
///   scenario         required: seed, stop {max_requests | max_virtual_time} required;
///                    num_servers, arrival_rate, service_time, warmup, batches,
///                    initial_state ("sleep" | "on"), arrival_times optional
///   power            optional: p_on, p_sleep, p_suspend, p_wakeup, t_suspend,
///                    t_wakeup, timeout (number or "inf")
///   policy           required: exactly one of text / file; nd ("random" |
///                    "fixed_order"); dspace {name: number}
///   study            optional: q [int], TO [number | "inf"], nd [string],
///                    replications
/// Unknown keys are rejected.
struct ScenarioFile {
  SimConfig sim;
  std::string policy_text;
  bool timeout_given = false;
  std::optional<DesignSpace> study;
};

/// `base_dir` resolves a relative policy.file.
ScenarioFile parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Reads a policy file (UTF-8, one expression, `#` comments allowed).
std::string read_text_file(const std::filesystem::path& path);

/// Input of `greenlb eval`.
///
/// Layout (JSON):
///   schema_version   required, must be 1
///   servers          required: [{queue_size, state}], index = server id
///   nd               optional, default "fixed_order"
///   seed             optional, default 1
///   draws            optional: uniforms replayed instead of a seeded stream
///   power            optional, as in scenario files
///   dspace           optional: {name: number}
struct StateFile {
  std::vector<ServerSnapshot> servers;
  DesignParams design_params;
  NdResolution nd = NdResolution::FixedOrder;
  std::uint64_t seed = 1;
  std::optional<std::vector<double>> draws;
};

/// Snapshot design_params pointers refer to the returned object's own map;
/// call `rebind()` after copying or moving.
StateFile parse_state(const nlohmann::json& doc);
StateFile load_state(const std::filesystem::path& path);
void rebind(StateFile& state);

}  // namespace greenlb
