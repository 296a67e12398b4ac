#include "greenlb/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "greenlb/error.hpp"

namespace greenlb {

namespace {

using nlohmann::json;

std::string join(std::string_view prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

const json& require_object(const json& doc, std::string_view path) {
  if (!doc.is_object()) throw ConfigError("'" + std::string(path.empty() ? "<root>" : path) + "' must be an object");
  return doc;
}

void reject_unknown(const json& obj, std::string_view path, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("unknown key '" + join(path, key) + "'");
  }
}

const json& require_key(const json& obj, std::string_view path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key '" + join(path, key) + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
  return v.get<double>();
}

double number_or_inf(const json& v, const std::string& path) {
  if (v.is_string() && v.get<std::string>() == "inf") return kNever;
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number or \"inf\"");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError("'" + path + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("'" + path + "' must be a string");
  return v.get<std::string>();
}

NdResolution nd_value(const json& v, const std::string& path) {
  const auto s = string(v, path);
  if (auto nd = parse_nd_resolution(s)) return *nd;
  throw ConfigError("'" + path + "' must be \"random\" or \"fixed_order\", got \"" + s + "\"");
}

void check_schema(const json& doc) {
  const auto& v = require_key(doc, "", "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

void parse_power(const json& obj, PowerModel& p, bool& timeout_given) {
  require_object(obj, "power");
  reject_unknown(obj, "power", {"p_on", "p_sleep", "p_suspend", "p_wakeup", "t_suspend", "t_wakeup", "timeout"});
  auto field = [&obj](const char* key, double& out) {
    if (auto it = obj.find(key); it != obj.end()) out = number(*it, join("power", key));
  };
  field("p_on", p.p_on);
  field("p_sleep", p.p_sleep);
  field("p_suspend", p.p_suspend);
  field("p_wakeup", p.p_wakeup);
  field("t_suspend", p.t_suspend);
  field("t_wakeup", p.t_wakeup);
  if (auto it = obj.find("timeout"); it != obj.end()) {
    p.timeout = number_or_inf(*it, "power.timeout");
    timeout_given = true;
  }
  validate(p);
}

DesignParams parse_dspace(const json& obj, const std::string& path) {
  require_object(obj, path);
  DesignParams params;
  for (const auto& [key, value] : obj.items()) {
    if (key.empty()) throw ConfigError("'" + path + "' has an empty parameter name");
    params[key] = number(value, join(path, key));
  }
  return params;
}

void parse_scenario_section(const json& obj, SimConfig& sim) {
  require_object(obj, "scenario");
  reject_unknown(obj, "scenario", {"num_servers", "arrival_rate", "service_time", "warmup", "seed",
                                   "batches", "initial_state", "stop", "arrival_times"});
  sim.seed = unsigned_integer(require_key(obj, "scenario", "seed"), "scenario.seed");

  const auto& stop = require_key(obj, "scenario", "stop");
  require_object(stop, "scenario.stop");
  reject_unknown(stop, "scenario.stop", {"max_requests", "max_virtual_time"});
  const bool by_count = stop.contains("max_requests");
  const bool by_time = stop.contains("max_virtual_time");
  if (by_count == by_time) {
    throw ConfigError("scenario.stop needs exactly one of max_requests, max_virtual_time");
  }
  if (by_count) {
    sim.stop = StopAfterRequests{unsigned_integer(stop["max_requests"], "scenario.stop.max_requests")};
  } else {
    sim.stop = StopAtTime{number(stop["max_virtual_time"], "scenario.stop.max_virtual_time")};
  }

  if (auto it = obj.find("num_servers"); it != obj.end()) {
    const auto n = integer(*it, "scenario.num_servers");
    if (n < 1 || n > std::numeric_limits<int>::max()) throw ConfigError("scenario.num_servers must be at least 1");
    sim.num_servers = static_cast<int>(n);
  }
  if (auto it = obj.find("arrival_rate"); it != obj.end()) sim.arrival_rate = number(*it, "scenario.arrival_rate");
  if (auto it = obj.find("service_time"); it != obj.end()) sim.service_time = number(*it, "scenario.service_time");
  if (auto it = obj.find("warmup"); it != obj.end()) sim.warmup = number(*it, "scenario.warmup");
  if (auto it = obj.find("batches"); it != obj.end()) sim.batches = unsigned_integer(*it, "scenario.batches");
  if (auto it = obj.find("initial_state"); it != obj.end()) {
    const auto s = string(*it, "scenario.initial_state");
    const auto st = parse_power_state(s);
    if (!st) throw ConfigError("scenario.initial_state must be \"on\" or \"sleep\"");
    sim.initial_state = *st;
  }
  if (auto it = obj.find("arrival_times"); it != obj.end()) {
    if (!it->is_array()) throw ConfigError("'scenario.arrival_times' must be an array");
    std::vector<Seconds> times;
    for (const auto& v : *it) times.push_back(number(v, "scenario.arrival_times"));
    sim.arrival_times = std::move(times);
  }
}

DesignSpace parse_study(const json& obj) {
  require_object(obj, "study");
  reject_unknown(obj, "study", {"q", "TO", "nd", "replications"});
  DesignSpace space = DesignSpace::defaults();
  auto array = [&obj](const char* key) -> const json* {
    const auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_array()) throw ConfigError("'" + join("study", key) + "' must be an array");
    return &*it;
  };
  if (const auto* a = array("q")) {
    space.q.clear();
    for (const auto& v : *a) {
      const auto q = integer(v, "study.q");
      if (q < 0 || q > std::numeric_limits<int>::max()) throw ConfigError("study.q values must be non-negative");
      space.q.push_back(static_cast<int>(q));
    }
  }
  if (const auto* a = array("TO")) {
    space.timeout.clear();
    for (const auto& v : *a) space.timeout.push_back(number_or_inf(v, "study.TO"));
  }
  if (const auto* a = array("nd")) {
    space.nd.clear();
    for (const auto& v : *a) space.nd.push_back(nd_value(v, "study.nd"));
  }
  if (auto it = obj.find("replications"); it != obj.end()) {
    space.replications = unsigned_integer(*it, "study.replications");
  }
  return space;
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioFile parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "");
  reject_unknown(doc, "", {"schema_version", "scenario", "power", "policy", "study"});
  check_schema(doc);

  ScenarioFile out;
  parse_scenario_section(require_key(doc, "", "scenario"), out.sim);
  if (auto it = doc.find("power"); it != doc.end()) parse_power(*it, out.sim.power, out.timeout_given);

  const auto& pol = require_key(doc, "", "policy");
  require_object(pol, "policy");
  reject_unknown(pol, "policy", {"text", "file", "nd", "dspace"});
  const bool has_text = pol.contains("text");
  const bool has_file = pol.contains("file");
  if (!has_text && !has_file) throw ConfigError("missing required key 'policy.text' (or 'policy.file')");
  if (has_text && has_file) throw ConfigError("policy needs exactly one of text, file");
  if (has_text) {
    out.policy_text = string(pol["text"], "policy.text");
  } else {
    std::filesystem::path file = string(pol["file"], "policy.file");
    if (file.is_relative()) file = base_dir / file;
    out.policy_text = read_text_file(file);
  }
  out.sim.policy = policy::parse_policy(out.policy_text);
  out.sim.nd = nd_value(require_key(pol, "policy", "nd"), "policy.nd");
  if (auto it = pol.find("dspace"); it != pol.end()) out.sim.design_params = parse_dspace(*it, "policy.dspace");

  if (auto it = doc.find("study"); it != doc.end()) out.study = parse_study(*it);
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return parse_scenario(parse_json_file(path), path.parent_path());
}

StateFile parse_state(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"schema_version", "servers", "nd", "seed", "draws", "power", "dspace"});
  check_schema(doc);

  StateFile st;
  PowerModel power;
  bool timeout_given = false;
  if (auto it = doc.find("power"); it != doc.end()) parse_power(*it, power, timeout_given);
  if (auto it = doc.find("nd"); it != doc.end()) st.nd = nd_value(*it, "nd");
  if (auto it = doc.find("seed"); it != doc.end()) st.seed = unsigned_integer(*it, "seed");
  if (auto it = doc.find("dspace"); it != doc.end()) st.design_params = parse_dspace(*it, "dspace");
  if (auto it = doc.find("draws"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("'draws' must be an array");
    std::vector<double> draws;
    for (const auto& v : *it) {
      const double u = number(v, "draws");
      if (!(u >= 0.0 && u < 1.0)) throw ConfigError("'draws' values must lie in [0, 1)");
      draws.push_back(u);
    }
    st.draws = std::move(draws);
  }

  const auto& servers = require_key(doc, "", "servers");
  if (!servers.is_array() || servers.empty()) throw ConfigError("'servers' must be a non-empty array");
  const int n = static_cast<int>(servers.size());
  for (int i = 0; i < n; ++i) {
    const std::string path = "servers[" + std::to_string(i) + "]";
    const auto& s = servers[static_cast<std::size_t>(i)];
    require_object(s, path);
    reject_unknown(s, path, {"queue_size", "state"});
    ServerSnapshot snap;
    snap.id = i;
    snap.num_servers = n;
    const auto qs = integer(require_key(s, path, "queue_size"), path + ".queue_size");
    if (qs < 0) throw ConfigError(path + ".queue_size must be non-negative");
    snap.queue_size = qs;
    const auto state_text = string(require_key(s, path, "state"), path + ".state");
    const auto state = parse_power_state(state_text);
    if (!state) throw ConfigError(path + ".state must be one of on, sleep, suspend, wakeup");
    snap.power_state = *state;
    snap.power = power;
    st.servers.push_back(snap);
  }
  rebind(st);
  return st;
}

StateFile load_state(const std::filesystem::path& path) {
  auto st = parse_state(parse_json_file(path));
  rebind(st);
  return st;
}

void rebind(StateFile& state) {
  for (auto& s : state.servers) s.design_params = &state.design_params;
}

}  // namespace greenlb
