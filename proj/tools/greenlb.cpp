// greenlb: evaluate energy-aware load-balancing policies by simulation.
//
//   greenlb parse POLICY_FILE | --text EXPR
//   greenlb eval --policy FILE --state FILE
//   greenlb run --config FILE [--trace FILE] [--seed N] [--format json|csv]
//   greenlb sweep --config FILE --out results.csv [--jobs N] [--seed N]
//   greenlb compare A.csv B.csv [--json FILE]
//   greenlb plot-data RESULTS.csv --group-by q|TO [--out FILE]
//
// Exit status is 0 on success. Failures print a single line
// "error: <kind>: <message>" on stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "greenlb/config.hpp"
#include "greenlb/design_space.hpp"
#include "greenlb/engine.hpp"
#include "greenlb/error.hpp"
#include "greenlb/policy.hpp"
#include "greenlb/results_io.hpp"
#include "greenlb/validation.hpp"

namespace {

using namespace greenlb;

int exit_code(const Error& e) {
  const std::string_view k = e.kind();
  if (k == "config") return 2;
  if (k == "parse") return 3;
  if (k == "eval") return 4;
  if (k == "data") return 5;
  if (k == "insufficient-data") return 6;
  return 70;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("greenlb");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GREENLB_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

int cmd_parse(const std::string& file, const std::string& text) {
  const std::string source = text.empty() ? read_text_file(file) : text;
  const auto expr = policy::parse_policy(source);
  std::cout << "ast: " << policy::to_sexpr(expr) << '\n';
  std::cout << "expr: " << policy::to_string(expr) << '\n';
  return 0;
}

int cmd_eval(const std::string& policy_file, const std::string& state_file) {
  const auto expr = policy::parse_policy(read_text_file(policy_file));
  auto state = load_state(state_file);
  std::unique_ptr<UniformSource> rng;
  if (state.draws) {
    rng = std::make_unique<ScriptedUniforms>(*state.draws);
  } else {
    rng = std::make_unique<RandomStream>(RandomStream::derive(state.seed, {stream_label::kPolicy}));
  }
  const auto sel = policy::select_server(expr, state.servers, state.nd, *rng);
  std::cout << "server,value,resolved\n";
  for (std::size_t i = 0; i < sel.base.size(); ++i) {
    std::cout << i << ',' << format_number(sel.base[i]) << ',' << format_number(sel.resolved[i]) << '\n';
  }
  std::cout << "selected," << sel.server << '\n';
  return 0;
}

int cmd_run(const std::string& config_file, const std::string& trace_file,
            std::optional<std::uint64_t> seed, const std::string& format) {
  auto scenario = load_scenario(config_file);
  if (!scenario.timeout_given) throw ConfigError("missing required key 'power.timeout'");
  if (seed) scenario.sim.seed = *seed;

  std::ofstream trace_out;
  TraceSink sink;
  if (!trace_file.empty()) {
    trace_out = open_out(trace_file);
    trace_out << "time,server,event,power_state,queue_size\n";
    sink = [&trace_out](const TraceRecord& r) {
      trace_out << format_number(r.time) << ',' << r.server << ',' << to_string(r.event) << ','
                << to_string(r.state) << ',' << r.queue_size << '\n';
    };
  }
  spdlog::info("running {} servers, seed {}", scenario.sim.num_servers, scenario.sim.seed);
  const auto result = run(scenario.sim, sink);
  if (format == "csv") {
    write_run_csv(std::cout, result, scenario.sim);
  } else {
    std::cout << to_json(result, scenario.sim).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& out_file, std::size_t jobs,
              std::optional<std::uint64_t> seed) {
  auto scenario = load_scenario(config_file);
  if (seed) scenario.sim.seed = *seed;
  const auto space = scenario.study.value_or(DesignSpace::defaults());
  spdlog::info("sweeping {}x{}x{} designs, {} replications, {} jobs", space.q.size(),
               space.timeout.size(), space.nd.size(), space.replications, jobs);
  const auto rows = run_sweep(space, scenario.sim, jobs);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.result) {
      ++failed;
      spdlog::warn("design q={} TO={} nd={} rep {} failed: {}", r.q, format_number(r.timeout),
                   to_string(r.nd), r.replication, r.error);
    }
  }
  auto out = open_out(out_file);
  write_results_csv(out, rows, scenario.sim.num_servers);
  spdlog::info("{} rows written, {} failed", rows.size(), failed);
  return 0;
}

int cmd_compare(const std::string& a_file, const std::string& b_file, const std::string& json_file) {
  const auto report = compare(read_csv_file(a_file), read_csv_file(b_file));
  std::cout << fmt::format("{:>6} {:>6} {:>12} {:>12} {:>12} {:>10} {:>12} {:>12} {:>10}\n", "q", "TO",
                           "nd", "AL_a", "AL_b", "delta_AL", "AP_a", "AP_b", "delta_AP");
  for (const auto& d : report.designs) {
    std::cout << fmt::format("{:>6} {:>6} {:>12} {:>12.4f} {:>12.4f} {:>10.4f} {:>12.3f} {:>12.3f} {:>10.4f}\n",
                             d.key.q, d.key.timeout, d.key.nd, d.latency_a, d.latency_b,
                             d.delta_latency, d.power_a, d.power_b, d.delta_power);
  }
  std::cout << "\nshare of designs with delta below threshold\n";
  for (std::size_t t = 0; t < kDeltaThresholds.size(); ++t) {
    std::cout << fmt::format("  < {:<5} latency {:6.1f}%   power {:6.1f}%\n", kDeltaThresholds[t],
                             100.0 * report.latency_below[t], 100.0 * report.power_below[t]);
  }
  if (report.unmatched) std::cout << report.unmatched << " design(s) present in only one input\n";

  if (!json_file.empty()) {
    nlohmann::json j;
    j["designs"] = nlohmann::json::array();
    for (const auto& d : report.designs) {
      j["designs"].push_back({{"q", d.key.q},
                              {"TO", d.key.timeout},
                              {"nd", d.key.nd},
                              {"AL_a", d.latency_a},
                              {"AL_b", d.latency_b},
                              {"AP_total_a", d.power_a},
                              {"AP_total_b", d.power_b},
                              {"delta_latency", d.delta_latency},
                              {"delta_power", d.delta_power}});
    }
    for (std::size_t t = 0; t < kDeltaThresholds.size(); ++t) {
      j["below"].push_back({{"threshold", kDeltaThresholds[t]},
                            {"latency", report.latency_below[t]},
                            {"power", report.power_below[t]}});
    }
    j["unmatched"] = report.unmatched;
    open_out(json_file) << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_plot_data(const std::string& results_file, const std::string& group_by, const std::string& out_file) {
  const auto table = read_csv_file(results_file);
  const auto g = group_by == "q" ? GroupBy::Q : GroupBy::Timeout;
  if (out_file.empty()) {
    write_plot_data(std::cout, table, g);
  } else {
    auto out = open_out(out_file);
    write_plot_data(out, table, g);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Simulate and compare energy-aware load-balancing policies"};
  app.require_subcommand(1);

  std::string policy_file, policy_text;
  auto* parse = app.add_subcommand("parse", "Parse a policy and print its AST");
  parse->add_option("file", policy_file, "Policy file");
  parse->add_option("--text", policy_text, "Policy expression given inline");

  std::string state_file;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy against a state snapshot");
  eval->add_option("--policy", policy_file, "Policy file")->required();
  eval->add_option("--state", state_file, "State snapshot (JSON)")->required();

  std::string config_file, trace_file, format = "json", out_file;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  run_cmd->add_option("--config", config_file, "Scenario file (JSON)")->required();
  run_cmd->add_option("--trace", trace_file, "Write an event trace CSV");
  run_cmd->add_option("--seed", seed, "Override scenario.seed");
  run_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* sweep = app.add_subcommand("sweep", "Run every design of the study section");
  sweep->add_option("--config", config_file, "Scenario file (JSON)")->required();
  sweep->add_option("--out", out_file, "Results CSV")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Override the master seed");

  std::string a_file, b_file, json_file;
  auto* cmp = app.add_subcommand("compare", "Ratio distance between two results tables");
  cmp->add_option("a", a_file, "First results CSV")->required();
  cmp->add_option("b", b_file, "Second results CSV")->required();
  cmp->add_option("--json", json_file, "Also write the report as JSON");

  std::string results_file, group_by = "q";
  auto* plot = app.add_subcommand("plot-data", "AP/AL scatter data grouped by q or TO");
  plot->add_option("results", results_file, "Results CSV")->required();
  plot->add_option("--group-by", group_by, "Grouping")->check(CLI::IsMember({"q", "TO"}));
  plot->add_option("--out", out_file, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*parse) {
      if (policy_file.empty() == policy_text.empty()) {
        throw ConfigError("parse needs exactly one of FILE or --text");
      }
      return cmd_parse(policy_file, policy_text);
    }
    if (*eval) return cmd_eval(policy_file, state_file);
    if (*run_cmd) return cmd_run(config_file, trace_file, seed, format);
    if (*sweep) return cmd_sweep(config_file, out_file, jobs, seed);
    if (*cmp) return cmd_compare(a_file, b_file, json_file);
    if (*plot) return cmd_plot_data(results_file, group_by, out_file);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
