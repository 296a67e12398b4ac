#include "greenlb/results_io.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "greenlb/design_space.hpp"
#include "greenlb/engine.hpp"
#include "greenlb/error.hpp"

namespace greenlb {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(cells[i]);
  }
  out << '\n';
}

std::vector<std::string> result_cells(const std::optional<RunResult>& r, int num_servers) {
  std::vector<std::string> cells;
  const auto n = static_cast<std::size_t>(num_servers);
  if (!r) {
    cells.assign(7 + 5 * n, "");
    return cells;
  }
  cells.push_back(format_number(r->avg_latency));
  cells.push_back(opt(r->latency_ci_halfwidth));
  cells.push_back(format_number(r->avg_power_per_server));
  cells.push_back(format_number(r->total_power));
  cells.push_back(opt(r->power_ci_halfwidth));
  cells.push_back(std::to_string(r->requests_completed));
  cells.push_back(format_number(r->horizon));
  for (std::size_t s = 0; s < n; ++s) {
    for (auto st : kAllPowerStates) cells.push_back(format_number(r->state_fraction.at(s)[index_of(st)]));
  }
  for (std::size_t s = 0; s < n; ++s) cells.push_back(std::to_string(r->assignments.at(s)));
  return cells;
}

double to_double(const std::string& cell, std::string_view column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("column '" + std::string(column) + "' has non-numeric value '" + cell + "'");
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> results_header(int num_servers) {
  std::vector<std::string> h = {"q",         "TO",    "nd",     "replication",   "seed",
                                "status",    "AL",    "AL_ci",  "AP_per_server", "AP_total",
                                "AP_ci",     "requests_completed", "horizon"};
  for (int s = 0; s < num_servers; ++s) {
    for (auto st : kAllPowerStates) h.push_back(fmt::format("frac_{}_s{}", to_string(st), s));
  }
  for (int s = 0; s < num_servers; ++s) h.push_back(fmt::format("assigned_s{}", s));
  h.push_back("error");
  return h;
}

void write_results_csv(std::ostream& out, std::span<const SweepRow> rows, int num_servers) {
  write_row(out, results_header(num_servers));
  for (const auto& row : rows) {
    std::vector<std::string> cells = {std::to_string(row.q), format_number(row.timeout),
                                      std::string(to_string(row.nd)), std::to_string(row.replication),
                                      std::to_string(row.seed), row.result ? "ok" : "error"};
    auto rest = result_cells(row.result, num_servers);
    cells.insert(cells.end(), rest.begin(), rest.end());
    cells.push_back(row.error);
    write_row(out, cells);
  }
}

void write_run_csv(std::ostream& out, const RunResult& result, const SimConfig& config) {
  write_row(out, results_header(config.num_servers));
  const auto q = config.design_params.find("q");
  std::vector<std::string> cells = {q == config.design_params.end() ? "" : format_number(q->second),
                                    format_number(config.power.timeout),
                                    std::string(to_string(config.nd)), "0",
                                    std::to_string(config.seed), "ok"};
  auto rest = result_cells(result, config.num_servers);
  cells.insert(cells.end(), rest.begin(), rest.end());
  cells.emplace_back();
  write_row(out, cells);
}

nlohmann::json to_json(const RunResult& r, const SimConfig& config) {
  using nlohmann::json;
  auto optional_number = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json design = json::object();
  for (const auto& [name, value] : config.design_params) design[name] = value;
  json fractions = json::array();
  for (const auto& f : r.state_fraction) {
    json per = json::object();
    for (auto st : kAllPowerStates) per[std::string(to_string(st))] = f[index_of(st)];
    fractions.push_back(per);
  }
  return json{
      {"design", design},
      {"timeout", format_number(config.power.timeout)},
      {"nd", std::string(to_string(config.nd))},
      {"seed", config.seed},
      {"avg_latency_s", r.avg_latency},
      {"latency_ci_halfwidth", optional_number(r.latency_ci_halfwidth)},
      {"avg_power_per_server_W", r.avg_power_per_server},
      {"total_power_W", r.total_power},
      {"power_ci_halfwidth", optional_number(r.power_ci_halfwidth)},
      {"state_fraction", fractions},
      {"assignments", r.assignments},
      {"requests_arrived", r.requests_arrived},
      {"requests_completed", r.requests_completed},
      {"latency_samples", r.latency_samples},
      {"warmup_s", r.warmup},
      {"virtual_time_s", r.horizon},
      {"estimate", "finite-window approximation of long-run averages; CIs are 95% batch means"},
  };
}

std::optional<std::size_t> ResultsTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ResultsTable::require(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw DataError("missing column '" + std::string(name) + "'");
}

ResultsTable read_csv(std::istream& in) {
  ResultsTable t;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, any = false;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (t.header.empty()) {
      t.header = std::move(record);
    } else if (!(record.size() == 1 && record[0].empty())) {
      if (record.size() != t.header.size()) {
        throw DataError("row " + std::to_string(t.rows.size() + 1) + " has " +
                        std::to_string(record.size()) + " fields, header has " +
                        std::to_string(t.header.size()));
      }
      t.rows.push_back(std::move(record));
    }
    record.clear();
    any = false;
  };
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  if (any) end_record();
  if (t.header.empty()) throw DataError("empty CSV input");
  return t;
}

ResultsTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in);
}

std::vector<DesignAggregate> aggregate_by_design(const ResultsTable& table) {
  const auto cq = table.require("q");
  const auto cto = table.require("TO");
  const auto cnd = table.require("nd");
  const auto cal = table.require("AL");
  const auto cap = table.require("AP_total");
  const auto cstatus = table.column("status");

  std::vector<DesignAggregate> out;
  std::map<DesignKey, std::size_t> index;
  for (const auto& row : table.rows) {
    if (cstatus && row[*cstatus] != "ok") continue;
    DesignKey key{row[cq], row[cto], row[cnd]};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) out.push_back(DesignAggregate{std::move(key), 0.0, 0.0, 0});
    auto& agg = out[it->second];
    agg.avg_latency += to_double(row[cal], "AL");
    agg.total_power += to_double(row[cap], "AP_total");
    ++agg.replications;
  }
  for (auto& agg : out) {
    agg.avg_latency /= static_cast<double>(agg.replications);
    agg.total_power /= static_cast<double>(agg.replications);
  }
  return out;
}

void write_plot_data(std::ostream& out, const ResultsTable& table, GroupBy group_by) {
  const auto designs = aggregate_by_design(table);
  out << "group,q,TO,nd,AP_total,AL,replications\n";
  for (const auto& d : designs) {
    const auto& label = group_by == GroupBy::Q ? d.key.q : d.key.timeout;
    out << csv_escape(label) << ',' << csv_escape(d.key.q) << ',' << csv_escape(d.key.timeout) << ','
        << csv_escape(d.key.nd) << ',' << format_number(d.total_power) << ','
        << format_number(d.avg_latency) << ',' << d.replications << '\n';
  }
}

}  // namespace greenlb
