#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace greenlb {

struct RunResult;
struct SimConfig;
struct SweepRow;

/// Design coordinates as they appear in a results table. Kept textual so a
/// round trip through CSV never merges or splits designs.
struct DesignKey {
  std::string q;
  std::string timeout;
  std::string nd;

  friend auto operator<=>(const DesignKey&, const DesignKey&) = default;
};

/// Column order of results CSVs:
///   q, TO, nd, replication, seed, status, AL, AL_ci, AP_per_server, AP_total,
///   AP_ci, requests_completed, horizon,
///   frac_{on,sleep,suspend,wakeup}_s<i> for every server,
///   assigned_s<i> for every server, error
std::vector<std::string> results_header(int num_servers);

/// Shortest text that parses back to the same double; "inf" for infinity.
std::string format_number(double v);

void write_results_csv(std::ostream& out, std::span<const SweepRow> rows, int num_servers);

/// One-row table for a single run; design coordinates come from the config.
void write_run_csv(std::ostream& out, const RunResult& result, const SimConfig& config);

nlohmann::json to_json(const RunResult& result, const SimConfig& config);

/// A CSV file held as text cells.
struct ResultsTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws DataError naming the column when it is absent.
  std::size_t require(std::string_view name) const;
};

/// RFC 4180 subset: comma separated, double-quoted fields may contain commas,
/// quotes ("") and newlines. Throws DataError on ragged rows.
ResultsTable read_csv(std::istream& in);
ResultsTable read_csv_file(const std::string& path);

std::string csv_escape(std::string_view field);

struct DesignAggregate {
  DesignKey key;
  double avg_latency = 0.0;
  double total_power = 0.0;
  std::size_t replications = 0;
};

/// Means of AL and AP_total per design over rows whose status is "ok" (or all
/// rows when there is no status column), in first-appearance order.
std::vector<DesignAggregate> aggregate_by_design(const ResultsTable& table);

enum class GroupBy { Q, Timeout };

/// Scatter data for AP-vs-AL plots: one row per design, labelled by q or TO.
/// Header: group,q,TO,nd,AP_total,AL,replications
void write_plot_data(std::ostream& out, const ResultsTable& table, GroupBy group_by);

}  // namespace greenlb
