#include <gtest/gtest.h>

#include <sstream>

#include "greenlb/config.hpp"
#include "greenlb/design_space.hpp"
#include "greenlb/error.hpp"
#include "greenlb/results_io.hpp"

namespace greenlb {
namespace {

using nlohmann::json;

json minimal() {
  return json::parse(R"j({
    "schema_version": 1,
    "scenario": {"seed": 3, "stop": {"max_requests": 100}},
    "power": {"timeout": 10},
    "policy": {"text": "-queueSize - dspace(\"q\") * (1 - stateOn)", "nd": "random",
               "dspace": {"q": 5}}
  })j");
}

std::string config_error(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Scenario, Minimal) {
  const auto s = parse_scenario(minimal());
  EXPECT_EQ(s.sim.seed, 3u);
  EXPECT_TRUE(s.timeout_given);
  EXPECT_EQ(std::get<StopAfterRequests>(s.sim.stop).count, 100u);
  EXPECT_EQ(s.sim.design_params.at("q"), 5.0);
  EXPECT_EQ(s.sim.nd, NdResolution::RandomFraction);
  EXPECT_FALSE(s.study);
}

TEST(Scenario, InfiniteTimeoutAndStudy) {
  auto doc = minimal();
  doc["power"]["timeout"] = "inf";
  doc["study"] = json::parse(R"({"q": [1, 5], "TO": [1, "inf"], "nd": ["fixed_order"], "replications": 2})");
  const auto s = parse_scenario(doc);
  EXPECT_EQ(s.sim.power.timeout, kNever);
  ASSERT_TRUE(s.study);
  EXPECT_EQ(s.study->q, (std::vector<int>{1, 5}));
  EXPECT_EQ(s.study->timeout.back(), kNever);
  EXPECT_EQ(s.study->replications, 2u);
}

TEST(Scenario, ErrorsNameTheKey) {
  auto doc = minimal();
  doc["scenario"]["arival_rate"] = 1.0;
  EXPECT_NE(config_error(doc).find("scenario.arival_rate"), std::string::npos);

  doc = minimal();
  doc["scenario"].erase("stop");
  EXPECT_NE(config_error(doc).find("scenario.stop"), std::string::npos);

  doc = minimal();
  doc["scenario"]["stop"]["max_virtual_time"] = 10;
  EXPECT_NE(config_error(doc).find("scenario.stop"), std::string::npos);

  doc = minimal();
  doc["schema_version"] = 2;
  EXPECT_NE(config_error(doc).find("schema_version"), std::string::npos);

  doc = minimal();
  doc["policy"]["nd"] = "fixed";
  EXPECT_NE(config_error(doc).find("policy.nd"), std::string::npos);

  doc = minimal();
  doc["power"].erase("timeout");
  EXPECT_FALSE(parse_scenario(doc).timeout_given);
}

TEST(Scenario, PolicySyntaxErrorsPropagate) {
  auto doc = minimal();
  doc["policy"]["text"] = "-queueSize +";
  EXPECT_THROW(parse_scenario(doc), ParseError);
}

TEST(StateFile, Parse) {
  const auto st = parse_state(json::parse(R"({
    "schema_version": 1,
    "servers": [{"queue_size": 0, "state": "sleep"}, {"queue_size": 2, "state": "on"}],
    "draws": [0.1, 0.2],
    "dspace": {"q": 4}
  })"));
  ASSERT_EQ(st.servers.size(), 2u);
  EXPECT_EQ(st.servers[1].queue_size, 2);
  EXPECT_EQ(st.servers[1].power_state, PowerState::On);
  EXPECT_EQ(st.servers[1].num_servers, 2);
  EXPECT_EQ(st.nd, NdResolution::FixedOrder);
  EXPECT_EQ(st.servers[0].design_params, &st.design_params);
  EXPECT_EQ(st.draws->size(), 2u);
  EXPECT_THROW(parse_state(json::parse(R"({"schema_version": 1, "servers": [{"queue_size": -1, "state": "on"}]})")),
               ConfigError);
}

TEST(Csv, QuotingRoundTrip) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::istringstream in("x,y\n\"a,b\",\"line\nbreak\"\n\"q\"\"\",2\n");
  const auto t = read_csv(in);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "a,b");
  EXPECT_EQ(t.rows[0][1], "line\nbreak");
  EXPECT_EQ(t.rows[1][0], "q\"");
  EXPECT_EQ(*t.column("y"), 1u);
  EXPECT_THROW(t.require("z"), DataError);
  std::istringstream ragged("x,y\n1\n");
  EXPECT_THROW(read_csv(ragged), DataError);
}

TEST(Csv, NumbersRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(7.5), "7.5");
  EXPECT_EQ(format_number(kNever), "inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ResultsCsv, SweepRowsReadBack) {
  SimConfig base;
  base.policy = policy::parse_policy("-queueSize - dspace(\"q\") * (1 - stateOn)");
  base.stop = StopAtTime{1500.0};
  base.warmup = 100.0;
  const auto rows = run_sweep({{1, 10}, {2.0}, {NdResolution::FixedOrder}, 2}, base, 1);
  std::stringstream csv;
  write_results_csv(csv, rows, 4);
  const auto t = read_csv(csv);
  EXPECT_EQ(t.header, results_header(4));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][t.require("status")], "ok");
  EXPECT_EQ(t.rows[0][t.require("nd")], "fixed_order");
  EXPECT_EQ(std::stod(t.rows[3][t.require("AL")]), rows[3].result->avg_latency);

  const auto agg = aggregate_by_design(t);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].replications, 2u);
  EXPECT_NEAR(agg[0].avg_latency, (rows[0].result->avg_latency + rows[1].result->avg_latency) / 2, 1e-12);

  std::ostringstream plot;
  write_plot_data(plot, t, GroupBy::Q);
  std::istringstream plot_in(plot.str());
  const auto p = read_csv(plot_in);
  EXPECT_EQ(p.header, (std::vector<std::string>{"group", "q", "TO", "nd", "AP_total", "AL", "replications"}));
  ASSERT_EQ(p.rows.size(), 2u);
  EXPECT_EQ(p.rows[1][0], "10");
}

TEST(ResultsCsv, EmptyInputGivesHeaderOnly) {
  std::istringstream in("q,TO,nd,status,AL,AP_total\n");
  std::ostringstream out;
  write_plot_data(out, read_csv(in), GroupBy::Timeout);
  EXPECT_EQ(out.str(), "group,q,TO,nd,AP_total,AL,replications\n");
}

}  // namespace
}  // namespace greenlb
