#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "detrm/contracts/query.hpp"
#include "detrm/scenario/bench.hpp"
#include "detrm/scenario/runner.hpp"

using namespace detrm;
using namespace detrm::scenario;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = DETRM_SCENARIO_DIR;

std::string csv_of(const TimeSeries& s) {
  std::ostringstream out;
  write_csv(out, s);
  return out.str();
}

json minimal() {
  return json::parse(R"({
    "name": "mini", "seed": 4, "epochs": 3,
    "authorities": [{"id": "agency"}],
    "participants": [{"id": "farm", "roles": ["producer"], "locations": ["barn"], "approved_by": "agency"}],
    "commodities": [{"type": "milk", "t_min": 2, "t_max": 8, "authority": "agency", "participant": "farm"}],
    "assets": [{"batch_id": "m1", "owner": "farm", "commodity": "milk", "location": "barn"},
               {"batch_id": "m2", "owner": "farm", "commodity": "milk", "location": "barn"}],
    "environment": {"base_std": 0, "confidence": [1, 1], "locations": {"barn": [{"from": 0, "celsius": 4}]}},
    "sensors": [{"location": "barn", "count": 3, "key_prefix": "barn-"}],
    "track": [{"subject": "m1", "metric": "trust"}, {"subject": "m2", "metric": "trust"}]
  })");
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

bool strictly_ordered(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i - 1] < xs[i])) return false;
  return true;
}

}  // namespace

TEST(Config, ParsesMinimal) {
  const auto c = parse_config(minimal());
  EXPECT_EQ(c.name, "mini");
  EXPECT_EQ(c.epochs, 3u);
  ASSERT_EQ(c.assets.size(), 2u);
  EXPECT_EQ(c.sensors[0].count, 3u);
  EXPECT_EQ(c.track[1].metric, Metric::trust);
  EXPECT_EQ(c.params.gamma, 0.85);
}

TEST(Config, ErrorsNameTheFieldPath) {
  auto doc = minimal();
  doc["assets"][1]["owner"] = "nobody";
  EXPECT_NE(config_error(doc).find("assets[1].owner"), std::string::npos);

  doc = minimal();
  doc["participants"][0].erase("approved_by");
  EXPECT_NE(config_error(doc).find("participants[0].approved_by"), std::string::npos);

  doc = minimal();
  doc["participants"][0]["roles"] = {"farmer"};
  EXPECT_NE(config_error(doc).find("participants[0].roles[0]"), std::string::npos);

  doc = minimal();
  doc["commodities"][0]["t_max"] = 1;
  EXPECT_NE(config_error(doc).find("commodities[0].t_max"), std::string::npos);

  doc = minimal();
  doc["sensors"][0]["count"] = 2;
  EXPECT_NE(config_error(doc).find("sensors[0].count"), std::string::npos);

  doc = minimal();
  doc["epochs"] = 0;
  EXPECT_NE(config_error(doc).find("epochs"), std::string::npos);

  doc = minimal();
  doc["track"][0]["subject"] = "ghost";
  EXPECT_NE(config_error(doc).find("track[0].subject"), std::string::npos);

  doc = minimal();
  doc["events"] = json::array({{{"type", "inspect"}, {"epoch", 9}, {"authority", "agency"}, {"subject", "farm"}}});
  EXPECT_NE(config_error(doc).find("events[0].epoch"), std::string::npos);

  doc = minimal();
  doc["events"] = json::array({{{"type", "teleport"}, {"epoch", 1}}});
  EXPECT_NE(config_error(doc).find("events[0].type"), std::string::npos);

  doc = minimal();
  doc["params"] = {{"weights", {{"trust", 0.5}, {"participant", 0.5}, {"endorsement", 0.5}}}};
  EXPECT_NE(config_error(doc).find("params"), std::string::npos);

  doc = minimal();
  doc["sensors"][0]["faults"] = json::array({{{"index", 7}, {"kind", "stuck_at"}, {"start_epoch", 1}}});
  EXPECT_NE(config_error(doc).find("sensors[0].faults[0].index"), std::string::npos);

  doc = minimal();
  doc["environment"]["locations"]["barn"][0]["from"] = 5;
  EXPECT_NE(config_error(doc).find("environment.locations.barn"), std::string::npos);

  doc = minimal();
  doc["seed"] = "four";
  EXPECT_NE(config_error(doc).find("seed"), std::string::npos);
}

TEST(Config, LoadFailures) {
  try {
    load_config("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
  const auto path = std::filesystem::temp_directory_path() / "detrm_bad_config.json";
  std::ofstream(path) << "{ not json";
  try {
    load_config(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigError);
  }
  std::filesystem::remove(path);
}

TEST(Config, RepeatSchedule) {
  auto doc = minimal();
  doc["epochs"] = 10;
  doc["events"] = json::array({{{"type", "inspect"},
                                {"repeat", {{"every", 3}, {"from", 2}, {"to", 9}}},
                                {"authority", "agency"},
                                {"subject", "farm"}}});
  const auto c = parse_config(doc);
  EXPECT_EQ(c.events[0].epochs, (std::vector<std::uint64_t>{2, 5, 8}));
}

TEST(Config, Expand) {
  EXPECT_EQ(expand("lot-{epoch}-{epoch}", 12), "lot-12-12");
  EXPECT_EQ(expand("plain", 3), "plain");
}

TEST(Config, ShippedScenariosParse) {
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() == ".json") {
      EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    }
  }
}

TEST(Csv, RowsAndStableBytes) {
  TimeSeries s;
  for (std::uint64_t e = 1; e <= 3; ++e) {
    s.rows.push_back({e, "a", "trust", 0.1 * static_cast<double>(e)});
    s.rows.push_back({e, "b", "alerts", static_cast<double>(e)});
  }
  const auto text = csv_of(s);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "epoch,subject,metric,value");
  EXPECT_EQ(lines[1], "1,a,trust,0.1");
  EXPECT_EQ(lines[2], "1,b,alerts,1");

  const auto dir = std::filesystem::temp_directory_path() / "detrm_csv_test";
  std::filesystem::create_directories(dir);
  export_csv(s, dir / "a.csv");
  export_csv(s, dir / "b.csv");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.csv"), text);
  std::filesystem::remove_all(dir);

  try {
    export_csv(s, "/nonexistent/dir/out.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
}

TEST(Csv, ValuesRoundTrip) {
  TimeSeries s;
  s.rows.push_back({0, "x", "trust", 0.1 + 0.2});
  s.rows.push_back({1, "x", "trust", 1.0 / 3.0});
  const auto text = csv_of(s);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  for (const auto& row : s.rows) {
    std::getline(in, line);
    EXPECT_EQ(std::stod(line.substr(line.rfind(',') + 1)), row.value);
  }
}

TEST(TimeSeries, CurveAndAt) {
  TimeSeries s;
  s.rows = {{0, "a", "trust", 0.0}, {0, "b", "trust", 5.0}, {1, "a", "trust", 0.5}, {1, "a", "alerts", 2.0}};
  EXPECT_EQ(s.curve("a", "trust"), (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(s.at(1, "a", "alerts"), 2.0);
  EXPECT_FALSE(s.at(2, "a", "trust"));
}

TEST(Run, MinimalScenario) {
  const auto r = run_scenario(parse_config(minimal()));
  EXPECT_EQ(r.ledger->height(), 4u);
  EXPECT_TRUE(r.rejections.empty());
  EXPECT_EQ(r.series.rows.size(), 2u * 4u);
  EXPECT_NEAR(*r.series.at(3, "m1", "trust"), 1.0 - std::pow(0.85, 3), 1e-12);
  EXPECT_EQ(r.series.at(3, "m1", "trust"), r.series.at(3, "m2", "trust"));
  EXPECT_TRUE(r.ledger->validate_chain());

  const auto summary = summarize(r);
  EXPECT_EQ(summary["blocks"], 4);
  EXPECT_TRUE(summary["rejected_transactions"].empty());
  EXPECT_EQ(summary["state_root"], crypto::to_hex(r.ledger->state_root()));
}

TEST(Run, EmptyScenarioIsGenesisOnly) {
  const auto r = run_scenario(load_config(kScenarios / "empty.json"));
  EXPECT_EQ(r.ledger->height(), 1u);
  EXPECT_TRUE(r.series.rows.empty());
  EXPECT_EQ(csv_of(r.series), "epoch,subject,metric,value\n");
  EXPECT_TRUE(r.ledger->validate_chain());
}

TEST(Run, DeterministicForSeed) {
  const auto config = load_config(kScenarios / "fault_sensors.json");
  const auto a = run_scenario(config);
  const auto b = run_scenario(config);
  EXPECT_EQ(csv_of(a.series), csv_of(b.series));
  EXPECT_EQ(a.ledger->state_root(), b.ledger->state_root());
  EXPECT_EQ(a.ledger->blocks().back().block_hash, b.ledger->blocks().back().block_hash);

  auto reseeded = config;
  reseeded.seed += 1;
  EXPECT_NE(run_scenario(reseeded).ledger->state_root(), a.ledger->state_root());
}

TEST(Run, RejectedActionsAreRecorded) {
  auto doc = minimal();
  doc["events"] = json::array({{{"type", "inspect"}, {"epoch", 2}, {"authority", "farm"}, {"subject", "farm"}}});
  const auto r = run_scenario(parse_config(doc));
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].epoch, 2u);
  EXPECT_EQ(r.rejections[0].cause, Errc::NotAnAuthority);
}

TEST(Fixture, GammaSweep) {
  const auto r = run_scenario(load_config(kScenarios / "gamma_sweep.json"));
  const std::vector<std::string> lots{"lot-g75", "lot-g80", "lot-g85", "lot-g90"};
  const std::vector<double> gammas{0.75, 0.80, 0.85, 0.90};
  for (std::size_t k = 0; k < lots.size(); ++k) {
    const auto c = r.series.curve(lots[k], "trust");
    ASSERT_EQ(c.size(), 101u);
    for (std::size_t o = 1; o < c.size(); ++o) {
      EXPECT_GE(c[o], c[o - 1]);
      EXPECT_NEAR(c[o], 1.0 - std::pow(gammas[k], static_cast<double>(o)), 1e-9);
    }
    EXPECT_GE(c[60], 0.99);
  }
  const auto fast = r.series.curve("lot-g75", "trust");
  const auto slow = r.series.curve("lot-g90", "trust");
  for (std::size_t o = 0; o < fast.size(); ++o) EXPECT_GE(fast[o], slow[o]);
}

TEST(Fixture, FaultSensors) {
  const auto r = run_scenario(load_config(kScenarios / "fault_sensors.json"));
  const std::vector<std::string> lots{"milk-1", "milk-2", "milk-3", "milk-4"};
  for (std::uint64_t e = 0; e <= 30; ++e) {
    const double ref = *r.series.at(e, lots[0], "trust");
    for (const auto& l : lots) EXPECT_LT(std::abs(*r.series.at(e, l, "trust") - ref), 1e-12) << l << ' ' << e;
  }
  std::vector<double> at60;
  for (auto it = lots.rbegin(); it != lots.rend(); ++it) at60.push_back(*r.series.at(60, *it, "trust"));
  EXPECT_TRUE(strictly_ordered(at60));

  // Every out-of-range epoch raised an alert for the affected lots.
  EXPECT_EQ(*r.series.at(60, "milk-1", "alerts"), 0.0);
  for (const auto& l : {"milk-2", "milk-3", "milk-4"}) EXPECT_EQ(*r.series.at(60, l, "alerts"), 30.0) << l;
}

TEST(Fixture, ReputationShape) {
  const auto r = run_scenario(load_config(kScenarios / "reputation.json"));
  const auto rep = r.series.curve("dairy-farm", "reputation");
  ASSERT_EQ(rep.size(), 61u);
  for (std::size_t e = 1; e <= 30; ++e) EXPECT_GE(rep[e], rep[e - 1]) << e;
  std::size_t falling = 0;
  for (std::size_t e = 31; e < rep.size() && rep[e] < rep[e - 1]; ++e) ++falling;
  EXPECT_GE(falling, 10u);
  EXPECT_TRUE(r.rejections.empty());
}

TEST(Fixture, YogurtProvenance) {
  const auto dir = std::filesystem::temp_directory_path() / "detrm_yogurt_offchain";
  std::filesystem::remove_all(dir);
  const auto r = run_scenario(load_config(kScenarios / "yogurt.json"), dir);
  EXPECT_TRUE(r.rejections.empty());
  const auto dag = contracts::query_provenance(r.state(), "yogurt-1");
  EXPECT_EQ(dag.nodes.size(), 3u);
  EXPECT_EQ(dag.edges.size(), 2u);
  // Sources stop being monitored once consumed, so their final trust is
  // their trust at production time.
  const double mean = (r.state().asset("milk-7")->trust.trust + r.state().asset("strawberry-3")->trust.trust) / 2.0;
  EXPECT_EQ(r.series.at(6, "yogurt-1", "trust"), mean);
  EXPECT_FALSE(r.series.at(5, "yogurt-1", "trust"));
  EXPECT_EQ(r.state().asset("yogurt-1")->properties.at("process.culture"), "thermophilic");

  ASSERT_EQ(r.state().endorsements().size(), 1u);
  const auto report = r.store->get(r.state().endorsements()[0].report_hash);
  ASSERT_TRUE(report);
  EXPECT_TRUE(std::filesystem::exists(dir / crypto::to_hex(r.state().endorsements()[0].report_hash)));
  std::filesystem::remove_all(dir);
}

TEST(Bench, MissingFixture) {
  BenchFixture empty;
  try {
    bench_rate(empty, ledger::TxKind::trade, 10, std::chrono::milliseconds(100), std::chrono::milliseconds(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FixtureMissing);
  }
}

TEST(Bench, ZeroRateRow) {
  auto f = make_bench_fixture(4, 1);
  const auto row = bench_rate(f, ledger::TxKind::trade, 0, std::chrono::milliseconds(100), std::chrono::milliseconds(10));
  EXPECT_EQ(row.rate, 0u);
  EXPECT_EQ(row.committed, 0u);
  EXPECT_EQ(row.throughput, 0.0);
}

TEST(Bench, ShortRunCommitsEverything) {
  for (auto kind : {ledger::TxKind::trade, ledger::TxKind::produce}) {
    auto f = make_bench_fixture(4, 2);
    const auto row = bench_rate(f, kind, 200, std::chrono::milliseconds(500), std::chrono::milliseconds(50));
    EXPECT_GT(row.submitted, 50u);
    EXPECT_EQ(row.committed, row.submitted);
    EXPECT_EQ(row.rejected, 0u);
    EXPECT_GT(row.blocks, 1u);
    EXPECT_LE(row.p50_ms, row.p95_ms);
    EXPECT_LE(row.p95_ms, row.p99_ms);
    EXPECT_TRUE(f.ledger->validate_chain());
  }
}

TEST(Bench, JsonReport) {
  BenchRow row;
  row.rate = 100;
  row.committed = 10;
  const auto j = to_json({row});
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["rate"], 100);
  EXPECT_EQ(j[0]["committed"], 10);
}
