// detrm: scenario runner, load benchmark, chain export and query server.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "detrm/api/service.hpp"
#include "detrm/contracts/supply_chain.hpp"
#include "detrm/ledger/chain_file.hpp"
#include "detrm/scenario/bench.hpp"
#include "detrm/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace detrm;

namespace {

api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << std::setw(2) << j << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  auto config = scenario::load_config(config_path);
  if (seed) config.seed = *seed;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + out_dir);

  const auto result = scenario::run_scenario(config, fs::path(out_dir) / "offchain");
  scenario::export_csv(result.series, fs::path(out_dir) / "timeseries.csv");
  ledger::save_chain(fs::path(out_dir) / "chain.log", result.ledger->blocks());
  const auto summary = scenario::summarize(result);
  write_json(fs::path(out_dir) / "summary.json", summary);

  std::cout << config.name << ": " << result.ledger->height() << " blocks, " << result.accepted
            << " accepted, " << result.rejections.size() << " rejected, state root "
            << summary["state_root"].get<std::string>() << '\n';
  return 0;
}

int cmd_bench(const std::string& kind, const std::vector<unsigned>& rates, double duration_s, int timeout_ms,
              std::size_t chains, const std::string& json_out) {
  scenario::BenchOptions opt;
  opt.kind = kind == "produce" ? ledger::TxKind::produce : ledger::TxKind::trade;
  opt.rates = rates;
  opt.duration = std::chrono::milliseconds(static_cast<long>(duration_s * 1000.0));
  opt.batch_timeout = std::chrono::milliseconds(timeout_ms);
  opt.chains = chains;
  const auto rows = scenario::run_bench(opt);

  std::cout << std::left << std::setw(8) << "rate" << std::setw(11) << "submitted" << std::setw(11) << "committed"
            << std::setw(14) << "tps" << std::setw(10) << "p50_ms" << std::setw(10) << "p95_ms" << "p99_ms\n";
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    std::cout << std::setw(8) << r.rate << std::setw(11) << r.submitted << std::setw(11) << r.committed
              << std::setw(14) << r.throughput << std::setw(10) << r.p50_ms << std::setw(10) << r.p95_ms << r.p99_ms
              << '\n';
  }
  if (!json_out.empty()) write_json(json_out, scenario::to_json(rows));
  return 0;
}

int cmd_export(const std::string& chain_path, bool as_json) {
  const auto blocks = ledger::load_chain(chain_path);
  const bool valid = ledger::validate_chain(blocks, contracts::supply_chain_factory());
  if (as_json) {
    auto out = nlohmann::json::array();
    for (const auto& b : blocks) {
      auto txs = nlohmann::json::array();
      for (const auto& tx : b.transactions) {
        auto signers = nlohmann::json::array();
        for (const auto& s : tx.signatures) signers.push_back(s.signer);
        txs.push_back({{"tx_id", tx.tx_id},
                       {"kind", std::string(ledger::to_string(tx.kind()))},
                       {"timestamp", tx.timestamp},
                       {"signers", std::move(signers)}});
      }
      out.push_back({{"height", b.height},
                     {"prev_hash", crypto::to_hex(b.prev_hash)},
                     {"state_root", crypto::to_hex(b.state_root)},
                     {"block_hash", crypto::to_hex(b.block_hash)},
                     {"transactions", std::move(txs)}});
    }
    std::cout << std::setw(2) << nlohmann::json{{"valid", valid}, {"blocks", std::move(out)}} << '\n';
  } else {
    for (const auto& b : blocks) {
      std::cout << "block " << b.height << " hash " << crypto::to_hex(b.block_hash) << " root "
                << crypto::to_hex(b.state_root) << " txs " << b.transactions.size() << '\n';
      for (const auto& tx : b.transactions) {
        std::cout << "  " << std::setw(8) << std::left << ledger::to_string(tx.kind()) << ' ' << tx.tx_id << " @"
                  << tx.timestamp;
        for (const auto& s : tx.signatures) std::cout << ' ' << s.signer;
        std::cout << '\n';
      }
    }
    std::cout << (valid ? "chain valid" : "chain INVALID") << " (" << blocks.size() << " blocks)\n";
  }
  return valid ? 0 : 1;
}

int cmd_serve(const std::string& chain_path, const std::string& config_path, const std::string& bind) {
  std::shared_ptr<const contracts::WorldState> snapshot;
  if (!chain_path.empty()) {
    auto ledger = ledger::Ledger::from_blocks(ledger::load_chain(chain_path), contracts::supply_chain_factory());
    snapshot = contracts::supply_chain(*ledger).snapshot();
  } else {
    const auto result = scenario::run_scenario(scenario::load_config(config_path));
    snapshot = contracts::supply_chain(*result.ledger).snapshot();
  }
  const auto [host, port] = api::parse_bind(bind);
  api::QueryService service(snapshot);
  api::HttpServer server(service);
  const int bound = server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << snapshot->participants().size() << " participants, " << snapshot->assets().size()
            << " assets on " << host << ':' << bound << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust and reputation scoring over a simulated supply-chain ledger"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write timeseries.csv, chain.log, summary.json");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* bench = app.add_subcommand("bench", "Throughput and latency at fixed offered loads");
  std::string kind = "trade";
  std::vector<unsigned> rates{100, 500, 1000};
  double duration = 30.0;
  int timeout_ms = 200;
  std::size_t chains = 16;
  std::string bench_json;
  bench->add_option("--tx", kind, "Transaction kind")->check(CLI::IsMember({"trade", "produce"}));
  bench->add_option("--rates", rates, "Offered loads in tx/s")->delimiter(',');
  bench->add_option("--duration", duration, "Seconds per load level")->check(CLI::PositiveNumber);
  bench->add_option("--batch-timeout-ms", timeout_ms, "Ordering batch timeout")->check(CLI::Range(1, 60000));
  bench->add_option("--chains", chains, "Independent asset lineages")->check(CLI::Range(1, 100000));
  bench->add_option("--json", bench_json, "Also write the report as JSON");

  auto* exp = app.add_subcommand("export", "Validate a chain file and list its blocks");
  std::string chain_path;
  bool as_json = false;
  exp->add_option("--chain", chain_path, "Chain file written by run")->required()->check(CLI::ExistingFile);
  exp->add_flag("--json", as_json, "JSON listing");

  auto* serve = app.add_subcommand("serve", "Serve the query API over a chain or scenario");
  std::string serve_chain, serve_config, bind = "127.0.0.1:8080";
  auto* chain_opt = serve->add_option("--chain", serve_chain, "Chain file")->check(CLI::ExistingFile);
  auto* config_opt = serve->add_option("--config", serve_config, "Scenario JSON file")->check(CLI::ExistingFile);
  chain_opt->excludes(config_opt);
  serve->add_option("--bind", bind, "host:port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, seed);
    if (*bench) return cmd_bench(kind, rates, duration, timeout_ms, chains, bench_json);
    if (*exp) return cmd_export(chain_path, as_json);
    if (*serve) {
      if (serve_chain.empty() && serve_config.empty()) {
        std::cerr << "serve: one of --chain or --config is required\n";
        return 2;
      }
      return cmd_serve(serve_chain, serve_config, bind);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
