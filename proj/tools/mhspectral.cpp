// mhspectral: analyze, solve, graph and certify instance files from the command line.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "mhspectral/io.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_logger_mt("mhspectral");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::err);
  const char* env = std::getenv("MHSPECTRAL_LOG");
  if (!env) return;
  const std::string level(env);
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "trace") spdlog::set_level(spdlog::level::trace);
  else spdlog::warn("MHSPECTRAL_LOG={} not recognized; expected error, info or trace", level);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mhs::ParseError("", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Outcome {
  mhs::json report;
  int exit_code = 0;
  std::string summary;
};

Outcome run_one(const std::string& command, const mhs::json& doc, const std::string& where,
                const mhs::CommandOptions& opts) {
  try {
    const mhs::Instance inst = mhs::parse_instance(doc);
    spdlog::info("{}{}: {} on {}", where.empty() ? "" : where + " ", command, inst.map.label(),
                 inst.name.empty() ? "(unnamed)" : inst.name);
    mhs::CommandResult r = mhs::run_command(command, inst, opts);
    spdlog::info("{}exit code {}", where.empty() ? "" : where + " ", r.exit_code);
    if (spdlog::should_log(spdlog::level::trace) && r.report.contains("bracket_trace"))
      for (const auto& b : r.report["bracket_trace"]) spdlog::trace("bracket {}", b.dump());
    return {std::move(r.report), r.exit_code, std::move(r.summary)};
  } catch (const mhs::ParseError& e) {
    const std::string msg = "parse error at " + where + e.what();
    spdlog::error("{}", msg);
    return {{{"command", command}, {"status", "parse_error"}, {"message", msg}}, 2, msg + "\n"};
  } catch (const mhs::Error& e) {
    spdlog::error("{}{}", where, e.what());
    return {{{"command", command}, {"status", "error"}, {"message", e.what()}}, 4,
            std::string(e.what()) + "\n"};
  }
}

int severity(int code) { return code == 0 ? 0 : (code == 2 ? 3 : (code == 4 ? 2 : 1)); }

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Eigenpairs and spectral radii of order-preserving multi-homogeneous maps"};
  std::string command;
  std::string instance_path;
  std::string out_path;
  std::string report_path;
  bool dual = false;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "analyze | solve | graph | certify")
      ->required()
      ->check(CLI::IsMember({"analyze", "solve", "graph", "certify"}));
  app.add_option("instance", instance_path, "instance file (JSON object or array of objects)")
      ->required();
  app.add_flag("--dual", dual, "graph: build the dual graph (vanishing limits)");
  app.add_option("--jobs", jobs, "concurrent instances for batch files")
      ->check(CLI::Range(1, 1024));
  app.add_option("--out", out_path, "write the JSON report here ('-' for stdout)");
  app.add_option("--seed", seed, "seed for random initial vectors");
  app.add_option("--report", report_path, "certify: solve report whose eigenpair is certified");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  mhs::CommandOptions opts;
  opts.dual = dual;
  opts.seed = seed;

  mhs::json doc;
  try {
    doc = mhs::parse_json_text(read_file(instance_path));
    if (!report_path.empty()) opts.prior_report = mhs::parse_json_text(read_file(report_path));
  } catch (const mhs::ParseError& e) {
    spdlog::error("{}", e.what());
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }

  const bool batch = doc.is_array();
  std::vector<mhs::json> docs = batch ? doc.get<std::vector<mhs::json>>() : std::vector{doc};
  std::vector<Outcome> outcomes(docs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < docs.size();)
      outcomes[i] = run_one(command, docs[i], batch ? "/" + std::to_string(i) : "", opts);
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), docs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int exit_code = 0;
  mhs::json report;
  std::string summary;
  if (batch) {
    report = mhs::json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      report.push_back(outcomes[i].report);
      summary += "[" + std::to_string(i) + "]\n" + outcomes[i].summary;
    }
  } else {
    report = outcomes.front().report;
    summary = outcomes.front().summary;
  }
  for (const auto& o : outcomes)
    if (severity(o.exit_code) > severity(exit_code)) exit_code = o.exit_code;

  const std::string text = report.dump(2) + "\n";
  if (out_path == "-") {
    std::cout << text;
  } else {
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 2;
      }
      out << text;
    }
    std::cout << summary;
  }
  return exit_code;
}
