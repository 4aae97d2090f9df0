// Command-line driver: run one scenario, run the success-rate batch, or
// query a distance field built from a point file.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfdwa/gpdf.hpp"
#include "gfdwa/scenario.hpp"
#include "gfdwa/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gfdwa;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

const char* kVariants[] = {"gf-dwa", "dwa-ablation"};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario configure(const fs::path& path, const std::vector<std::string>& overrides,
                   const std::string& variant) {
  Scenario sc = load_scenario_file(path);
  if (!overrides.empty()) {
    json doc = scenario_to_json(sc);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_override(doc, kv.substr(0, eq), kv.substr(eq + 1));
    }
    sc = load_scenario(doc);
  }
  if (variant == "dwa-ablation") {
    sc.weights.q_col_grad = 0.0;
  } else if (variant != "gf-dwa") {
    throw ConfigError("unknown variant '" + variant + "'");
  }
  return sc;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Timestamps live only in this sidecar so that data files are reproducible.
void write_run_info(const fs::path& dir, json info) {
  info["created_utc"] = utc_now();
  info["parallel"] = parallel_available();
  write_json(dir / "run_info.json", info);
}

struct RunArgs {
  std::string scenario;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::string variant = "gf-dwa";
  bool plot_data = false;
  bool serial = false;
};

int cmd_run(const RunArgs& args) {
  Scenario sc;
  try {
    sc = configure(args.scenario, args.overrides, args.variant);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  SimOptions opts;
  opts.exec = args.serial ? Execution::Serial : Execution::Parallel;
  opts.record_plot_data = args.plot_data;
  const SimOutcome outcome = run(sc, opts);
  const MetricsSummary m = metrics(outcome, sc.step_budget);

  try {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    std::ofstream trace(dir / "trace.jsonl");
    if (!trace) throw ConfigError((dir / "trace.jsonl").string() + ": cannot write");
    for (const auto& rec : outcome.trace) trace << trace_record_to_json(rec).dump() << '\n';
    json mj = metrics_to_json(m, outcome);
    mj["scenario"] = sc.name;
    mj["variant"] = args.variant;
    write_json(dir / "metrics.json", mj);
    write_run_info(dir, {{"command", "run"},
                         {"scenario_path", args.scenario},
                         {"variant", args.variant},
                         {"overrides", args.overrides}});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::cout << sc.name << " [" << args.variant << "]: " << (m.success ? "success" : "failure")
            << " steps=" << m.max_steps << " reached=" << m.reached << " collided=" << m.collided
            << " timeout=" << m.timed_out << '\n';
  return m.success ? kExitSuccess : kExitFailure;
}

struct BatchArgs {
  std::string dir;
  std::string out_dir;
  std::string expect;
  std::vector<std::string> overrides;
  unsigned workers = 1;
};

int cmd_batch(const BatchArgs& args) {
  std::error_code ec;
  if (!fs::is_directory(args.dir, ec)) {
    std::cerr << "error: " << args.dir << ": not a directory\n";
    return kExitConfig;
  }
  const fs::path expect_path = args.expect.empty() ? fs::path(args.dir) / "expected.json" : fs::path(args.expect);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(args.dir)) {
    if (entry.path().extension() != ".json") continue;
    if (fs::exists(expect_path) && fs::equivalent(entry.path(), expect_path)) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "error: no scenario files in " << args.dir << '\n';
    return kExitConfig;
  }

  struct Cell {
    std::string result;
    int steps = 0;
  };
  struct Job {
    std::size_t file;
    std::string variant;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (const char* v : kVariants) jobs.push_back({i, v});
  }

  std::vector<std::string> names(files.size());
  std::vector<std::string> errors(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) names[i] = files[i].stem().string();
  std::vector<Cell> cells(jobs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(args.workers, static_cast<unsigned>(jobs.size())));
  const Execution exec = workers > 1 ? Execution::Serial : Execution::Parallel;

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const Scenario sc = configure(files[jobs[j].file], args.overrides, jobs[j].variant);
        const MetricsSummary m = metrics(run(sc, {exec, false}), sc.step_budget);
        cells[j] = {m.success ? "pass" : "fail", m.max_steps};
      } catch (const std::exception& e) {
        cells[j] = {"error", 0};
        std::lock_guard<std::mutex> lock(err_mu);
        errors[jobs[j].file] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json table = json::array();
  std::map<std::string, std::map<std::string, std::string>> got;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    got[names[jobs[j].file]][jobs[j].variant] = cells[j].result;
  }
  std::ostringstream text;
  text << std::left << std::setw(12) << "scenario";
  for (const char* v : kVariants) text << std::setw(16) << v;
  text << '\n';
  for (std::size_t i = 0; i < files.size(); ++i) {
    json row = {{"scenario", names[i]}};
    text << std::setw(12) << names[i];
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].file != i) continue;
      row[jobs[j].variant] = {{"result", cells[j].result}, {"steps", cells[j].steps}};
      const std::string mark = cells[j].result == "pass" ? "ok" : cells[j].result == "fail" ? "x" : "error";
      text << std::setw(16) << (mark + (cells[j].result == "error" ? "" : " (" + std::to_string(cells[j].steps) + ")"));
    }
    if (!errors[i].empty()) row["error"] = errors[i];
    text << '\n';
    table.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) text << names[i] << ": " << errors[i] << '\n';
  }

  bool matches = true;
  std::ostringstream diff;
  if (fs::exists(expect_path)) {
    json expected;
    try {
      std::ifstream in(expect_path);
      expected = json::parse(in);
    } catch (const std::exception& e) {
      std::cerr << "error: " << expect_path.string() << ": " << e.what() << '\n';
      return kExitConfig;
    }
    for (const auto& [scenario, variants] : expected.items()) {
      for (const auto& [variant, want] : variants.items()) {
        const std::string have = got.count(scenario) && got[scenario].count(variant) ? got[scenario][variant] : "missing";
        if (have != want.get<std::string>()) {
          matches = false;
          diff << "mismatch: " << scenario << " [" << variant << "] expected " << want.get<std::string>()
               << ", got " << have << '\n';
        }
      }
    }
  }
  for (const auto& [scenario, variants] : got) {
    for (const auto& [variant, result] : variants) {
      if (result == "error") matches = false;
    }
  }

  std::cout << text.str() << diff.str();
  if (!args.out_dir.empty()) {
    try {
      fs::create_directories(args.out_dir);
      write_json(fs::path(args.out_dir) / "batch.json", {{"rows", table}, {"matches_expected", matches}});
      std::ofstream(fs::path(args.out_dir) / "table.txt") << text.str() << diff.str();
      write_run_info(args.out_dir, {{"command", "batch"}, {"directory", args.dir}, {"workers", workers}});
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  return matches ? kExitSuccess : kExitFailure;
}

struct FieldArgs {
  std::string points;
  std::vector<std::string> at;
  KernelParams kernel;
};

int cmd_field(const FieldArgs& args) {
  try {
    std::ifstream in(args.points);
    if (!in) throw ConfigError(args.points + ": cannot open point file");
    const auto pts = read_points(in);
    const GpField field = GpField::fit(pts, args.kernel);
    json out = json::array();
    for (const auto& spec : args.at) {
      std::istringstream ss(spec);
      double x = 0;
      double y = 0;
      char comma = 0;
      if (!(ss >> x >> comma >> y) || comma != ',') throw ConfigError("--at expects x,y, got '" + spec + "'");
      const Vec2 p(x, y);
      const FieldQuery q = field.query(p);
      out.push_back({{"point", {x, y}},
                     {"distance", q.distance},
                     {"gradient", {q.gradient.x(), q.gradient.y()}},
                     {"variance", field.variance(p)}});
    }
    std::cout << out.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-field dynamic window planner and fleet simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write trace and metrics");
  run_cmd->add_option("scenario", run_args.scenario, "Scenario file")->required();
  run_cmd->add_option("-o,--out", run_args.out_dir, "Output directory");
  run_cmd->add_option("--set", run_args.overrides, "Override a scenario field (key=value)");
  run_cmd->add_option("--variant", run_args.variant, "Planner variant")
      ->check(CLI::IsMember({"gf-dwa", "dwa-ablation"}));
  run_cmd->add_flag("--plot-data", run_args.plot_data, "Record selected paths and candidate endpoints");
  run_cmd->add_flag("--serial", run_args.serial, "Use the serial candidate evaluation");

  BatchArgs batch_args;
  auto* batch_cmd = app.add_subcommand("batch", "Run every scenario in a directory under both variants");
  batch_cmd->add_option("directory", batch_args.dir, "Scenario directory")->required();
  batch_cmd->add_option("-o,--out", batch_args.out_dir, "Output directory");
  batch_cmd->add_option("--expect", batch_args.expect, "Expected table (default: <directory>/expected.json)");
  batch_cmd->add_option("--set", batch_args.overrides, "Override a scenario field (key=value)");
  batch_cmd->add_option("--workers", batch_args.workers, "Concurrent runs")->check(CLI::PositiveNumber);

  FieldArgs field_args;
  auto* field_cmd = app.add_subcommand("field", "Query a distance field fitted to a point file");
  field_cmd->add_option("points", field_args.points, "Point file, one 'x y' per line")->required();
  field_cmd->add_option("--at", field_args.at, "Query point x,y")->required();
  field_cmd->add_option("--length-scale", field_args.kernel.length_scale, "Kernel length scale [m]");
  field_cmd->add_option("--noise", field_args.kernel.noise_sigma, "Observation noise sigma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run_cmd) return cmd_run(run_args);
  if (*batch_cmd) return cmd_batch(batch_args);
  return cmd_field(field_args);
}
