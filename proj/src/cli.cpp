// SPDX-License-Identifier: Apache-2.0
#include "svabench/cli.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "CLI11.hpp"
#include "svabench/assertion.hpp"
#include "svabench/benchmark.hpp"
#include "svabench/errors.hpp"
#include "svabench/reporting.hpp"
#include "svabench/transition_system.hpp"
#include "svabench/verilog.hpp"

namespace svabench {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_version_flag(CLI::App& app, std::ostream& out) {
  app.add_flag_callback(
         "--version",
         [&out] {
           out << "svabench " << SVABENCH_VERSION << "\n";
           throw CLI::Success();
         },
         "Print the version and exit")
      ->trigger_on_parse();
}

struct CheckFlags {
  std::string mode = "exhaustive";
  int budget = CheckConfig{}.bit_budget;
  int depth = CheckConfig{}.reachability_depth;
  std::uint64_t trials = CheckConfig{}.random_trials;
  std::uint64_t seed = CheckConfig{}.seed;
};

void add_check_flags(CLI::App& app, CheckFlags& f) {
  app.add_option("--mode", f.mode, "exhaustive or random")->check(CLI::IsMember({"exhaustive", "random"}));
  app.add_option("--budget", f.budget, "Bit budget for exhaustive search")->check(CLI::Range(1, 40));
  app.add_option("--depth", f.depth, "Reachability depth bound")->check(CLI::Range(0, 1 << 20));
  app.add_option("--trials", f.trials, "Trials in random mode");
  app.add_option("--seed", f.seed, "Seed for random mode");
}

CheckConfig to_check_config(const CheckFlags& f) {
  CheckConfig cfg;
  cfg.mode = *check_mode_from_string(f.mode);
  cfg.bit_budget = f.budget;
  cfg.reachability_depth = f.depth;
  cfg.random_trials = f.trials;
  cfg.seed = f.seed;
  return cfg;
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
  fs::path design;
  fs::path assertions;
  CheckFlags flags;
  bool json = false;
  bool trace = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> texts = split_assertion_file(read_text(a.assertions));
  std::optional<Checker> checker;
  try {
    checker.emplace(elaborate(parse_design(read_text(a.design))), to_check_config(a.flags));
  } catch (const Error& e) {
    err << a.design.string() << ": " << e.what() << "\n";
    return kExitError;
  }
  auto results = checker->check_batch(texts);

  bool any_error = false;
  bool any_fail = false;
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [text, v] = results[i];
    Outcome o = classify(v);
    any_error |= o == Outcome::Error;
    any_fail |= o == Outcome::Fail;
    if (a.json) {
      nlohmann::ordered_json item{{"index", i + 1},
                                  {"assertion", text},
                                  {"verdict", to_string(v.kind)},
                                  {"outcome", to_string(o)},
                                  {"error", to_string(v.error)},
                                  {"detail", v.detail}};
      if (v.trace) item["trace"] = nlohmann::ordered_json::parse(trace_to_json(*v.trace));
      doc.push_back(std::move(item));
      continue;
    }
    char head[32];
    std::snprintf(head, sizeof head, "%-3zu %-8s", i + 1, std::string(to_string(v.kind)).c_str());
    out << head << text << "\n";
    if (!v.detail.empty() && v.kind != VerdictKind::Valid) out << "             " << v.detail << "\n";
    if (a.trace && v.trace) out << dump_trace(*v.trace);
  }
  if (a.json) out << doc.dump(2) << "\n";
  if (any_error) return kExitError;
  return any_fail ? kExitFail : kExitOk;
}

// ---------------------------------------------------------------------------
// bench validate

struct ValidateArgs {
  fs::path root;
  CheckFlags flags;
  bool json = false;
};

int cmd_bench_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  Benchmark b;
  try {
    b = load_benchmark(a.root);
  } catch (const MissingDirectory& e) {
    err << e.what() << "\nusage: svabench bench validate ROOT (ROOT must contain train/ and test/)\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitFail;
  }
  ValidationReport report = validate(b, to_check_config(a.flags));
  out << (a.json ? report.to_json().dump(2) + "\n" : report.to_text());
  return report.ok() ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::optional<fs::path> config;
  std::vector<std::string> models;
  std::vector<int> shots;
  std::optional<std::string> mock;
  std::optional<fs::path> bench;
  std::optional<fs::path> output;
  std::optional<int> parallelism;
  bool resume = false;
};

using RecordKey = std::tuple<std::string, int, std::string>;  // model, k, design

RunConfig resolve_config(const EvalArgs& a, const EnvLookup& env) {
  RunConfig cfg;
  if (a.config) cfg = load_run_config(*a.config);
  cfg = apply_environment(std::move(cfg), env);
  if (!a.models.empty()) {
    std::vector<ModelEndpoint> models;
    for (const auto& id : a.models) models.push_back({id, endpoint_for(cfg, id)});
    cfg.models = std::move(models);
  }
  if (a.mock) {
    cfg.endpoint = "mock://" + *a.mock;
    for (auto& m : cfg.models) m.endpoint = cfg.endpoint;
  }
  if (!a.shots.empty()) cfg.shots = a.shots;
  if (a.bench) cfg.benchmark_root = *a.bench;
  if (a.output) cfg.output_dir = *a.output;
  if (a.parallelism) cfg.parallelism = *a.parallelism;
  if (cfg.models.empty()) throw std::invalid_argument("no models configured");
  if (cfg.shots.empty()) throw std::invalid_argument("no shot counts configured");
  if (cfg.parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");
  return cfg;
}

std::string record_line(const nlohmann::ordered_json& doc) {
  return doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_records(const fs::path& path, const std::map<RecordKey, std::string>& records) {
  std::string content;
  for (const auto& [key, line] : records) content += line + "\n";
  write_file_atomic(path, content);
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  RunConfig cfg;
  Benchmark bench;
  std::map<int, std::vector<IceTuple>> ices;
  try {
    cfg = resolve_config(a, env);
    bench = load_benchmark(cfg.benchmark_root);
    for (int k : cfg.shots) {
      if (k < 0) throw std::invalid_argument("shot counts must be non-negative");
      ices[k] = select_ices(bench, static_cast<std::size_t>(k), cfg.ice_seed);
      if (k == 0 && !cfg.allow_zero_shot) throw EmptyExampleSet("k=0 requires \"zero_shot\": true in the config");
    }
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path records_path = cfg.output_dir / "records.jsonl";
  std::map<RecordKey, std::string> records;
  try {
    fs::create_directories(cfg.output_dir);
    if (a.resume && fs::exists(records_path)) {
      std::ifstream in(records_path, std::ios::binary);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto doc = nlohmann::json::parse(line);
        // Generation failures are retried on resume.
        if (doc.value("status", "ok") == to_string(RecordStatus::TransportError)) continue;
        records[{doc.at("model").get<std::string>(), doc.at("k").get<int>(), doc.at("design").get<std::string>()}] =
            line;
      }
    }
  } catch (const std::exception& e) {
    err << "eval: cannot prepare " << cfg.output_dir.string() << ": " << e.what() << "\n";
    return kExitIo;
  }

  struct Job {
    const ModelEndpoint* model;
    int k;
    const BenchmarkEntry* design;
  };
  std::vector<Job> jobs;
  for (const auto& m : cfg.models) {
    for (int k : cfg.shots) {
      for (const auto& e : bench.test) {
        if (!records.count({m.id, k, e.name})) jobs.push_back({&m, k, &e});
      }
    }
  }
  err << jobs.size() << " pipeline runs, " << records.size() << " already recorded\n";

  auto limiter = std::make_shared<RateLimiter>(cfg.requests_per_minute);
  std::map<std::string, std::unique_ptr<ChatClient>> clients;
  for (const auto& m : cfg.models) clients[m.id] = make_client(m.endpoint, cfg.api_key, limiter);

  std::mutex writer;  // guards records, err and the records file
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::exception_ptr fatal;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      {
        std::lock_guard lock(writer);
        if (fatal) return;
      }
      const Job& job = jobs[i];
      PipelineConfig pc;
      pc.task_description = cfg.task_description;
      pc.params = cfg.gen_params;
      pc.params.model_id = job.model->id;
      pc.params.endpoint = job.model->endpoint;
      pc.check = cfg.check_config;
      pc.allow_zero_shot = cfg.allow_zero_shot;
      pc.record_timings = !is_mock_endpoint(job.model->endpoint);
      try {
        EvalRecord r = run_pipeline(job.design->name, read_text(job.design->design_path), ices.at(job.k),
                                    *clients.at(job.model->id), pc);
        OutcomeCounts c;
        for (const auto& x : r.assertions) c.add(classify(x.verdict));
        std::lock_guard lock(writer);
        records[{job.model->id, job.k, job.design->name}] = record_line(to_json(r));
        write_records(records_path, records);
        err << "[" << ++done << "/" << jobs.size() << "] " << job.model->id << " k=" << job.k << " "
            << job.design->name << ": " << to_string(r.status) << ", " << r.assertions.size() << " assertions ("
            << c.pass << " pass, " << c.fail << " fail, " << c.error << " error)\n";
      } catch (...) {
        std::lock_guard lock(writer);
        if (!fatal) fatal = std::current_exception();
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(cfg.parallelism, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  try {
    if (fatal) std::rethrow_exception(fatal);
    write_records(records_path, records);
    std::vector<EvalRecord> parsed;
    for (const auto& [key, line] : records) parsed.push_back(record_from_json(nlohmann::json::parse(line)));
    auto summaries = aggregate(parsed);
    for (auto fmt : {ReportFormat::Csv, ReportFormat::Json, ReportFormat::PlotData}) emit(summaries, fmt, cfg.output_dir);
    out << to_csv(summaries);
  } catch (const AuthError& e) {
    err << "eval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "eval: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  fs::path results;
  std::optional<fs::path> compare;
  std::vector<std::string> pairs;
  std::optional<fs::path> output;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::map<std::string, std::string> pairing;
  for (const auto& p : a.pairs) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
      err << "report: --pair expects CANDIDATE=BASELINE, got '" << p << "'\n";
      return kExitUsage;
    }
    pairing[p.substr(0, eq)] = p.substr(eq + 1);
  }
  auto load = [&](const fs::path& dir) -> std::optional<std::vector<MetricsSummary>> {
    if (!fs::is_regular_file(dir / "records.jsonl")) {
      err << "report: " << dir.string() << " has no records.jsonl\nusage: svabench report RESULTS_DIR [--compare BASELINE_DIR]\n";
      return std::nullopt;
    }
    return aggregate(read_records(dir / "records.jsonl"));
  };
  try {
    auto summaries = load(a.results);
    if (!summaries) return kExitUsage;
    const fs::path dest = a.output.value_or(a.results);
    for (auto fmt : {ReportFormat::Csv, ReportFormat::Json, ReportFormat::PlotData}) emit(*summaries, fmt, dest);
    out << to_csv(*summaries);
    if (a.compare) {
      auto baseline = load(*a.compare);
      if (!baseline) return kExitUsage;
      DeltaReport deltas = compare(*baseline, *summaries, pairing);
      write_file_atomic(dest / "deltas.json", deltas.to_json().dump(2) + "\n");
      out << "\n" << deltas.to_text();
    }
  } catch (const KeyMismatch& e) {
    err << "report: " << e.what() << "\n";
    return kExitFail;
  } catch (const IoError& e) {
    err << "report: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Evaluate SystemVerilog assertions against RTL designs", "svabench"};
  app.require_subcommand(1);
  add_version_flag(app, out);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Check assertions against a design");
  add_version_flag(*check, out);
  check->add_option("design", check_args.design, "Verilog design")->required()->check(CLI::ExistingFile);
  check->add_option("assertions", check_args.assertions, "Assertion file")->required()->check(CLI::ExistingFile);
  check->add_flag("--json", check_args.json, "Print verdicts as JSON");
  check->add_flag("--trace", check_args.trace, "Print counterexample traces");
  add_check_flags(*check, check_args.flags);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Generate assertions with LLMs and check them");
  add_version_flag(*eval, out);
  eval->add_option("--config", eval_args.config, "JSON config file")->check(CLI::ExistingFile);
  eval->add_option("--models", eval_args.models, "Comma-separated model ids")->delimiter(',');
  eval->add_option("--shots", eval_args.shots, "Comma-separated shot counts")->delimiter(',');
  eval->add_option("--mock", eval_args.mock, "Replay canned responses from this directory");
  eval->add_option("--bench", eval_args.bench, "Benchmark root");
  eval->add_option("--output", eval_args.output, "Results directory");
  eval->add_option("--parallelism", eval_args.parallelism, "Concurrent pipelines");
  eval->add_flag("--resume", eval_args.resume, "Keep existing records and run only the missing ones");

  ValidateArgs validate_args;
  auto* bench = app.add_subcommand("bench", "Benchmark utilities");
  add_version_flag(*bench, out);
  bench->require_subcommand(1);
  auto* validate_cmd = bench->add_subcommand("validate", "Validate a benchmark root");
  add_version_flag(*validate_cmd, out);
  validate_cmd->add_option("root", validate_args.root, "Benchmark root")->required();
  validate_cmd->add_flag("--json", validate_args.json, "Print the report as JSON");
  add_check_flags(*validate_cmd, validate_args.flags);

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Aggregate evaluation records");
  add_version_flag(*report, out);
  report->add_option("results", report_args.results, "Results directory")->required();
  report->add_option("--compare", report_args.compare, "Baseline results directory");
  report->add_option("--pair", report_args.pairs, "CANDIDATE=BASELINE model pairing for --compare");
  report->add_option("--output", report_args.output, "Where to write metrics (default: RESULTS)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(check_args, out, err);
    if (*eval) return cmd_eval(eval_args, out, err, env);
    if (*validate_cmd) return cmd_bench_validate(validate_args, out, err);
    if (*report) return cmd_report(report_args, out, err);
  } catch (const UnreadableFile& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace svabench
