// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "support/fixtures.hpp"
#include "svabench/cli.hpp"
#include "svabench/config.hpp"
#include "svabench/reporting.hpp"

using namespace svabench;
using namespace svabench::testing;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const char* name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

CliRun run(std::vector<std::string> args, const EnvLookup& env = env_of({})) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

fs::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }
fs::path golden(const std::string& rel) { return source_dir() / "tests" / "golden" / rel; }

std::string arbiter() { return (bundled_root() / "train/arbiter/arbiter.v").string(); }

std::vector<std::string> mock_eval(const fs::path& output, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"eval", "--config", fixture("mock-eval.json").string(), "--output", output.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

TEST(RunConfig, Defaults) {
  RunConfig cfg;
  EXPECT_EQ(cfg.models, (std::vector<ModelEndpoint>{{"gpt-4o", std::string(kDefaultEndpoint)}}));
  EXPECT_EQ(cfg.shots, (std::vector<int>{1, 5}));
  EXPECT_EQ(cfg.gen_params, GenParams{});
  EXPECT_EQ(cfg.ice_seed, 50u);
}

TEST(RunConfig, FileThenEnvironment) {
  TempDir dir;
  write_text(dir / "run.json", R"({"endpoint": "https://a.example/v1", "models": ["m1", {"id": "m2", "endpoint": "mock://canned"}],
    "shots": [5], "output_dir": "out", "gen_params": {"temperature": 0.2}, "check": {"mode": "random", "random_trials": 7}})");
  RunConfig cfg = load_run_config(dir / "run.json");
  EXPECT_EQ(cfg.models[0], (ModelEndpoint{"m1", "https://a.example/v1"}));
  EXPECT_EQ(cfg.models[1], (ModelEndpoint{"m2", "mock://" + (dir / "canned").string()}));
  EXPECT_EQ(cfg.output_dir, dir / "out");
  EXPECT_EQ(cfg.shots, std::vector<int>{5});
  EXPECT_DOUBLE_EQ(cfg.gen_params.temperature, 0.2);
  EXPECT_DOUBLE_EQ(cfg.gen_params.top_p, 0.95);
  EXPECT_EQ(cfg.check_config.mode, CheckMode::Random);
  EXPECT_EQ(cfg.check_config.random_trials, 7);

  RunConfig env = apply_environment(cfg, env_of({{kApiKeyEnv, "sk-test"}, {kApiUrlEnv, "https://b.example/v1"}}));
  EXPECT_EQ(env.api_key, "sk-test");
  EXPECT_EQ(env.endpoint, "https://b.example/v1");
  for (const auto& m : env.models) EXPECT_EQ(m.endpoint, "https://b.example/v1");
  EXPECT_EQ(apply_environment(cfg, env_of({})), cfg);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  TempDir dir;
  write_text(dir / "a.json", R"({"modles": ["x"]})");
  EXPECT_THROW(load_run_config(dir / "a.json"), std::invalid_argument);
  write_text(dir / "b.json", R"({"shots": "five"})");
  EXPECT_THROW(load_run_config(dir / "b.json"), std::invalid_argument);
  write_text(dir / "c.json", R"({"check": {"mode": "symbolic"}})");
  EXPECT_THROW(load_run_config(dir / "c.json"), std::invalid_argument);
  write_text(dir / "d.json", "{");
  EXPECT_ANY_THROW(load_run_config(dir / "d.json"));
  EXPECT_ANY_THROW(load_run_config(dir / "missing.json"));
}

TEST(Cli, HelpAndVersionEverywhere) {
  for (std::vector<std::string> prefix : {std::vector<std::string>{}, {"check"}, {"eval"}, {"bench"}, {"bench", "validate"},
                                          {"report"}}) {
    auto help = prefix;
    help.push_back("--help");
    CliRun h = run(help);
    EXPECT_EQ(h.code, kExitOk) << help.size();
    EXPECT_NE(h.out.find("Usage"), std::string::npos) << h.out;
    auto version = prefix;
    version.push_back("--version");
    CliRun v = run(version);
    EXPECT_EQ(v.code, kExitOk);
    EXPECT_EQ(v.out, "svabench 0.1.0\n");
  }
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"check", arbiter()}).code, kExitUsage);
  EXPECT_EQ(run({"check", arbiter(), "/nonexistent.sva"}).code, kExitUsage);
  EXPECT_EQ(run({"report"}).code, kExitUsage);
}

TEST(Cli, CheckArbiter) {
  TempDir dir;
  write_text(dir / "both.sva", std::string(kArbiterP1) + "\n" + kArbiterP2 + "\n");
  write_text(dir / "p1.sva", std::string(kArbiterP1) + "\n");
  CliRun both = run({"check", arbiter(), (dir / "both.sva").string()});
  EXPECT_EQ(both.code, kExitFail) << both.err;
  EXPECT_NE(both.out.find("Valid"), std::string::npos);
  EXPECT_NE(both.out.find("Cex"), std::string::npos);
  EXPECT_EQ(run({"check", arbiter(), (dir / "p1.sva").string()}).code, kExitOk);

  CliRun traced = run({"check", arbiter(), (dir / "both.sva").string(), "--json", "--trace"});
  auto doc = nlohmann::json::parse(traced.out);
  EXPECT_EQ(doc[0]["verdict"], "Valid");
  EXPECT_EQ(doc[1]["verdict"], "Cex");
  EXPECT_FALSE(doc[1]["trace"].empty());

  write_text(dir / "bad.sva", "assert property (@(posedge clk) req1 |-> ;\n");
  EXPECT_EQ(run({"check", arbiter(), (dir / "bad.sva").string()}).code, kExitError);
  write_text(dir / "broken.v", "module m(input a; endmodule");
  EXPECT_EQ(run({"check", (dir / "broken.v").string(), (dir / "p1.sva").string()}).code, kExitError);
}

TEST(Cli, BenchValidate) {
  CliRun ok = run({"bench", "validate", bundled_root().string()});
  EXPECT_EQ(ok.code, kExitOk) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("4.8"), std::string::npos);
  CliRun json = run({"bench", "validate", bundled_root().string(), "--json"});
  EXPECT_EQ(nlohmann::json::parse(json.out)["violations"].size(), 0u);

  TempDir bad;
  fs::copy(bundled_root(), bad.path(), fs::copy_options::recursive);
  std::ofstream(bad / "train/half_adder/half_adder.sva", std::ios::app)
      << "assert property (@(posedge clk) (a == 1) |-> (s == 1));\n";
  CliRun violated = run({"bench", "validate", bad.path().string()});
  EXPECT_EQ(violated.code, kExitFail);
  EXPECT_NE(violated.out.find("golden not valid"), std::string::npos);

  TempDir empty;
  EXPECT_EQ(run({"bench", "validate", empty.path().string()}).code, kExitUsage);
}

TEST(Cli, MockEvalMatchesGolden) {
  TempDir out;
  CliRun r = run(mock_eval(out.path()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_text(out / "records.jsonl"), read_text(golden("records.jsonl")));
  EXPECT_EQ(read_text(out / "metrics.csv"), read_text(golden("metrics.csv")));
  EXPECT_EQ(r.out, read_text(golden("metrics.csv")));
  EXPECT_TRUE(fs::exists(out / "metrics.json"));
  EXPECT_TRUE(fs::exists(out / "plotdata.json"));
  EXPECT_NE(r.err.find("20 pipeline runs, 0 already recorded"), std::string::npos);

  TempDir serial;
  ASSERT_EQ(run(mock_eval(serial.path(), {"--parallelism", "1"})).code, kExitOk);
  EXPECT_EQ(read_text(serial / "records.jsonl"), read_text(golden("records.jsonl")));
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir out;
  CliRun r = run(mock_eval(out.path(), {"--models", "mock-a", "--shots", "5"}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, std::string(kCsvHeader) + "\nmock-a,5,13,2,2,0.7647058823529411,0.11764705882352941,0.11764705882352941\n");
}

TEST(Cli, EnvironmentOverridesConfigAndFlagsOverrideEnvironment) {
  TempDir dir;
  write_text(dir / "run.json", R"({"endpoint": "https://unreachable.invalid/v1", "models": ["mock-a"], "shots": [1],
    "benchmark_root": ")" + bundled_root().string() + R"("})");
  const std::string corpus = fixture("mock").string();
  CliRun via_env = run({"eval", "--config", (dir / "run.json").string(), "--output", (dir / "a").string()},
                    env_of({{kApiUrlEnv, "mock://" + corpus}}));
  EXPECT_EQ(via_env.code, kExitOk) << via_env.err;
  CliRun via_flag = run({"eval", "--config", (dir / "run.json").string(), "--output", (dir / "b").string(), "--mock",
                      corpus},
                     env_of({{kApiUrlEnv, "mock://" + (dir / "nowhere").string()}}));
  EXPECT_EQ(via_flag.code, kExitOk) << via_flag.err;
  EXPECT_EQ(read_text(dir / "a/records.jsonl"), read_text(dir / "b/records.jsonl"));
}

TEST(Cli, ResumeMakesNoNewCalls) {
  TempDir work;
  fs::copy(fixture("mock"), work / "mock", fs::copy_options::recursive);
  std::vector<std::string> args{"eval",    "--bench", bundled_root().string(), "--mock", (work / "mock").string(),
                                "--models", "mock-a,mock-b", "--output", (work / "out").string()};
  ASSERT_EQ(run(args).code, kExitOk);
  fs::remove_all(work / "mock");
  fs::create_directories(work / "mock");
  auto resumed = args;
  resumed.push_back("--resume");
  CliRun r = run(resumed);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("0 pipeline runs, 20 already recorded"), std::string::npos);
  EXPECT_EQ(read_text(work / "out/records.jsonl"), read_text(golden("records.jsonl")));
}

TEST(Cli, ResumeRetriesTransportErrors) {
  TempDir work;
  fs::copy(fixture("mock"), work / "mock", fs::copy_options::recursive);
  fs::remove(work / "mock/mock-a/gen/counter4/k1.txt");
  std::vector<std::string> args{"eval", "--bench", bundled_root().string(), "--mock", (work / "mock").string(),
                                "--models", "mock-a,mock-b", "--output", (work / "out").string()};
  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_NE(read_text(work / "out/records.jsonl").find("transport-error"), std::string::npos);

  fs::copy(fixture("mock/mock-a/gen/counter4/k1.txt"), work / "mock/mock-a/gen/counter4/k1.txt");
  args.push_back("--resume");
  CliRun r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("1 pipeline runs, 19 already recorded"), std::string::npos);
  EXPECT_EQ(read_text(work / "out/records.jsonl"), read_text(golden("records.jsonl")));
}

TEST(Cli, Report) {
  TempDir out;
  ASSERT_EQ(run(mock_eval(out.path())).code, kExitOk);
  fs::remove(out / "metrics.csv");
  CliRun r = run({"report", out.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_text(out / "metrics.csv"), read_text(golden("metrics.csv")));

  CliRun self = run({"report", out.path().string(), "--compare", out.path().string()});
  ASSERT_EQ(self.code, kExitOk) << self.err;
  auto deltas = nlohmann::json::parse(read_text(out / "deltas.json"));
  ASSERT_EQ(deltas.size(), 4u);
  for (const auto& e : deltas) EXPECT_EQ(e["pass"]["relative_pct"], 0.0);

  CliRun paired = run({"report", out.path().string(), "--compare", out.path().string(), "--pair", "mock-b=mock-a"});
  EXPECT_EQ(paired.code, kExitFail);  // mock-a then has no candidate

  TempDir empty;
  EXPECT_EQ(run({"report", empty.path().string()}).code, kExitUsage);
  EXPECT_EQ(run({"report", (empty / "nope").string()}).code, kExitUsage);
}
