// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "svabench/errors.hpp"
#include "svabench/reporting.hpp"

using namespace svabench;
using namespace svabench::testing;

namespace {

Verdict verdict_of(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Valid: return Verdict::valid();
    case VerdictKind::Vacuous: return Verdict::vacuous();
    case VerdictKind::Cex: return Verdict::cex(Trace{});
    case VerdictKind::Error: break;
  }
  return Verdict::failure(ErrorClass::Syntax, "bad");
}

EvalRecord record(std::string model, int k, std::string design, const std::vector<VerdictKind>& kinds) {
  EvalRecord r;
  r.model_id = std::move(model);
  r.k = k;
  r.design = std::move(design);
  r.status = RecordStatus::Ok;
  for (auto kind : kinds) r.assertions.push_back({"assert property (x);", "assert property (x);", false, verdict_of(kind)});
  return r;
}

// 4 Valid + 1 Vacuous + 3 Cex + 2 Error spread over two designs.
std::vector<EvalRecord> ten_assertions() {
  using K = VerdictKind;
  return {record("m", 1, "a", {K::Valid, K::Valid, K::Cex, K::Error, K::Vacuous}),
          record("m", 1, "b", {K::Valid, K::Cex, K::Valid, K::Cex, K::Error})};
}

MetricsSummary summary(std::string model, int k, double pass, double fail, double error) {
  MetricsSummary s;
  s.model_id = std::move(model);
  s.k = k;
  s.pass_frac = pass;
  s.fail_frac = fail;
  s.error_frac = error;
  return s;
}

std::vector<EvalRecord> random_records(Rng& rng) {
  static const std::vector<std::string> models{"m1", "m2", "m3"};
  static const std::vector<int> shots{1, 3, 5};
  std::vector<EvalRecord> out;
  int n = rng.between(0, 30);
  for (int i = 0; i < n; ++i) {
    std::vector<VerdictKind> kinds(static_cast<std::size_t>(rng.between(0, 6)));
    for (auto& kind : kinds) kind = static_cast<VerdictKind>(rng.between(0, 3));
    out.push_back(record(rng.pick(models), rng.pick(shots), "d" + std::to_string(i), kinds));
  }
  return out;
}

}  // namespace

TEST(Aggregate, WorkedFractions) {
  auto summaries = aggregate(ten_assertions());
  ASSERT_EQ(summaries.size(), 1u);
  const auto& s = summaries[0];
  EXPECT_EQ(s.counts, (OutcomeCounts{5, 3, 2}));
  EXPECT_DOUBLE_EQ(s.pass_frac, 0.5);
  EXPECT_DOUBLE_EQ(s.fail_frac, 0.3);
  EXPECT_DOUBLE_EQ(s.error_frac, 0.2);
  EXPECT_EQ(s.per_design.at("a"), (OutcomeCounts{3, 1, 1}));
  EXPECT_EQ(s.per_design.at("b"), (OutcomeCounts{2, 2, 1}));
  EXPECT_TRUE(s.no_output.empty());
}

TEST(Aggregate, EmptyInput) {
  EXPECT_TRUE(aggregate({}).empty());
  EXPECT_EQ(to_csv({}), std::string(kCsvHeader) + "\n");
}

TEST(Aggregate, OneSummaryPerModelAndShot) {
  using K = VerdictKind;
  std::vector<EvalRecord> records{record("z", 5, "a", {K::Valid}), record("a", 5, "a", {K::Cex}),
                                  record("z", 1, "a", {K::Error}), record("a", 1, "a", {K::Valid})};
  auto summaries = aggregate(records);
  ASSERT_EQ(summaries.size(), 4u);
  std::vector<std::pair<std::string, int>> keys;
  for (const auto& s : summaries) keys.emplace_back(s.model_id, s.k);
  EXPECT_EQ(keys, (std::vector<std::pair<std::string, int>>{{"a", 1}, {"a", 5}, {"z", 1}, {"z", 5}}));
}

TEST(Aggregate, NoOutputDesignsAreListed) {
  auto records = ten_assertions();
  records.push_back(record("m", 1, "silent", {}));
  records.back().status = RecordStatus::NoOutput;
  auto s = aggregate(records).at(0);
  EXPECT_EQ(s.no_output, std::vector<std::string>{"silent"});
  EXPECT_EQ(s.counts.total(), 10);
  EXPECT_DOUBLE_EQ(s.pass_frac, 0.5);
}

TEST(Aggregate, AllSilentMeansZeroFractions) {
  auto s = aggregate({record("m", 1, "a", {})}).at(0);
  EXPECT_EQ(s.counts.total(), 0);
  EXPECT_EQ(s.pass_frac + s.fail_frac + s.error_frac, 0.0);
}

TEST(Csv, RowFormat) {
  EXPECT_EQ(to_csv(aggregate(ten_assertions())), std::string(kCsvHeader) + "\nm,1,5,3,2,0.5,0.3,0.2\n");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_number(0), "0");
  EXPECT_EQ(format_number(1), "1");
}

TEST(PlotData, GroupedBarShape) {
  std::vector<EvalRecord> records;
  for (std::string model : {"gpt-3.5", "gpt-4o", "llama3-70b", "llama3-8b"}) {
    for (int k : {1, 5}) records.push_back(record(model, k, "d", {VerdictKind::Valid, VerdictKind::Cex}));
  }
  auto plot = to_plotdata(aggregate(records));
  EXPECT_EQ(plot["chart"], "grouped-bar");
  EXPECT_EQ(plot["series"], nlohmann::json({"pass", "fail", "error"}));
  ASSERT_EQ(plot["categories"].size(), 4u);
  for (const auto& category : plot["categories"]) {
    ASSERT_EQ(category["groups"].size(), 2u);
    EXPECT_EQ(category["groups"][0]["k"], 1);
    EXPECT_EQ(category["groups"][1]["k"], 5);
    for (const auto& group : category["groups"]) {
      EXPECT_EQ(group["values"].size(), 3u);
      EXPECT_EQ(group["values"]["pass"], 0.5);
    }
  }
  EXPECT_EQ(plot["categories"][0]["name"], "gpt-3.5");
}

TEST(Emit, ByteIdenticalAcrossRuns) {
  auto summaries = aggregate(ten_assertions());
  TempDir one, two;
  for (auto format : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::PlotData}) {
    auto a = emit(summaries, format, one.path());
    auto b = emit(summaries, format, two.path());
    EXPECT_EQ(a.filename(), b.filename());
    EXPECT_EQ(read_text(a), read_text(b));
  }
  EXPECT_TRUE(std::filesystem::exists(one / "metrics.json"));
  EXPECT_TRUE(std::filesystem::exists(one / "metrics.csv"));
  EXPECT_TRUE(std::filesystem::exists(one / "plotdata.json"));
  EXPECT_FALSE(std::filesystem::exists(one / "metrics.csv.tmp"));
}

TEST(Emit, UnwritableDirectory) {
  TempDir dir;
  write_text(dir / "blocker", "x");
  EXPECT_THROW(emit({}, ReportFormat::Csv, dir / "blocker"), IoError);
}

TEST(Compare, RelativeImprovement) {
  auto report = compare({summary("base", 1, 0.25, 0.5, 0.25)}, {summary("tuned", 1, 0.3225, 0.5, 0.1775)},
                        {{"tuned", "base"}});
  ASSERT_EQ(report.entries.size(), 1u);
  const auto& e = report.entries[0];
  EXPECT_EQ(e.baseline_model_id, "base");
  ASSERT_TRUE(e.pass.relative_pct);
  EXPECT_NEAR(*e.pass.relative_pct, 29.0, 1e-9);
  EXPECT_EQ(e.pass.describe(), "+29.00%");
  EXPECT_NEAR(*e.fail.relative_pct, 0.0, 1e-12);
  EXPECT_NEAR(*e.error.relative_pct, -29.0, 1e-9);
}

TEST(Compare, IdentityIsZero) {
  auto summaries = aggregate(ten_assertions());
  auto report = compare(summaries, summaries);
  ASSERT_EQ(report.entries.size(), 1u);
  for (const Delta* d : {&report.entries[0].pass, &report.entries[0].fail, &report.entries[0].error}) {
    ASSERT_TRUE(d->relative_pct);
    EXPECT_EQ(*d->relative_pct, 0.0);
  }
}

TEST(Compare, ZeroBaselineIsUndefined) {
  auto report = compare({summary("m", 1, 0.0, 1.0, 0.0)}, {summary("m", 1, 0.5, 0.5, 0.0)});
  const auto& e = report.entries.at(0);
  EXPECT_FALSE(e.pass.relative_pct);
  EXPECT_EQ(e.pass.describe(), "undefined (zero baseline)");
  EXPECT_EQ(report.to_json()[0]["pass"]["note"], "undefined (zero baseline)");
  EXPECT_TRUE(report.to_json()[0]["pass"]["relative_pct"].is_null());
  EXPECT_NE(report.to_text().find("undefined (zero baseline)"), std::string::npos);
}

TEST(Compare, KeyMismatch) {
  std::vector<MetricsSummary> base{summary("m", 1, 0.5, 0.5, 0), summary("m", 5, 0.5, 0.5, 0)};
  std::vector<MetricsSummary> cand{summary("m", 1, 0.5, 0.5, 0)};
  EXPECT_THROW(compare(base, cand), KeyMismatch);
  EXPECT_THROW(compare(cand, base), KeyMismatch);
  EXPECT_THROW(compare(cand, {summary("other", 1, 0.5, 0.5, 0)}), KeyMismatch);
}

TEST(ReadRecords, RoundTripAndErrors) {
  TempDir dir;
  std::string text;
  for (const auto& r : ten_assertions()) text += to_json(r).dump() + "\n";
  write_text(dir / "records.jsonl", text);
  auto back = read_records(dir / "records.jsonl");
  EXPECT_EQ(aggregate(back), aggregate(ten_assertions()));
  EXPECT_THROW(read_records(dir / "missing.jsonl"), IoError);
  write_text(dir / "bad.jsonl", "{not json\n");
  EXPECT_THROW(read_records(dir / "bad.jsonl"), IoError);
}

TEST(AggregateProperty, FractionsSumToOne) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    for (const auto& s : aggregate(random_records(rng))) {
      if (s.counts.total() == 0) continue;
      EXPECT_NEAR(s.pass_frac + s.fail_frac + s.error_frac, 1.0, 1e-12);
      for (double f : {s.pass_frac, s.fail_frac, s.error_frac}) {
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
      }
    }
  }
}

TEST(AggregateProperty, PermutationInvariant) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto records = random_records(rng);
    auto expected = aggregate(records);
    std::shuffle(records.begin(), records.end(), rng.engine());
    ASSERT_EQ(aggregate(records), expected);
    ASSERT_EQ(to_csv(aggregate(records)), to_csv(expected));
  }
}

// Each assertion lands in exactly one bucket of exactly one summary.
TEST(AggregateProperty, Conservation) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    auto records = random_records(rng);
    std::map<std::pair<std::string, int>, OutcomeCounts> oracle;
    std::set<std::pair<std::string, int>> keys;
    for (const auto& r : records) {
      keys.emplace(r.model_id, r.k);
      auto& c = oracle[{r.model_id, r.k}];
      for (const auto& a : r.assertions) {
        if (a.verdict.kind == VerdictKind::Valid || a.verdict.kind == VerdictKind::Vacuous) ++c.pass;
        else if (a.verdict.kind == VerdictKind::Cex) ++c.fail;
        else ++c.error;
      }
    }
    auto summaries = aggregate(records);
    ASSERT_EQ(summaries.size(), keys.size());
    for (const auto& s : summaries) {
      EXPECT_EQ(s.counts, (oracle[{s.model_id, s.k}]));
      OutcomeCounts sum;
      for (const auto& [name, c] : s.per_design) {
        sum.pass += c.pass;
        sum.fail += c.fail;
        sum.error += c.error;
      }
      EXPECT_EQ(sum, s.counts);
    }
  }
}
