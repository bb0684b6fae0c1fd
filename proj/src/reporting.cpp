// SPDX-License-Identifier: Apache-2.0
#include "svabench/reporting.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "svabench/errors.hpp"

namespace svabench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void OutcomeCounts::add(Outcome o) {
  switch (o) {
    case Outcome::Pass: ++pass; break;
    case Outcome::Fail: ++fail; break;
    case Outcome::Error: ++error; break;
  }
}

std::vector<MetricsSummary> aggregate(const std::vector<EvalRecord>& records) {
  std::map<std::pair<std::string, int>, MetricsSummary> groups;
  for (const auto& r : records) {
    auto& s = groups[{r.model_id, r.k}];
    s.model_id = r.model_id;
    s.k = r.k;
    if (r.assertions.empty()) {
      s.no_output.push_back(r.design);
      continue;
    }
    auto& design = s.per_design[r.design];
    for (const auto& a : r.assertions) {
      Outcome o = classify(a.verdict);
      s.counts.add(o);
      design.add(o);
    }
  }
  std::vector<MetricsSummary> out;
  for (auto& [key, s] : groups) {
    std::sort(s.no_output.begin(), s.no_output.end());
    if (int total = s.counts.total(); total > 0) {
      s.pass_frac = static_cast<double>(s.counts.pass) / total;
      s.fail_frac = static_cast<double>(s.counts.fail) / total;
      s.error_frac = static_cast<double>(s.counts.error) / total;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string to_csv(const std::vector<MetricsSummary>& summaries) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& s : summaries) {
    out << s.model_id << "," << s.k << "," << s.counts.pass << "," << s.counts.fail << "," << s.counts.error << ","
        << format_number(s.pass_frac) << "," << format_number(s.fail_frac) << "," << format_number(s.error_frac)
        << "\n";
  }
  return out.str();
}

namespace {

ordered_json counts_json(const OutcomeCounts& c) {
  return {{"pass", c.pass}, {"fail", c.fail}, {"error", c.error}};
}

}  // namespace

ordered_json to_json(const std::vector<MetricsSummary>& summaries) {
  ordered_json out = ordered_json::array();
  for (const auto& s : summaries) {
    ordered_json item;
    item["model"] = s.model_id;
    item["k"] = s.k;
    item["counts"] = counts_json(s.counts);
    item["fractions"] = {{"pass", s.pass_frac}, {"fail", s.fail_frac}, {"error", s.error_frac}};
    ordered_json designs = ordered_json::object();
    for (const auto& [name, c] : s.per_design) designs[name] = counts_json(c);
    item["per_design"] = std::move(designs);
    item["no_output"] = s.no_output;
    out.push_back(std::move(item));
  }
  return out;
}

ordered_json to_plotdata(const std::vector<MetricsSummary>& summaries) {
  ordered_json out;
  out["chart"] = "grouped-bar";
  out["category"] = "model";
  out["group"] = "k";
  out["series"] = {"pass", "fail", "error"};
  out["y"] = "fraction of generated assertions";
  ordered_json categories = ordered_json::array();
  // summaries are sorted by (model, k), so one pass builds the nesting.
  for (const auto& s : summaries) {
    if (categories.empty() || categories.back()["name"] != s.model_id) {
      categories.push_back({{"name", s.model_id}, {"groups", ordered_json::array()}});
    }
    categories.back()["groups"].push_back(
        {{"k", s.k},
         {"values", {{"pass", s.pass_frac}, {"fail", s.fail_frac}, {"error", s.error_frac}}},
         {"counts", counts_json(s.counts)}});
  }
  out["categories"] = std::move(categories);
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

fs::path emit(const std::vector<MetricsSummary>& summaries, ReportFormat format, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  fs::path path;
  std::string content;
  switch (format) {
    case ReportFormat::Csv:
      path = dir / "metrics.csv";
      content = to_csv(summaries);
      break;
    case ReportFormat::Json:
      path = dir / "metrics.json";
      content = to_json(summaries).dump(2) + "\n";
      break;
    case ReportFormat::PlotData:
      path = dir / "plotdata.json";
      content = to_plotdata(summaries).dump(2) + "\n";
      break;
  }
  write_file_atomic(path, content);
  return path;
}

Delta relative_delta(double baseline, double candidate) {
  Delta d{baseline, candidate, std::nullopt};
  if (baseline != 0.0) d.relative_pct = (candidate - baseline) / baseline * 100.0;
  return d;
}

std::string Delta::describe() const {
  if (!relative_pct) return "undefined (zero baseline)";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f%%", *relative_pct);
  return buf;
}

DeltaReport compare(const std::vector<MetricsSummary>& baseline, const std::vector<MetricsSummary>& candidate,
                    const std::map<std::string, std::string>& pairing) {
  std::map<std::pair<std::string, int>, const MetricsSummary*> base;
  for (const auto& s : baseline) base[{s.model_id, s.k}] = &s;

  DeltaReport report;
  std::set<std::pair<std::string, int>> used;
  std::vector<std::string> missing;
  for (const auto& c : candidate) {
    auto it = pairing.find(c.model_id);
    std::pair<std::string, int> key{it == pairing.end() ? c.model_id : it->second, c.k};
    auto b = base.find(key);
    if (b == base.end()) {
      missing.push_back("baseline has no (" + key.first + ", k=" + std::to_string(key.second) + ")");
      continue;
    }
    used.insert(key);
    report.entries.push_back({c.model_id, key.first, c.k, relative_delta(b->second->pass_frac, c.pass_frac),
                              relative_delta(b->second->fail_frac, c.fail_frac),
                              relative_delta(b->second->error_frac, c.error_frac)});
  }
  for (const auto& [key, s] : base) {
    if (!used.count(key)) {
      missing.push_back("candidate has no match for (" + key.first + ", k=" + std::to_string(key.second) + ")");
    }
  }
  if (!missing.empty()) {
    std::string msg = "summary keys differ: ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? "; " : "") + missing[i];
    throw KeyMismatch(msg);
  }
  return report;
}

ordered_json DeltaReport::to_json() const {
  ordered_json out = ordered_json::array();
  auto delta_json = [](const Delta& d) {
    ordered_json j{{"baseline", d.baseline}, {"candidate", d.candidate}};
    if (d.relative_pct) {
      j["relative_pct"] = *d.relative_pct;
    } else {
      j["relative_pct"] = nullptr;
      j["note"] = "undefined (zero baseline)";
    }
    return j;
  };
  for (const auto& e : entries) {
    out.push_back({{"model", e.model_id},
                   {"baseline_model", e.baseline_model_id},
                   {"k", e.k},
                   {"pass", delta_json(e.pass)},
                   {"fail", delta_json(e.fail)},
                   {"error", delta_json(e.error)}});
  }
  return out;
}

std::string DeltaReport::to_text() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-20s %3s  %-26s %-26s %-26s\n", "model", "baseline", "k", "pass", "fail",
                "error");
  out << buf;
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%-20s %-20s %3d  %-26s %-26s %-26s\n", e.model_id.c_str(),
                  e.baseline_model_id.c_str(), e.k, e.pass.describe().c_str(), e.fail.describe().c_str(),
                  e.error.describe().c_str());
    out << buf;
  }
  return out.str();
}

std::vector<EvalRecord> read_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(n) + ": malformed record: " + e.what());
    }
  }
  return out;
}

}  // namespace svabench
