// SPDX-License-Identifier: Apache-2.0
#include "svabench/benchmark.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "svabench/assertion.hpp"
#include "svabench/transition_system.hpp"
#include "svabench/verilog.hpp"

namespace svabench {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw UnreadableFile("error reading " + path.string());
  return ss.str();
}

std::optional<DesignKind> kind_from_string(std::string_view text) {
  if (text == "combinational") return DesignKind::Combinational;
  if (text == "sequential") return DesignKind::Sequential;
  return std::nullopt;
}

BenchmarkEntry load_entry(const fs::path& dir, bool golden_required) {
  BenchmarkEntry e;
  e.name = dir.filename().string();
  e.design_path = dir / (e.name + ".v");
  if (!fs::is_regular_file(e.design_path)) throw UnreadableFile("missing design file " + e.design_path.string());
  const std::string source = read_file(e.design_path);
  e.line_count = count_code_lines(source);

  const fs::path golden = dir / (e.name + ".sva");
  if (fs::exists(golden)) {
    e.golden_assertions = split_assertion_file(read_file(golden));
  } else if (golden_required) {
    throw UnreadableFile("training design " + e.name + " has no golden file " + golden.string());
  }

  const fs::path meta = dir / (e.name + ".json");
  if (fs::exists(meta)) {
    auto doc = nlohmann::json::parse(read_file(meta), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw UnreadableFile("malformed metadata " + meta.string());
    e.description = doc.value("description", "");
    e.source = doc.value("source", "");
    if (doc.contains("kind")) e.declared_kind = kind_from_string(doc.value("kind", ""));
  }

  try {
    Design d = parse_design(source);
    e.design_kind = d.registers().empty() ? DesignKind::Combinational : DesignKind::Sequential;
  } catch (const Error& err) {
    e.unsupported = err.what();
    e.design_kind = e.declared_kind.value_or(DesignKind::Combinational);
  }
  return e;
}

std::vector<BenchmarkEntry> load_split(const fs::path& dir, bool golden_required) {
  std::vector<BenchmarkEntry> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_directory()) out.push_back(load_entry(it->path(), golden_required));
  }
  if (ec) throw UnreadableFile("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

AssertionStats stats_of(std::string scope, const std::vector<int>& counts) {
  AssertionStats s;
  s.scope = std::move(scope);
  s.designs = static_cast<int>(counts.size());
  if (counts.empty()) return s;
  s.min = *std::min_element(counts.begin(), counts.end());
  s.max = *std::max_element(counts.begin(), counts.end());
  s.mean = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0)) / static_cast<double>(counts.size());
  return s;
}

nlohmann::ordered_json stats_json(const AssertionStats& s) {
  return {{"scope", s.scope}, {"designs", s.designs}, {"min", s.min}, {"max", s.max}, {"mean", s.mean},
          {"reference", {{"min", kMinGoldenPerDesign}, {"max", kMaxGoldenPerDesign}, {"mean", kReferenceMeanGolden}}}};
}

void check_entry(const BenchmarkEntry& e, const std::string& split, const CheckConfig& cfg, ValidationReport& report) {
  EntryReport r;
  r.name = e.name;
  r.split = split;
  r.kind = e.design_kind;
  r.line_count = e.line_count;
  r.golden = static_cast<int>(e.golden_assertions.size());
  auto violation = [&](std::string msg) { report.violations.push_back({e.name, std::move(msg)}); };
  auto note = [&](const std::string& msg) {
    if (std::find(r.notes.begin(), r.notes.end(), msg) == r.notes.end()) r.notes.push_back(msg);
  };

  if (split == "train" || r.golden > 0) {
    if (r.golden < kMinGoldenPerDesign || r.golden > kMaxGoldenPerDesign) {
      violation(std::to_string(r.golden) + " golden assertions, outside [" + std::to_string(kMinGoldenPerDesign) + ", " +
                std::to_string(kMaxGoldenPerDesign) + "]");
    }
  }
  if (e.declared_kind && e.supported() && *e.declared_kind != e.design_kind) {
    violation("metadata kind " + std::string(to_string(*e.declared_kind)) + " but design is " +
              std::string(to_string(e.design_kind)));
  }
  if (!e.supported()) {
    violation("unsupported design: " + e.unsupported);
    note("unsupported");
    report.entries.push_back(std::move(r));
    return;
  }

  std::optional<Checker> checker;
  try {
    checker.emplace(elaborate(parse_design(read_file(e.design_path))), cfg);
  } catch (const Error& err) {
    violation(std::string("design does not elaborate: ") + err.what());
    report.entries.push_back(std::move(r));
    return;
  }
  for (const auto& text : e.golden_assertions) {
    Verdict v = checker->check_text(text);
    switch (classify(v)) {
      case Outcome::Pass: ++r.pass; break;
      case Outcome::Fail: violation("golden not valid: " + text); break;
      case Outcome::Error:
        if (v.error == ErrorClass::BudgetExceeded) {
          note("verify-skipped: budget");
        } else if (v.error == ErrorClass::Inconclusive) {
          note("verify-skipped: inconclusive");
        } else {
          violation("golden does not check (" + std::string(to_string(v.error)) + ": " + v.detail + "): " + text);
        }
        break;
    }
  }
  report.entries.push_back(std::move(r));
}

}  // namespace

std::string_view to_string(DesignKind kind) {
  return kind == DesignKind::Sequential ? "sequential" : "combinational";
}

const BenchmarkEntry* Benchmark::find(std::string_view name) const {
  for (const auto* list : {&train, &test}) {
    for (const auto& e : *list) {
      if (e.name == name) return &e;
    }
  }
  return nullptr;
}

int count_code_lines(std::string_view source) {
  int count = 0;
  bool in_block = false;
  bool code = false;
  for (std::size_t i = 0; i <= source.size(); ++i) {
    if (i == source.size() || source[i] == '\n') {
      if (code) ++count;
      code = false;
      continue;
    }
    char c = source[i];
    if (in_block) {
      if (c == '*' && i + 1 < source.size() && source[i + 1] == '/') {
        in_block = false;
        ++i;
      }
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i + 1 < source.size() && source[i + 1] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
      in_block = true;
      ++i;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) code = true;
  }
  return count;
}

Benchmark load_benchmark(const fs::path& root) {
  Benchmark b;
  b.root = root;
  for (const char* sub : {"train", "test"}) {
    if (!fs::is_directory(root / sub)) throw MissingDirectory("benchmark root " + root.string() + " has no " + sub + "/");
  }
  b.train = load_split(root / "train", true);
  b.test = load_split(root / "test", false);
  std::map<std::string, int> seen;
  for (const auto* list : {&b.train, &b.test}) {
    for (const auto& e : *list) {
      if (++seen[e.name] > 1) throw DuplicateName("design '" + e.name + "' appears in both train/ and test/");
    }
  }
  return b;
}

ValidationReport validate(const Benchmark& b, const CheckConfig& cfg) {
  ValidationReport report;
  std::vector<int> pool;
  std::vector<int> all;
  for (const auto& e : b.train) {
    check_entry(e, "train", cfg, report);
    pool.push_back(static_cast<int>(e.golden_assertions.size()));
    all.push_back(pool.back());
  }
  for (const auto& e : b.test) {
    check_entry(e, "test", cfg, report);
    if (!e.golden_assertions.empty()) all.push_back(static_cast<int>(e.golden_assertions.size()));
  }
  report.ice_pool = stats_of("ice-pool", pool);
  report.all_golden = stats_of("all-golden", all);
  return report;
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json out;
  out["ok"] = ok();
  out["statistics"] = {stats_json(ice_pool), stats_json(all_golden)};
  auto& entries_json = out["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    entries_json.push_back({{"name", e.name},
                            {"split", e.split},
                            {"kind", to_string(e.kind)},
                            {"lines", e.line_count},
                            {"golden", e.golden},
                            {"pass", e.pass},
                            {"notes", e.notes}});
  }
  auto& violations_json = out["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) violations_json.push_back({{"design", v.design}, {"message", v.message}});
  return out;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  char buf[160];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%-5s %-24s %-13s %4d lines  %2d/%-2d golden pass", e.split.c_str(), e.name.c_str(),
                  std::string(to_string(e.kind)).c_str(), e.line_count, e.pass, e.golden);
    out << buf;
    for (const auto& n : e.notes) out << "  [" << n << "]";
    out << "\n";
  }
  for (const auto* s : {&ice_pool, &all_golden}) {
    std::snprintf(buf, sizeof buf, "%s: %d designs, assertions/design min %d max %d mean %.2f (reference %d..%d, mean %.1f)\n",
                  s->scope.c_str(), s->designs, s->min, s->max, s->mean, kMinGoldenPerDesign, kMaxGoldenPerDesign,
                  kReferenceMeanGolden);
    out << buf;
  }
  if (violations.empty()) {
    out << "no violations\n";
  } else {
    out << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << ":\n";
    for (const auto& v : violations) out << "  " << v.design << ": " << v.message << "\n";
  }
  return out.str();
}

IceTuple make_ice(const BenchmarkEntry& entry) {
  IceTuple ice;
  ice.name = entry.name;
  ice.design_text = strip_for_prompt(read_file(entry.design_path));
  for (const auto& a : entry.golden_assertions) ice.assertions.push_back(strip_for_prompt(a));
  return ice;
}

std::vector<IceTuple> select_ices(const Benchmark& b, std::size_t k, std::uint64_t seed) {
  if (k > b.train.size()) {
    throw InsufficientExamples("requested " + std::to_string(k) + " in-context examples but the pool has " +
                               std::to_string(b.train.size()));
  }
  std::vector<const BenchmarkEntry*> pool;
  for (const auto& e : b.train) pool.push_back(&e);
  std::sort(pool.begin(), pool.end(), [](auto* x, auto* y) { return x->name < y->name; });
  seeded_shuffle(pool, seed);
  pool.resize(k);
  std::sort(pool.begin(), pool.end(), [](auto* x, auto* y) { return x->name < y->name; });
  std::vector<IceTuple> out;
  for (const auto* e : pool) out.push_back(make_ice(*e));
  return out;
}

}  // namespace svabench
