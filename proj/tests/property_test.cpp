// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "support/properties.hpp"

using namespace svabench;
using namespace svabench::testing;

TEST(Properties, DesignRoundTrip) {
  Campaign c = design_round_trip(250, 11);
  EXPECT_EQ(c.failures, 0) << c.summary();
}

TEST(Properties, AssertionRoundTrip) {
  Campaign c = assertion_round_trip(1500, 12);
  EXPECT_EQ(c.failures, 0) << c.summary();
}

TEST(Properties, OracleEquivalence) {
  Campaign c = oracle_equivalence(1200, 13);
  EXPECT_EQ(c.failures, 0) << c.summary();
  // The campaign must exercise every verdict the checker can reach.
  EXPECT_GT(c.tally["Valid"], 0) << c.summary();
  EXPECT_GT(c.tally["Cex"], 0) << c.summary();
  EXPECT_GT(c.tally["Vacuous"], 0) << c.summary();
}

TEST(Properties, DesugarLaw) {
  Campaign c = desugar_law(600, 14);
  EXPECT_EQ(c.failures, 0) << c.summary();
}

TEST(Properties, ContradictoryAntecedentIsVacuous) {
  Campaign c = contradictory_vacuity(300, 15);
  EXPECT_EQ(c.failures, 0) << c.summary();
}

TEST(Properties, ElaborationDeterministic) {
  DesignGenerator gen(16);
  for (int i = 0; i < 50; ++i) {
    Design d = gen.next(oracle_design_shape());
    TransitionSystem a = elaborate(d);
    TransitionSystem b = elaborate(d);
    auto inputs = all_input_valuations(a);
    for (const auto& s : oracle_reach(a, 64).states) {
      for (const auto& in : inputs) {
        ASSERT_EQ(a.observe(s, in), b.observe(s, in));
        ASSERT_EQ(a.next_state(s, in), b.next_state(s, in));
      }
    }
  }
}

namespace {

// Reverses the order of top-level statements in every clocked process.
Design swap_nonblocking(Design d) {
  for (auto& p : d.processes) {
    if (p.kind != ProcessKind::Clocked) continue;
    Stmt* body = &p.body;
    if (body->body.size() == 1 && body->body[0].kind == StmtKind::If && body->body[0].has_else()) {
      body = &body->body[0].body[1];  // the non-reset branch
    }
    if (body->kind == StmtKind::Block) std::reverse(body->body.begin(), body->body.end());
  }
  return d;
}

}  // namespace

TEST(Properties, NonblockingOrderIrrelevant) {
  DesignGenerator gen(17);
  int compared = 0;
  for (int i = 0; i < 80; ++i) {
    Design d = gen.next(oracle_design_shape());
    if (!d.is_sequential()) continue;
    TransitionSystem a = elaborate(d);
    TransitionSystem b = elaborate(swap_nonblocking(d));
    auto inputs = all_input_valuations(a);
    EXPECT_EQ(a.reset_state(), b.reset_state());
    for (std::uint32_t code = 0; code < (1u << a.state_bits()); ++code) {
      Valuation s;
      std::uint32_t rest = code;
      for (const auto& r : a.registers()) {
        s.push_back(rest & ((1u << r.width) - 1u));
        rest >>= r.width;
      }
      for (const auto& in : inputs) ASSERT_EQ(a.next_state(s, in), b.next_state(s, in)) << render_design(d);
    }
    ++compared;
  }
  EXPECT_GT(compared, 20);
}

TEST(Properties, StripIdempotent) {
  Rng rng(18);
  const std::vector<std::string> pieces = {"module", " ", "\n", "\t", "a", ";", "//c\n", "/* b */", "x=1", "  ", "(", ")"};
  for (int i = 0; i < 500; ++i) {
    std::string text;
    int n = rng.between(0, 20);
    for (int k = 0; k < n; ++k) text += rng.pick(pieces);
    std::string once = strip_for_prompt(text);
    EXPECT_EQ(strip_for_prompt(once), once) << text;
    EXPECT_EQ(once.find('\n'), std::string::npos);
    EXPECT_EQ(once.find("  "), std::string::npos);
  }
}
