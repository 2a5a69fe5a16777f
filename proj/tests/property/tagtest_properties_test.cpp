// Copyright 2026 The tracetype Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <iostream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "program_gen.hpp"
#include "test_support.hpp"
#include "tracetype/systems.hpp"
#include "tracetype/tagtest.hpp"

namespace tracetype {
namespace {

constexpr int kCases = 1000;

// Adds guarded reads of parameters so narrowing has something to find.
std::string with_guards(testing::Rng& rng, std::string src) {
  static const std::vector<std::string> guards{
      "function g(x) {\n  x;\n  if (x instanceof K) {\n    x;\n  }\n  x;\n}\n",
      "function h(x) {\n  var t = typeof x === \"number\";\n  if (t) { x; } else { x; }\n  x;\n}\n",
  };
  static const std::vector<std::string> args{"1", "\"s\"", "new K(1)", "{p: 1}", "v0",
                                             "v1", "null", "[1]"};
  // One contrasting pair per guard, then random extra calls.
  std::string calls = "g(new K(1));\ng(" + args[testing::pick(rng, 2)] + ");\nh(1);\nh(" +
                      args[2 + testing::pick(rng, args.size() - 2)] + ");\n";
  std::size_t n = testing::pick(rng, 3);
  for (std::size_t i = 0; i < n; ++i) {
    calls += (testing::coin(rng) ? "g(" : "h(") + args[testing::pick(rng, args.size())] + ");\n";
  }
  return guards[0] + guards[1] + calls + src;
}

struct Case {
  TraceProgram trace;
  TypedTrace typed;
  TagTestResult result;
};

const std::vector<Case>& cases() {
  static const std::vector<Case> all = [] {
    std::vector<Case> out;
    testing::Rng rng(41);
    testing::ProgramGen gen(rng);
    auto sys = make_tagtest_system();
    out.reserve(kCases);
    while (out.size() < static_cast<std::size_t>(kCases)) {
      auto r = testing::record_source(with_guards(rng, gen.program()));
      out.push_back(Case{std::move(r.trace), {}, {}});
      Case& c = out.back();
      c.typed = type_trace(c.trace, *sys);
      c.result = detect_tag_tests(c.typed);
    }
    return out;
  }();
  return all;
}

bool is_read(const TraceProgram& t, std::size_t i, const std::string& name,
             const std::string& frame) {
  const auto* w = std::get_if<VarWrite>(&t[i].kind);
  if (!w) return false;
  const auto* r = std::get_if<VarRead>(&w->rhs);
  const auto& lhs = t.var(w->lhs);
  return r && lhs.name == name && lhs.frame == frame && t.var(r->var).name == name &&
         t.var(r->var).frame == frame;
}

bool writes(const TraceProgram& t, std::size_t i, const std::string& name,
            const std::string& frame) {
  const auto* w = std::get_if<VarWrite>(&t[i].kind);
  return w && t.var(w->lhs).name == name && t.var(w->lhs).frame == frame;
}

TEST(TagTestProperties, CandidatesNarrowStrictly) {
  std::size_t total = 0;
  for (const auto& c : cases()) {
    for (const auto& cand : c.result.raw) {
      ASSERT_TRUE(is_subtype(cand.narrow, cand.wide)) << render(cand.narrow) << " vs " << render(cand.wide);
      ASSERT_FALSE(type_equal(cand.narrow, cand.wide)) << render(cand.wide);
      ++total;
    }
  }
  std::cout << total << " raw candidates\n";
  EXPECT_GT(total, static_cast<std::size_t>(kCases));
}

TEST(TagTestProperties, NoWriteBetweenReads) {
  for (const auto& c : cases()) {
    for (const auto& cand : c.result.raw) {
      ASSERT_TRUE(is_read(c.trace, cand.wide_stmt, cand.var, cand.frame));
      ASSERT_TRUE(is_read(c.trace, cand.narrow_stmt, cand.var, cand.frame));
      for (std::size_t i = cand.wide_stmt + 1; i < cand.narrow_stmt; ++i) {
        ASSERT_FALSE(writes(c.trace, i, cand.var, cand.frame))
            << cand.var << "@" << cand.frame << " written at statement " << i;
      }
    }
  }
}

// Independent scan of adjacent read pairs over the propagated environment.
TEST(TagTestProperties, MatchesAdjacentReadOracle) {
  for (const auto& c : cases()) {
    const TraceProgram& t = c.trace;
    std::map<std::pair<std::string, std::string>, std::optional<std::size_t>> last;
    std::vector<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto* w = std::get_if<VarWrite>(&t[i].kind);
      if (!w) continue;
      const auto& lhs = t.var(w->lhs);
      if (lhs.name.starts_with("$") || lhs.frame == "N") continue;
      auto key = std::make_pair(lhs.name, lhs.frame);
      if (!is_read(t, i, lhs.name, lhs.frame)) {
        last[key].reset();
        continue;
      }
      if (auto prev = last[key]) {
        auto pv = *t.defined_var(*prev);
        const Type& wide = c.typed.gamma_hat(pv);
        const Type& narrow = c.typed.gamma_hat(w->lhs);
        if (is_subtype(narrow, wide) && !type_equal(narrow, wide)) expected.emplace_back(*prev, i);
      }
      last[key] = i;
    }
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const auto& cand : c.result.raw) got.emplace_back(cand.wide_stmt, cand.narrow_stmt);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(got, expected);

    // Deduplication keeps the first candidate of each location pair.
    std::set<std::pair<SourceLoc, SourceLoc>> seen;
    std::size_t dedup = 0;
    for (const auto& cand : c.result.raw) {
      if (seen.insert({cand.wide_loc, cand.narrow_loc}).second) {
        ASSERT_LT(dedup, c.result.deduplicated.size());
        ASSERT_EQ(c.result.deduplicated[dedup].wide_stmt, cand.wide_stmt);
        ++dedup;
      }
    }
    ASSERT_EQ(dedup, c.result.deduplicated.size());
  }
}

// Copies a trace, inserting `name#999@frame = 0` before statement `at`.
TraceProgram with_write(const TraceProgram& t, std::size_t at, const std::string& name,
                        const std::string& frame) {
  TraceProgram out;
  for (VarId v = 0; v < t.var_count(); ++v) out.intern(t.var(v));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i == at) {
      VarId w = out.intern(TraceVar{name, 999, frame});
      out.append(TraceStatement{VarWrite{w, NumberLit{0}}, t[i].src});
    }
    out.append(t[i]);
  }
  return out;
}

TEST(TagTestProperties, InsertedWriteRemovesCandidate) {
  std::size_t checked = 0;
  for (const auto& c : cases()) {
    if (c.result.raw.empty()) continue;
    const auto& cand = c.result.raw.front();
    TraceProgram t = with_write(c.trace, cand.narrow_stmt, cand.var, cand.frame);
    TagTestResult again = detect_tag_tests(t);
    for (const auto& other : again.raw) {
      ASSERT_FALSE(other.wide_stmt == cand.wide_stmt && other.narrow_stmt == cand.narrow_stmt + 1)
          << cand.var << "@" << cand.frame;
    }
    ++checked;
  }
  EXPECT_GT(checked, static_cast<std::size_t>(kCases / 2));
}

}  // namespace
}  // namespace tracetype
