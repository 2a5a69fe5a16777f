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

#include "test_support.hpp"
#include "tracetype/framework.hpp"
#include "tracetype/systems.hpp"

namespace tracetype {
namespace {

FuncSig sig(std::vector<Type> params, Type ret, Type receiver = Type::undefined()) {
  FuncSig s;
  s.receiver = std::move(receiver);
  s.params = std::move(params);
  s.ret = std::move(ret);
  return s;
}

Type lub(const Type& a, const Type& b) { return lub_subtyping(a, b); }

TEST(Systems, Names) {
  EXPECT_EQ(system_names().size(), 7u);
  for (const auto& n : system_names()) EXPECT_EQ(make_system(n)->name(), n);
  EXPECT_THROW(make_system("sub/nope"), UnknownSystem);
  EXPECT_THROW(make_system(""), UnknownSystem);
}

TEST(Systems, IdentityGeneralizes) {
  std::vector<FuncSig> invs{sig({Type::number()}, Type::number()),
                            sig({Type::boolean()}, Type::boolean())};
  EXPECT_EQ(render(lub_fn_poly(invs, lub)), "<(E) -> E>");
}

TEST(Systems, EnumerationOfNumberToNumber) {
  auto cands = enumerate_candidates(sig({Type::number()}, Type::number()));
  std::vector<std::string> rendered;
  for (const auto& c : cands) rendered.push_back(render(c));
  std::sort(rendered.begin(), rendered.end());
  EXPECT_EQ(rendered, (std::vector<std::string>{"(E) -> E", "(E) -> Number", "(Number) -> E",
                                                "(Number) -> Number"}));
}

TEST(Systems, SingleInvocationLinksOccurrences) {
  std::vector<FuncSig> invs{sig({Type::number()}, Type::number())};
  EXPECT_EQ(render(lub_fn_poly(invs, lub)), "<(E) -> E>");
}

TEST(Systems, NoAdmissibleCandidateFallsBackToBase) {
  std::vector<FuncSig> invs{sig({Type::number()}, Type::string()),
                            sig({Type::boolean()}, Type::string())};
  EXPECT_TRUE(type_equal(lub_fn_poly(invs, lub), lub_fn_base(invs, lub)));
  EXPECT_EQ(render(lub_fn_base(invs, lub)), "<(Top) -> String>");
}

TEST(Systems, BaseIsPointwiseCovariant) {
  Type p = Type::object({{"p", Type::number()}});
  Type pq = Type::object({{"p", Type::number()}, {"q", Type::string()}});
  std::vector<FuncSig> invs{sig({p}, Type::undefined()), sig({pq}, Type::undefined())};
  EXPECT_EQ(render(lub_fn_base(invs, lub)), "<({p: Number}) -> Undefined>");
  EXPECT_TRUE(lub_fn_base({}, lub).uncalled());
  // A missing trailing argument does not contribute.
  std::vector<FuncSig> ragged{sig({Type::number(), Type::string()}, Type::null()),
                              sig({Type::number()}, Type::null())};
  EXPECT_EQ(render(lub_fn_base(ragged, lub)), "<(Number, String) -> Null>");
}

TEST(Systems, CanonicalRenaming) {
  FuncSig a = sig({Type::type_var(4)}, Type::type_var(4));
  FuncSig b = sig({Type::type_var(0)}, Type::type_var(0));
  EXPECT_TRUE(equal_up_to_renaming(a, b));
  EXPECT_EQ(generality_score(a), 2u);
  EXPECT_EQ(type_var_count(a), 1u);
  EXPECT_TRUE(admissible(a));
  EXPECT_FALSE(admissible(sig({Type::type_var(0)}, Type::number())));
  EXPECT_TRUE(better_candidate(b, sig({Type::type_var(0)}, Type::number())));
}

TEST(Systems, ContextKeys) {
  Type id = Type::function(sig({Type::type_var(0)}, Type::type_var(0)));
  EXPECT_EQ(poly_context_key(sig({Type::number()}, Type::number()), id), "E=Number");
  Type mono = Type::function(sig({Type::number()}, Type::number()));
  EXPECT_EQ(poly_context_key(sig({Type::number()}, Type::number()), mono), "");
  EXPECT_THROW(poly_context_key(sig({Type::number()}, Type::string()), id), NoMatch);
}

TEST(Systems, OverviewCallsGetDistinctContexts) {
  auto rec = testing::record("polymorphism_overview.mdyn");
  auto sys = make_system("sub/poly");
  TypedTrace t = type_trace(rec.trace, *sys);
  EXPECT_EQ(t.frame_context.at("g_1"), "g|E={p: Number, q: String}");
  EXPECT_EQ(t.frame_context.at("g_2"), "g|E={q: String, r: Boolean}");
  EXPECT_EQ(t.frame_context.at("f_1"), t.frame_context.at("f_2"));
}

TEST(Systems, IntersectionDeduplicates) {
  FuncSig a = sig({Type::number()}, Type::number());
  FuncSig b = sig({Type::string()}, Type::number());
  EXPECT_EQ(render(lub_fn_intersect(std::vector<FuncSig>{a, a})), "<(Number) -> Number>");
  EXPECT_EQ(render(lub_fn_intersect(std::vector<FuncSig>{a, b, a})),
            "<(Number) -> Number ∧ (String) -> Number>");
}

TEST(Systems, InversionUnderIntersect) {
  auto rec = testing::record("inversion.mdyn");
  auto base = make_system("sub/base");
  EXPECT_EQ(typecheck_trace(type_trace(rec.trace, *base)).error_locations(), 0u);
  auto inter = make_system("sub/intersect");
  ErrorReport r = typecheck_trace(type_trace(rec.trace, *inter));
  ASSERT_EQ(r.error_locations(), 1u);
  EXPECT_EQ(r.entries().begin()->first.line, 6u);
  EXPECT_EQ(r.count(ErrorKind::kCallIncompat), 1u);
}

TEST(Systems, FixedLayoutClassification) {
  auto rec = testing::record("fixed_layout.mdyn");
  auto sys = make_system("fixed-layout");
  TypedTrace t = type_trace(rec.trace, *sys);
  auto o2 = *object_id(t.eval.value(*rec.trace.find({"o2", 0, "G"})));
  const ShapeMap& s = t.shapes[o2];
  EXPECT_EQ(s.readwrite, (std::set<std::string>{"b"}));
  EXPECT_EQ(s.readonly, (std::set<std::string>{"a", "m"}));
  auto o1 = *object_id(t.eval.value(*rec.trace.find({"o1", 0, "G"})));
  EXPECT_TRUE(t.shapes[o1].readonly.empty());
  ErrorReport r = typecheck_trace(t);
  EXPECT_EQ(r.layout_row(), "1/3,0/1,0/0");
}

ErrorReport fixed_layout_report(const std::string& src) {
  auto rec = testing::record_source(src);
  EXPECT_FALSE(rec.error);
  auto sys = make_system("fixed-layout");
  return typecheck_trace(type_trace(rec.trace, *sys));
}

TEST(Systems, ShadowingWithDifferentType) {
  ErrorReport r = fixed_layout_report("var p = {a: 1};\nvar c = {a: \"s\"} proto p;\n");
  ASSERT_TRUE(r.layout);
  EXPECT_EQ(r.layout->inheritance_errors, 1u);
  EXPECT_EQ(r.layout->inheritance_total, 1u);
  EXPECT_EQ(r.layout->prototypal_errors, 0u);
  EXPECT_EQ(r.count(ErrorKind::kShadowIncompat), 1u);
}

TEST(Systems, ConsistentShadowingIsFine) {
  ErrorReport r = fixed_layout_report("var p = {a: 1};\nvar c = {a: 2} proto p;\n");
  EXPECT_EQ(r.layout->inheritance_errors, 0u);
  EXPECT_EQ(r.layout->inheritance_total, 1u);
}

TEST(Systems, PostInitialisationAddIsFlagged) {
  ErrorReport r = fixed_layout_report("var o = {a: 1};\no.b = 2;\n");
  EXPECT_EQ(r.layout->ro_rw_errors, 1u);
  EXPECT_EQ(r.layout->ro_rw_total, 2u);
  ASSERT_EQ(r.error_locations(), 1u);
  EXPECT_EQ(r.entries().begin()->first.line, 2u);
}

TEST(Systems, GridNames) {
  EXPECT_EQ(make_system("union/intersect")->merge().context, Context::kSensitive);
  EXPECT_EQ(make_system("sub/base")->merge().flow, Flow::kInsensitive);
  auto tag = make_tagtest_system();
  EXPECT_EQ(tag->merge().flow, Flow::kSensitive);
  EXPECT_FALSE(tag->merge().propagate_assignments);
}

}  // namespace
}  // namespace tracetype
