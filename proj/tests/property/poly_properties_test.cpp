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
#include <optional>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tracetype/systems.hpp"
#include "tracetype/types.hpp"

namespace tracetype {
namespace {

using testing::coin;
using testing::pick;
using testing::Rng;

constexpr int kCases = 1200;
constexpr std::uint32_t kMaxVars = 3;

const std::vector<Type>& pool() {
  static const std::vector<Type> types{
      Type::number(),
      Type::boolean(),
      Type::string(),
      Type::undefined(),
      Type::object({{"p", Type::number()}}),
      Type::object({{"p", Type::boolean()}}),
      Type::object({{"p", Type::number()}, {"q", Type::string()}}),
      Type::object({{"p", Type::number()}, {"q", Type::number()}}),
  };
  return types;
}

Type& slot(FuncSig& s, std::size_t i) {
  if (i == 0) return s.receiver;
  if (i <= s.params.size()) return s.params[i - 1];
  return s.ret;
}
const Type& slot(const FuncSig& s, std::size_t i) { return slot(const_cast<FuncSig&>(s), i); }
std::size_t slots(const FuncSig& s) { return s.params.size() + 2; }

// Independent statement of what a candidate means for one invocation:
// concrete parts agree, each variable stands for one type, and distinct
// variables stand for distinct types.
bool instantiates(const FuncSig& pattern, const FuncSig& inv) {
  if (pattern.params.size() != inv.params.size()) return false;
  std::map<std::uint32_t, Type> bound;
  auto bind = [&](std::uint32_t v, const Type& t) {
    auto [it, fresh] = bound.emplace(v, t);
    return fresh || type_equal(it->second, t);
  };
  for (std::size_t i = 0; i < slots(pattern); ++i) {
    const Type& p = slot(pattern, i);
    const Type& c = slot(inv, i);
    if (p.is(TypeKind::kTypeVar)) {
      if (!bind(p.var_id(), c)) return false;
    } else if (p.is(TypeKind::kObject) && has_type_vars(p)) {
      if (!c.is(TypeKind::kObject) || c.props().size() != p.props().size()) return false;
      for (const auto& [name, pt] : p.props()) {
        auto it = c.props().find(name);
        if (it == c.props().end()) return false;
        if (pt.is(TypeKind::kTypeVar)) {
          if (!bind(pt.var_id(), it->second)) return false;
        } else if (!type_equal(pt, it->second)) {
          return false;
        }
      }
    } else if (!type_equal(p, c)) {
      return false;
    }
  }
  for (auto a = bound.begin(); a != bound.end(); ++a) {
    for (auto b = std::next(a); b != bound.end(); ++b) {
      if (type_equal(a->second, b->second)) return false;
    }
  }
  return true;
}

std::map<std::uint32_t, std::size_t> occurrences(const FuncSig& s) {
  std::map<std::uint32_t, std::size_t> n;
  auto visit = [&](const Type& t) {
    if (t.is(TypeKind::kTypeVar)) ++n[t.var_id()];
    if (t.is(TypeKind::kObject)) {
      for (const auto& [name, pt] : t.props()) {
        if (pt.is(TypeKind::kTypeVar)) ++n[pt.var_id()];
      }
    }
  };
  for (std::size_t i = 0; i < slots(s); ++i) visit(slot(s, i));
  return n;
}

struct OracleResult {
  bool any = false;  // some admissible candidate instantiates every invocation
  std::size_t best_score = 0;
};

// Brute force over every pattern built from the first invocation: each slot
// stays concrete, becomes a variable, or (for objects) has its properties
// individually replaced.
OracleResult exhaustive(const std::vector<FuncSig>& invs) {
  const FuncSig& first = invs.front();
  bool receiver_open = true;
  for (const auto& inv : invs) receiver_open = receiver_open && !inv.receiver.is(TypeKind::kUndefined);

  std::vector<std::vector<Type>> options(slots(first));
  for (std::size_t i = 0; i < slots(first); ++i) {
    const Type& t = slot(first, i);
    options[i].push_back(t);
    if (i == 0 && !receiver_open) continue;
    for (std::uint32_t v = 0; v < kMaxVars; ++v) options[i].push_back(Type::type_var(v));
    if (!t.is(TypeKind::kObject)) continue;
    std::vector<std::string> names;
    for (const auto& [name, pt] : t.props()) names.push_back(name);
    std::size_t combos = 1;
    for (std::size_t k = 0; k < names.size(); ++k) combos *= kMaxVars + 1;
    for (std::size_t c = 1; c < combos; ++c) {
      std::map<std::string, Type> props;
      std::size_t code = c;
      for (const auto& name : names) {
        std::size_t choice = code % (kMaxVars + 1);
        code /= kMaxVars + 1;
        props[name] = choice == 0 ? t.props().at(name)
                                  : Type::type_var(static_cast<std::uint32_t>(choice - 1));
      }
      options[i].push_back(Type::object(std::move(props)));
    }
  }

  OracleResult out;
  FuncSig cand = first;
  std::vector<std::size_t> pick_idx(options.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < options.size(); ++i) slot(cand, i) = options[i][pick_idx[i]];
    auto occ = occurrences(cand);
    bool ok = true;
    std::size_t score = 0;
    for (const auto& [v, n] : occ) {
      ok = ok && n >= 2;
      score += n;
    }
    for (const auto& inv : invs) ok = ok && instantiates(cand, inv);
    if (ok) {
      out.any = true;
      out.best_score = std::max(out.best_score, score);
    }
    std::size_t i = 0;
    while (i < options.size() && ++pick_idx[i] == options[i].size()) pick_idx[i++] = 0;
    if (i == options.size()) break;
  }
  return out;
}

FuncSig instantiate(const FuncSig& pattern, const std::vector<Type>& with) {
  std::map<std::uint32_t, Type> m;
  for (std::uint32_t v = 0; v < with.size(); ++v) m[v] = with[v];
  return substitute_type_vars(pattern, m);
}

// Invocations drawn as instances of one random template, with occasional
// unrelated noise, so both generalizable and hopeless sets occur.
std::vector<FuncSig> gen_invocations(Rng& rng) {
  const auto& types = pool();
  auto part = [&](bool allow_var) {
    if (allow_var && coin(rng, 0.45)) return Type::type_var(static_cast<std::uint32_t>(pick(rng, 2)));
    if (allow_var && coin(rng, 0.15)) {
      return Type::object({{"p", Type::type_var(static_cast<std::uint32_t>(pick(rng, 2)))},
                           {"q", types[pick(rng, 3)]}});
    }
    return types[pick(rng, types.size())];
  };
  FuncSig tmpl;
  std::size_t arity = pick(rng, 3);
  bool receiver = arity < 2 && coin(rng, 0.3);
  tmpl.receiver = receiver ? part(true) : Type::undefined();
  for (std::size_t i = 0; i < arity; ++i) tmpl.params.push_back(part(true));
  tmpl.ret = part(true);

  std::vector<FuncSig> invs;
  std::size_t n = 1 + pick(rng, 3);
  for (std::size_t k = 0; k < n; ++k) {
    FuncSig inv = instantiate(tmpl, {types[pick(rng, types.size())], types[pick(rng, types.size())]});
    if (coin(rng, 0.1)) slot(inv, 1 + pick(rng, slots(inv) - 1)) = types[pick(rng, types.size())];
    if (inv.receiver.is(TypeKind::kUndefined) && receiver) inv.receiver = types[0];
    invs.push_back(std::move(inv));
  }
  return invs;
}

Type lub(const Type& a, const Type& b) { return lub_subtyping(a, b); }

TEST(PolyProperties, DirectMatchesExhaustiveOracle) {
  Rng rng(31);
  int generalized = 0;
  for (int i = 0; i < kCases; ++i) {
    auto invs = gen_invocations(rng);
    Type got = lub_fn_poly(invs, lub);
    OracleResult oracle = exhaustive(invs);
    std::string ctx = "case " + std::to_string(i) + ": ";
    for (const auto& inv : invs) ctx += render(inv) + "; ";
    ctx += "got " + render(got);

    if (!oracle.any || oracle.best_score == 0) {
      ASSERT_TRUE(type_equal(got, lub_fn_base(invs, lub))) << ctx;
      continue;
    }
    ASSERT_TRUE(got.is(TypeKind::kFunction) && got.signatures().size() == 1) << ctx;
    const FuncSig& sig = got.signatures()[0];
    // Soundness: every invocation is an instance.
    for (const auto& inv : invs) ASSERT_TRUE(instantiates(sig, inv)) << ctx;
    ASSERT_TRUE(admissible(sig)) << ctx;
    // Generality: nothing the oracle finds scores higher.
    ASSERT_EQ(generality_score(sig), oracle.best_score) << ctx;
    ++generalized;
  }
  EXPECT_GT(generalized, kCases / 5);
  std::cout << generalized << " of " << kCases << " cases generalized\n";
}

// Every candidate the enumeration lists instantiates its source signature.
TEST(PolyProperties, EnumeratedCandidatesInstantiateSource) {
  Rng rng(32);
  for (int i = 0; i < kCases; ++i) {
    auto invs = gen_invocations(rng);
    for (const auto& c : enumerate_candidates(invs[0])) {
      ASSERT_TRUE(instantiates(c, invs[0])) << render(invs[0]) << " vs " << render(c);
    }
  }
}

}  // namespace
}  // namespace tracetype
