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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "program_gen.hpp"
#include "test_support.hpp"
#include "tracetype/framework.hpp"
#include "tracetype/systems.hpp"

namespace tracetype {
namespace {

constexpr int kCases = 1000;

// Programs are shared across the checks below; recording is the slow part.
const std::vector<TraceProgram>& traces() {
  static const std::vector<TraceProgram> all = [] {
    std::vector<TraceProgram> out;
    testing::Rng rng(21);
    testing::ProgramGen gen(rng);
    while (out.size() < static_cast<std::size_t>(kCases)) {
      auto r = testing::record_source(gen.program());
      if (r.trace.size() > r.prelude) out.push_back(std::move(r.trace));
    }
    return out;
  }();
  return all;
}

// Systems cycled over the cases so each sees a few hundred traces.
const std::vector<std::string>& systems() { return system_names(); }

std::unique_ptr<TypeSystem> system_for(int i) {
  return make_system(systems()[static_cast<std::size_t>(i) % systems().size()]);
}

TEST(FrameworkProperties, GammaHatDominatesGammaZero) {
  for (int i = 0; i < kCases; ++i) {
    auto sys = system_for(i);
    TypedTrace t = type_trace(traces()[i], *sys);
    for (VarId v = 0; v < t.gamma0.size(); ++v) {
      ASSERT_TRUE(is_subtype(t.gamma0[v], t.gamma_hat(v)))
          << sys->name() << " case " << i << " " << t.trace->var(v).str() << ": "
          << render(t.gamma0[v]) << " not below " << render(t.gamma_hat(v));
    }
  }
}

TEST(FrameworkProperties, ResultIsFixedPoint) {
  for (int i = 0; i < kCases; ++i) {
    auto sys = system_for(i + 3);
    TypedTrace t = type_trace(traces()[i], *sys);
    ASSERT_TRUE(is_fixed_point(t)) << sys->name() << " case " << i;
  }
}

TEST(FrameworkProperties, WorklistOrderDoesNotMatter) {
  for (int i = 0; i < kCases; ++i) {
    auto sys = system_for(i + 5);
    TypedTrace a = type_trace(traces()[i], *sys);
    TypingOptions opt;
    opt.shuffle_seed = 1000 + static_cast<std::uint64_t>(i);
    TypedTrace b = type_trace(traces()[i], *sys, opt);
    for (VarId v = 0; v < a.gamma0.size(); ++v) {
      ASSERT_TRUE(type_equal(a.gamma_hat(v), b.gamma_hat(v)))
          << sys->name() << " case " << i << " " << a.trace->var(v).str() << ": "
          << render(a.gamma_hat(v)) << " vs " << render(b.gamma_hat(v));
    }
    ASSERT_EQ(typecheck_trace(a).to_csv(), typecheck_trace(b).to_csv()) << sys->name();
  }
}

// Forwards to sub/base with flow- and context-sensitive merging and no
// assignment propagation.
class IsolatedSystem : public TypeSystem {
 public:
  IsolatedSystem() : inner_(make_system("sub/base")) {}
  std::string name() const override { return "isolated"; }
  Type lub(const Type& a, const Type& b) const override { return inner_->lub(a, b); }
  Type lub_fn(std::span<const FuncSig> invocations) const override {
    return inner_->lub_fn(invocations);
  }
  MergePolicy merge() const override {
    return MergePolicy{Flow::kSensitive, Context::kSensitive, false};
  }

 private:
  std::unique_ptr<TypeSystem> inner_;
};

// Without merging or assignment propagation only field reads can move a
// variable above its observed type, and then only to the property type of
// the base's observed type.
TEST(FrameworkProperties, IsolatedMergingKeepsGammaZero) {
  IsolatedSystem sys;
  for (int i = 0; i < kCases; ++i) {
    TypedTrace t = type_trace(traces()[i], sys);
    for (VarId v = 0; v < t.gamma0.size(); ++v) {
      Type expected = t.gamma0[v];
      if (const auto& d = t.def_stmt[v]) {
        const auto& w = std::get<VarWrite>((*t.trace)[*d].kind);
        if (const auto* f = std::get_if<FieldRead>(&w.rhs)) {
          if (auto p = property_type(t.gamma0[f->base], f->name)) {
            expected = sys.lub(expected, *p);
          }
        }
      }
      ASSERT_TRUE(type_equal(expected, t.gamma_hat(v)))
          << "case " << i << " " << t.trace->var(v).str() << ": " << render(expected)
          << " vs " << render(t.gamma_hat(v));
    }
  }
}

}  // namespace
}  // namespace tracetype
