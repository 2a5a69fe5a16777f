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

#ifndef TRACETYPE_SYSTEMS_HPP_
#define TRACETYPE_SYSTEMS_HPP_

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracetype/framework.hpp"
#include "tracetype/types.hpp"

namespace tracetype {

class UnknownSystem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoMatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sub/base, sub/poly, sub/intersect, union/base, union/poly,
// union/intersect, fixed-layout.
const std::vector<std::string>& system_names();
std::unique_ptr<TypeSystem> make_system(std::string_view name);
// Flow-sensitive, no assignment propagation, union lattice; used for
// tag-test detection.
std::unique_ptr<TypeSystem> make_tagtest_system();

using LubFn = std::function<Type(const Type&, const Type&)>;

// Pointwise covariant join. Arity is the maximum seen; slots missing from
// an invocation do not contribute. No invocations give an uncalled type.
Type lub_fn_base(std::span<const FuncSig> invocations, const LubFn& lub);

// Intersection of the distinct invocation signatures.
Type lub_fn_intersect(std::span<const FuncSig> invocations);

struct PolyLimits {
  std::size_t max_params = 4;
  std::size_t max_vars = 3;
  std::size_t max_openings = 6;  // object slots opened one level
};

// Most general signature (by number of type-variable occurrences) that
// every invocation instantiates; falls back to lub_fn_base when none exists.
Type lub_fn_poly(std::span<const FuncSig> invocations, const LubFn& lub,
                 const PolyLimits& limits = {});

// Every signature obtained from sig by replacing subsets of occurrences of
// one concrete type with a type variable, for up to max_vars types, looking
// one level into object-typed slots. The receiver takes part only when it is
// not Undefined. Includes sig itself.
std::vector<FuncSig> enumerate_candidates(const FuncSig& sig, const PolyLimits& limits = {});

// Renames type variables 0, 1, ... by first appearance.
FuncSig canonical_vars(const FuncSig& sig);
bool equal_up_to_renaming(const FuncSig& a, const FuncSig& b);
std::size_t generality_score(const FuncSig& sig);  // type-variable occurrences
std::size_t type_var_count(const FuncSig& sig);
// Every type variable occurs at least twice.
bool admissible(const FuncSig& sig);
// Higher score, then fewer variables, then smaller rendering.
bool better_candidate(const FuncSig& a, const FuncSig& b);

// Instantiation of a generalized function type for one invocation, rendered
// "E=...;F=..."; empty when the type has no type variables.
std::string poly_context_key(const FuncSig& invocation, const Type& generalized);

Type ascribe_fixed_layout(const ShapeMap& shape, AscriptionContext& ctx);

}  // namespace tracetype

#endif  // TRACETYPE_SYSTEMS_HPP_
