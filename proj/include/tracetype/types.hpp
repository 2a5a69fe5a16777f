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

#ifndef TRACETYPE_TYPES_HPP_
#define TRACETYPE_TYPES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tracetype {

enum class TypeKind : std::uint8_t {
  kTop,
  kBottom,
  kNumber,
  kBoolean,
  kString,
  kNull,
  kUndefined,
  kObject,
  kFunction,
  kUnion,
  kRec,
  kRecVar,
  kTypeVar,
};

struct FuncSig;

// Read-write / read-only partition of an object's properties, used by the
// fixed-layout system. Both sets together equal the property domain.
struct RwSplit {
  std::set<std::string> readwrite;
  std::set<std::string> readonly;
  bool operator==(const RwSplit&) const = default;
};

// Immutable, cheaply copyable type term. Recursive types use explicit
// binders (Rec) and bound occurrences (RecVar); binder ids are expected to
// be unique per recursive structure.
class Type {
 public:
  struct Node;

  Type();  // Bottom

  static Type top();
  static Type bottom();
  static Type number();
  static Type boolean();
  static Type string();
  static Type null();
  static Type undefined();
  static Type object(std::map<std::string, Type> props, bool precise = false,
                     std::optional<RwSplit> split = std::nullopt);
  static Type function(FuncSig sig);
  // One signature yields a plain function type, more an intersection.
  // Duplicate signatures are removed and the rest ordered canonically.
  static Type intersection(std::vector<FuncSig> sigs);
  static Type uncalled_function();
  // Flattens nested unions and removes duplicates; zero members give
  // Bottom and a single member is returned as is.
  static Type union_of(std::vector<Type> members);
  static Type rec(std::uint32_t binder, Type body);
  static Type rec_var(std::uint32_t binder);
  static Type type_var(std::uint32_t id);

  TypeKind kind() const;
  bool is(TypeKind k) const { return kind() == k; }
  bool is_primitive() const;

  const std::map<std::string, Type>& props() const;
  bool precise() const;
  const std::optional<RwSplit>& rw_split() const;

  std::span<const FuncSig> signatures() const;
  bool uncalled() const;

  std::span<const Type> members() const;

  std::uint32_t binder() const;  // Rec, RecVar
  const Type& body() const;      // Rec
  std::uint32_t var_id() const;  // TypeVar

  const Node* node() const { return node_.get(); }

 private:
  friend struct TypeAccess;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Receiver, positional parameters and return of one function signature.
struct FuncSig {
  Type receiver = Type::undefined();
  std::vector<Type> params;
  Type ret = Type::undefined();
};

// Structural equality up to unrolling of recursive types.
bool type_equal(const Type& a, const Type& b);
bool sig_equal(const FuncSig& a, const FuncSig& b);

// Width-only structural subtyping with invariant functions.
bool is_subtype(const Type& a, const Type& b);

Type lub_subtyping(const Type& a, const Type& b);
Type lub_union(const Type& a, const Type& b);

// Members above this count collapse a union to Top.
inline constexpr std::size_t kMaxUnionMembers = 8;

// One step of unrolling for Rec; other types are returned unchanged.
Type unfold(const Type& t);

// Substitutes every free occurrence of RecVar(binder).
Type substitute_rec_var(const Type& t, std::uint32_t binder, const Type& with);
// Substitutes type variables by id; unmapped variables are kept.
Type substitute_type_vars(const Type& t, const std::map<std::uint32_t, Type>& with);
FuncSig substitute_type_vars(const FuncSig& s, const std::map<std::uint32_t, Type>& with);

// Matches a signature with type variables against a concrete one. Objects
// in the pattern match objects with the same property names; every other
// concrete part must be equal. Returns the variable bindings on success.
std::optional<std::map<std::uint32_t, Type>> match_type_vars(const FuncSig& pattern,
                                                             const FuncSig& concrete);

bool has_free_rec_vars(const Type& t);
bool has_type_vars(const Type& t);
bool has_type_vars(const FuncSig& s);
void collect_type_vars(const Type& t, std::set<std::uint32_t>& out);

// Unfolds top-level recursion; returns the object view if t is an object.
std::optional<Type> as_object(const Type& t);
std::optional<Type> as_function(const Type& t);
std::optional<Type> property_type(const Type& t, std::string_view name);

std::string render(const Type& t);
std::string render(const FuncSig& s);
std::string type_var_name(std::uint32_t id);

// Total order used for union members and intersection signatures.
bool type_less(const Type& a, const Type& b);

}  // namespace tracetype

#endif  // TRACETYPE_TYPES_HPP_
