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

#include "tracetype/types.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <utility>

namespace tracetype {

struct Type::Node {
  TypeKind kind = TypeKind::kBottom;
  std::map<std::string, Type> props;
  bool precise = false;
  std::optional<RwSplit> split;
  std::vector<FuncSig> sigs;
  bool uncalled = false;
  std::vector<Type> members;  // union members, or the body of a Rec
  std::uint32_t id = 0;
};

struct TypeAccess {
  static Type make(Type::Node n) {
    return Type(std::make_shared<const Type::Node>(std::move(n)));
  }
  static Type singleton(TypeKind k) {
    Type::Node n;
    n.kind = k;
    return make(std::move(n));
  }
};

namespace {

const Type& cached(TypeKind k) {
  static const Type top = TypeAccess::singleton(TypeKind::kTop);
  static const Type bottom = TypeAccess::singleton(TypeKind::kBottom);
  static const Type number = TypeAccess::singleton(TypeKind::kNumber);
  static const Type boolean = TypeAccess::singleton(TypeKind::kBoolean);
  static const Type string = TypeAccess::singleton(TypeKind::kString);
  static const Type null = TypeAccess::singleton(TypeKind::kNull);
  static const Type undefined = TypeAccess::singleton(TypeKind::kUndefined);
  switch (k) {
    case TypeKind::kTop: return top;
    case TypeKind::kBottom: return bottom;
    case TypeKind::kNumber: return number;
    case TypeKind::kBoolean: return boolean;
    case TypeKind::kString: return string;
    case TypeKind::kNull: return null;
    case TypeKind::kUndefined: return undefined;
    default: throw std::logic_error("no cached node for kind");
  }
}

const std::map<std::string, Type>& empty_props() {
  static const std::map<std::string, Type> m;
  return m;
}

const std::optional<RwSplit>& no_split() {
  static const std::optional<RwSplit> s;
  return s;
}

}  // namespace

Type::Type() : node_(cached(TypeKind::kBottom).node_) {}

Type Type::top() { return cached(TypeKind::kTop); }
Type Type::bottom() { return cached(TypeKind::kBottom); }
Type Type::number() { return cached(TypeKind::kNumber); }
Type Type::boolean() { return cached(TypeKind::kBoolean); }
Type Type::string() { return cached(TypeKind::kString); }
Type Type::null() { return cached(TypeKind::kNull); }
Type Type::undefined() { return cached(TypeKind::kUndefined); }

Type Type::object(std::map<std::string, Type> props, bool precise,
                  std::optional<RwSplit> split) {
  Node n;
  n.kind = TypeKind::kObject;
  n.props = std::move(props);
  n.precise = precise;
  n.split = std::move(split);
  return TypeAccess::make(std::move(n));
}

Type Type::function(FuncSig sig) {
  Node n;
  n.kind = TypeKind::kFunction;
  n.sigs.push_back(std::move(sig));
  return TypeAccess::make(std::move(n));
}

Type Type::intersection(std::vector<FuncSig> sigs) {
  std::vector<FuncSig> unique;
  for (auto& s : sigs) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const FuncSig& u) { return sig_equal(u, s); });
    if (!dup) unique.push_back(std::move(s));
  }
  if (unique.empty()) return uncalled_function();
  std::vector<std::pair<std::string, FuncSig>> keyed;
  for (auto& s : unique) keyed.emplace_back(render(s), std::move(s));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  Node n;
  n.kind = TypeKind::kFunction;
  for (auto& [k, s] : keyed) n.sigs.push_back(std::move(s));
  return TypeAccess::make(std::move(n));
}

Type Type::uncalled_function() {
  Node n;
  n.kind = TypeKind::kFunction;
  n.uncalled = true;
  n.sigs.push_back(FuncSig{Type::bottom(), {}, Type::bottom()});
  return TypeAccess::make(std::move(n));
}

Type Type::union_of(std::vector<Type> members) {
  std::vector<Type> flat;
  for (auto& m : members) {
    if (m.is(TypeKind::kTop)) return Type::top();
    if (m.is(TypeKind::kUnion)) {
      for (const auto& mm : m.members()) flat.push_back(mm);
    } else if (!m.is(TypeKind::kBottom)) {
      flat.push_back(std::move(m));
    }
  }
  std::vector<Type> unique;
  for (auto& m : flat) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const Type& u) { return type_equal(u, m); });
    if (!dup) unique.push_back(std::move(m));
  }
  if (unique.empty()) return Type::bottom();
  if (unique.size() == 1) return unique.front();
  std::stable_sort(unique.begin(), unique.end(), type_less);
  Node n;
  n.kind = TypeKind::kUnion;
  n.members = std::move(unique);
  return TypeAccess::make(std::move(n));
}

Type Type::rec(std::uint32_t binder, Type body) {
  Node n;
  n.kind = TypeKind::kRec;
  n.id = binder;
  n.members.push_back(std::move(body));
  return TypeAccess::make(std::move(n));
}

Type Type::rec_var(std::uint32_t binder) {
  Node n;
  n.kind = TypeKind::kRecVar;
  n.id = binder;
  return TypeAccess::make(std::move(n));
}

Type Type::type_var(std::uint32_t id) {
  Node n;
  n.kind = TypeKind::kTypeVar;
  n.id = id;
  return TypeAccess::make(std::move(n));
}

TypeKind Type::kind() const { return node_->kind; }

bool Type::is_primitive() const {
  switch (kind()) {
    case TypeKind::kNumber:
    case TypeKind::kBoolean:
    case TypeKind::kString:
    case TypeKind::kNull:
    case TypeKind::kUndefined:
      return true;
    default:
      return false;
  }
}

const std::map<std::string, Type>& Type::props() const {
  return is(TypeKind::kObject) ? node_->props : empty_props();
}
bool Type::precise() const { return is(TypeKind::kObject) && node_->precise; }
const std::optional<RwSplit>& Type::rw_split() const {
  return is(TypeKind::kObject) ? node_->split : no_split();
}
std::span<const FuncSig> Type::signatures() const { return node_->sigs; }
bool Type::uncalled() const { return node_->uncalled; }
std::span<const Type> Type::members() const {
  return is(TypeKind::kUnion) ? std::span<const Type>(node_->members)
                              : std::span<const Type>();
}
std::uint32_t Type::binder() const { return node_->id; }
const Type& Type::body() const {
  if (!is(TypeKind::kRec)) throw std::logic_error("body() on non-recursive type");
  return node_->members.front();
}
std::uint32_t Type::var_id() const { return node_->id; }

// ---------------------------------------------------------------------------
// Equality and subtyping. Both walk the two terms with a per-side map from
// binder to its Rec node and an assumption set over visited Rec pairs.

namespace {

using Env = std::map<std::uint32_t, Type>;
using Assumptions = std::set<std::pair<const void*, const void*>>;

Type resolve_head(Type t, Env& env, const Type::Node*& rec_node) {
  rec_node = nullptr;
  for (int guard = 0; guard < 256; ++guard) {
    if (t.is(TypeKind::kRec)) {
      env[t.binder()] = t;
      rec_node = t.node();
      t = t.body();
      continue;
    }
    if (t.is(TypeKind::kRecVar)) {
      auto it = env.find(t.binder());
      if (it == env.end()) return t;
      t = it->second;
      continue;
    }
    return t;
  }
  return t;
}

class Equality {
 public:
  Equality(Env& ea, Env& eb) : ea_(ea), eb_(eb) {}

  bool eq(const Type& a0, const Type& b0) {
    if (a0.node() == b0.node()) return true;
    const Type::Node* ka = nullptr;
    const Type::Node* kb = nullptr;
    Type a = resolve_head(a0, ea_, ka);
    Type b = resolve_head(b0, eb_, kb);
    if (ka != nullptr || kb != nullptr) {
      std::pair<const void*, const void*> key{ka ? ka : a.node(), kb ? kb : b.node()};
      if (assumed_.count(key)) return true;
      assumed_.insert(key);
    }
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TypeKind::kObject: {
        if (a.precise() != b.precise() || a.rw_split() != b.rw_split()) return false;
        const auto& pa = a.props();
        const auto& pb = b.props();
        if (pa.size() != pb.size()) return false;
        auto ib = pb.begin();
        for (auto ia = pa.begin(); ia != pa.end(); ++ia, ++ib) {
          if (ia->first != ib->first) return false;
        }
        ib = pb.begin();
        for (auto ia = pa.begin(); ia != pa.end(); ++ia, ++ib) {
          if (!eq(ia->second, ib->second)) return false;
        }
        return true;
      }
      case TypeKind::kFunction: {
        if (a.uncalled() != b.uncalled()) return false;
        auto sa = a.signatures();
        auto sb = b.signatures();
        if (sa.size() != sb.size()) return false;
        if (sa.size() == 1) return sig(sa[0], sb[0]);
        return covers(sa, sb) && covers(sb, sa);
      }
      case TypeKind::kUnion: {
        auto ma = a.members();
        auto mb = b.members();
        if (ma.size() != mb.size()) return false;
        return members_cover(ma, mb) && members_cover(mb, ma);
      }
      case TypeKind::kRecVar:
      case TypeKind::kTypeVar:
        return a.binder() == b.binder();
      default:
        return true;  // primitives, Top, Bottom
    }
  }

  bool sig(const FuncSig& a, const FuncSig& b) {
    if (a.params.size() != b.params.size()) return false;
    if (!eq(a.receiver, b.receiver)) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      if (!eq(a.params[i], b.params[i])) return false;
    }
    return eq(a.ret, b.ret);
  }

 private:
  bool covers(std::span<const FuncSig> xs, std::span<const FuncSig> ys) {
    for (const auto& x : xs) {
      bool found = false;
      for (const auto& y : ys) {
        Assumptions saved = assumed_;
        if (sig(x, y)) {
          found = true;
          break;
        }
        assumed_ = std::move(saved);
      }
      if (!found) return false;
    }
    return true;
  }

  bool members_cover(std::span<const Type> xs, std::span<const Type> ys) {
    for (const auto& x : xs) {
      bool found = false;
      for (const auto& y : ys) {
        Assumptions saved = assumed_;
        if (eq(x, y)) {
          found = true;
          break;
        }
        assumed_ = std::move(saved);
      }
      if (!found) return false;
    }
    return true;
  }

  Env& ea_;
  Env& eb_;
  Assumptions assumed_;
};

class Subtyping {
 public:
  bool sub(const Type& a0, const Type& b0) {
    if (b0.is(TypeKind::kTop) || a0.is(TypeKind::kBottom)) return true;
    const Type::Node* ka = nullptr;
    const Type::Node* kb = nullptr;
    Type a = resolve_head(a0, ea_, ka);
    Type b = resolve_head(b0, eb_, kb);
    if (ka != nullptr || kb != nullptr) {
      std::pair<const void*, const void*> key{ka ? ka : a.node(), kb ? kb : b.node()};
      if (assumed_.count(key)) return true;
      assumed_.insert(key);
    }
    if (b.is(TypeKind::kTop) || a.is(TypeKind::kBottom)) return true;
    if (a.is(TypeKind::kUnion)) {
      for (const auto& m : a.members()) {
        if (!sub(m, b)) return false;
      }
      return true;
    }
    if (b.is(TypeKind::kUnion)) {
      for (const auto& m : b.members()) {
        Assumptions saved = assumed_;
        if (sub(a, m)) return true;
        assumed_ = std::move(saved);
      }
      return false;
    }
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TypeKind::kObject: {
        if (b.precise()) {
          if (!a.precise() || a.props().size() != b.props().size()) return false;
        }
        for (const auto& [name, tb] : b.props()) {
          auto it = a.props().find(name);
          if (it == a.props().end()) return false;
          Equality e(ea_, eb_);
          if (!e.eq(it->second, tb)) return false;
        }
        if (b.rw_split()) {
          const auto* ra = a.rw_split() ? &a.rw_split()->readwrite : nullptr;
          for (const auto& name : b.rw_split()->readwrite) {
            if (ra == nullptr || !ra->count(name)) return false;
          }
        }
        return true;
      }
      case TypeKind::kFunction: {
        Equality e(ea_, eb_);
        return e.eq(a, b);
      }
      case TypeKind::kRecVar:
      case TypeKind::kTypeVar:
        return a.binder() == b.binder();
      default:
        return true;
    }
  }

 private:
  Env ea_, eb_;
  Assumptions assumed_;
};

}  // namespace

bool type_equal(const Type& a, const Type& b) {
  if (a.node() == b.node()) return true;
  Env ea, eb;
  Equality e(ea, eb);
  return e.eq(a, b);
}

bool sig_equal(const FuncSig& a, const FuncSig& b) {
  Env ea, eb;
  Equality e(ea, eb);
  return e.sig(a, b);
}

bool is_subtype(const Type& a, const Type& b) {
  Subtyping s;
  return s.sub(a, b);
}

// ---------------------------------------------------------------------------
// Substitution and unfolding.

namespace {

template <typename F>
Type rebuild(const Type& t, F&& f) {
  switch (t.kind()) {
    case TypeKind::kObject: {
      std::map<std::string, Type> props;
      bool changed = false;
      for (const auto& [k, v] : t.props()) {
        Type nv = f(v);
        changed |= nv.node() != v.node();
        props.emplace(k, std::move(nv));
      }
      if (!changed) return t;
      return Type::object(std::move(props), t.precise(), t.rw_split());
    }
    case TypeKind::kFunction: {
      if (t.uncalled()) return t;
      std::vector<FuncSig> sigs;
      bool changed = false;
      for (const auto& s : t.signatures()) {
        FuncSig ns;
        ns.receiver = f(s.receiver);
        changed |= ns.receiver.node() != s.receiver.node();
        for (const auto& p : s.params) {
          ns.params.push_back(f(p));
          changed |= ns.params.back().node() != p.node();
        }
        ns.ret = f(s.ret);
        changed |= ns.ret.node() != s.ret.node();
        sigs.push_back(std::move(ns));
      }
      if (!changed) return t;
      if (sigs.size() == 1) return Type::function(std::move(sigs.front()));
      return Type::intersection(std::move(sigs));
    }
    case TypeKind::kUnion: {
      std::vector<Type> ms;
      bool changed = false;
      for (const auto& m : t.members()) {
        ms.push_back(f(m));
        changed |= ms.back().node() != m.node();
      }
      if (!changed) return t;
      return Type::union_of(std::move(ms));
    }
    default:
      return t;
  }
}

}  // namespace

Type substitute_rec_var(const Type& t, std::uint32_t binder, const Type& with) {
  switch (t.kind()) {
    case TypeKind::kRecVar:
      return t.binder() == binder ? with : t;
    case TypeKind::kRec: {
      if (t.binder() == binder) return t;
      Type body = substitute_rec_var(t.body(), binder, with);
      if (body.node() == t.body().node()) return t;
      return Type::rec(t.binder(), std::move(body));
    }
    default:
      return rebuild(t, [&](const Type& x) { return substitute_rec_var(x, binder, with); });
  }
}

Type substitute_type_vars(const Type& t, const std::map<std::uint32_t, Type>& with) {
  switch (t.kind()) {
    case TypeKind::kTypeVar: {
      auto it = with.find(t.var_id());
      return it == with.end() ? t : it->second;
    }
    case TypeKind::kRec: {
      Type body = substitute_type_vars(t.body(), with);
      if (body.node() == t.body().node()) return t;
      return Type::rec(t.binder(), std::move(body));
    }
    default:
      return rebuild(t, [&](const Type& x) { return substitute_type_vars(x, with); });
  }
}

FuncSig substitute_type_vars(const FuncSig& s, const std::map<std::uint32_t, Type>& with) {
  FuncSig out;
  out.receiver = substitute_type_vars(s.receiver, with);
  for (const auto& p : s.params) out.params.push_back(substitute_type_vars(p, with));
  out.ret = substitute_type_vars(s.ret, with);
  return out;
}

Type unfold(const Type& t) {
  if (!t.is(TypeKind::kRec)) return t;
  return substitute_rec_var(t.body(), t.binder(), t);
}

namespace {

bool free_rec_vars(const Type& t, std::set<std::uint32_t>& bound) {
  switch (t.kind()) {
    case TypeKind::kRecVar:
      return !bound.count(t.binder());
    case TypeKind::kRec: {
      bool inserted = bound.insert(t.binder()).second;
      bool r = free_rec_vars(t.body(), bound);
      if (inserted) bound.erase(t.binder());
      return r;
    }
    case TypeKind::kObject:
      for (const auto& [k, v] : t.props()) {
        if (free_rec_vars(v, bound)) return true;
      }
      return false;
    case TypeKind::kFunction:
      for (const auto& s : t.signatures()) {
        if (free_rec_vars(s.receiver, bound) || free_rec_vars(s.ret, bound)) return true;
        for (const auto& p : s.params) {
          if (free_rec_vars(p, bound)) return true;
        }
      }
      return false;
    case TypeKind::kUnion:
      for (const auto& m : t.members()) {
        if (free_rec_vars(m, bound)) return true;
      }
      return false;
    default:
      return false;
  }
}

}  // namespace

bool has_free_rec_vars(const Type& t) {
  std::set<std::uint32_t> bound;
  return free_rec_vars(t, bound);
}

void collect_type_vars(const Type& t, std::set<std::uint32_t>& out) {
  switch (t.kind()) {
    case TypeKind::kTypeVar:
      out.insert(t.var_id());
      return;
    case TypeKind::kRec:
      collect_type_vars(t.body(), out);
      return;
    case TypeKind::kObject:
      for (const auto& [k, v] : t.props()) collect_type_vars(v, out);
      return;
    case TypeKind::kFunction:
      for (const auto& s : t.signatures()) {
        collect_type_vars(s.receiver, out);
        for (const auto& p : s.params) collect_type_vars(p, out);
        collect_type_vars(s.ret, out);
      }
      return;
    case TypeKind::kUnion:
      for (const auto& m : t.members()) collect_type_vars(m, out);
      return;
    default:
      return;
  }
}

bool has_type_vars(const Type& t) {
  std::set<std::uint32_t> vs;
  collect_type_vars(t, vs);
  return !vs.empty();
}

bool has_type_vars(const FuncSig& s) {
  if (has_type_vars(s.receiver) || has_type_vars(s.ret)) return true;
  return std::any_of(s.params.begin(), s.params.end(),
                     [](const Type& p) { return has_type_vars(p); });
}

namespace {

Type unfold_head(Type t) {
  for (int guard = 0; guard < 64 && t.is(TypeKind::kRec); ++guard) t = unfold(t);
  return t;
}

}  // namespace

std::optional<Type> as_object(const Type& t) {
  Type u = unfold_head(t);
  if (u.is(TypeKind::kObject)) return u;
  return std::nullopt;
}

std::optional<Type> as_function(const Type& t) {
  Type u = unfold_head(t);
  if (u.is(TypeKind::kFunction)) return u;
  return std::nullopt;
}

std::optional<Type> property_type(const Type& t, std::string_view name) {
  auto o = as_object(t);
  if (!o) return std::nullopt;
  auto it = o->props().find(std::string(name));
  if (it == o->props().end()) return std::nullopt;
  return it->second;
}

namespace {

bool match_into(const Type& pattern, const Type& concrete, std::map<std::uint32_t, Type>& out) {
  if (pattern.is(TypeKind::kTypeVar)) {
    auto [it, fresh] = out.emplace(pattern.var_id(), concrete);
    return fresh || type_equal(it->second, concrete);
  }
  if (pattern.is(TypeKind::kObject) && has_type_vars(pattern)) {
    auto o = as_object(concrete);
    if (!o || o->props().size() != pattern.props().size()) return false;
    for (const auto& [name, pt] : pattern.props()) {
      auto it = o->props().find(name);
      if (it == o->props().end() || !match_into(pt, it->second, out)) return false;
    }
    return true;
  }
  return type_equal(pattern, concrete);
}

}  // namespace

std::optional<std::map<std::uint32_t, Type>> match_type_vars(const FuncSig& pattern,
                                                             const FuncSig& concrete) {
  if (pattern.params.size() != concrete.params.size()) return std::nullopt;
  std::map<std::uint32_t, Type> out;
  if (!match_into(pattern.receiver, concrete.receiver, out)) return std::nullopt;
  for (std::size_t i = 0; i < pattern.params.size(); ++i) {
    if (!match_into(pattern.params[i], concrete.params[i], out)) return std::nullopt;
  }
  if (!match_into(pattern.ret, concrete.ret, out)) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Least upper bounds.

Type lub_subtyping(const Type& a, const Type& b) {
  if (a.is(TypeKind::kBottom)) return b;
  if (b.is(TypeKind::kBottom)) return a;
  if (type_equal(a, b)) return a;
  auto oa = as_object(a);
  auto ob = as_object(b);
  if (!oa || !ob) return Type::top();
  std::map<std::string, Type> props;
  for (const auto& [name, ta] : oa->props()) {
    auto it = ob->props().find(name);
    if (it != ob->props().end() && type_equal(ta, it->second)) props.emplace(name, ta);
  }
  std::optional<RwSplit> split;
  if (oa->rw_split() && ob->rw_split()) {
    split.emplace();
    for (const auto& [name, ta] : props) {
      bool rw = oa->rw_split()->readwrite.count(name) && ob->rw_split()->readwrite.count(name);
      (rw ? split->readwrite : split->readonly).insert(name);
    }
  }
  return Type::object(std::move(props), false, std::move(split));
}

namespace {

enum class Sort { kPrimitive, kObject, kFunction, kTypeVar, kTop };

Sort sort_of(const Type& t) {
  switch (t.kind()) {
    case TypeKind::kObject:
    case TypeKind::kRecVar:
      return Sort::kObject;
    case TypeKind::kFunction:
      return Sort::kFunction;
    case TypeKind::kRec:
      return sort_of(t.body());
    case TypeKind::kTypeVar:
      return Sort::kTypeVar;
    case TypeKind::kTop:
      return Sort::kTop;
    default:
      return Sort::kPrimitive;
  }
}

}  // namespace

Type lub_union(const Type& a, const Type& b) {
  if (a.is(TypeKind::kBottom)) return b;
  if (b.is(TypeKind::kBottom)) return a;
  if (type_equal(a, b)) return a;
  std::vector<Type> flat;
  for (const Type* t : {&a, &b}) {
    if (t->is(TypeKind::kUnion)) {
      for (const auto& m : t->members()) flat.push_back(m);
    } else {
      flat.push_back(*t);
    }
  }
  std::optional<Type> object;
  std::optional<Type> function;
  std::vector<Type> others;
  for (const auto& m : flat) {
    switch (sort_of(m)) {
      case Sort::kTop:
        return Type::top();
      case Sort::kObject:
        object = object ? lub_subtyping(*object, m) : m;
        if (object->is(TypeKind::kTop)) return Type::top();
        break;
      case Sort::kFunction:
        function = function ? lub_subtyping(*function, m) : m;
        if (function->is(TypeKind::kTop)) return Type::top();
        break;
      default:
        others.push_back(m);
        break;
    }
  }
  std::vector<Type> members;
  if (object) members.push_back(*object);
  if (function) members.push_back(*function);
  for (auto& o : others) members.push_back(std::move(o));
  Type u = Type::union_of(std::move(members));
  if (u.is(TypeKind::kUnion) && u.members().size() > kMaxUnionMembers) return Type::top();
  return u;
}

// ---------------------------------------------------------------------------
// Rendering.

std::string type_var_name(std::uint32_t id) {
  static const char* kNames[] = {"E", "F", "G", "H"};
  if (id < 4) return kNames[id];
  return "T" + std::to_string(id);
}

namespace {

bool plain_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$';
  });
}

class Renderer {
 public:
  std::string type(const Type& t) {
    switch (t.kind()) {
      case TypeKind::kTop: return "Top";
      case TypeKind::kBottom: return "Bottom";
      case TypeKind::kNumber: return "Number";
      case TypeKind::kBoolean: return "Boolean";
      case TypeKind::kString: return "String";
      case TypeKind::kNull: return "Null";
      case TypeKind::kUndefined: return "Undefined";
      case TypeKind::kTypeVar: return type_var_name(t.var_id());
      case TypeKind::kRecVar: {
        auto it = names_.find(t.binder());
        return it != names_.end() ? it->second : "?" + std::to_string(t.binder());
      }
      case TypeKind::kRec: {
        static const char* kBinders[] = {"X", "Y", "Z", "W"};
        std::string name = kBinders[depth_ % 4];
        if (depth_ >= 4) name += std::to_string(depth_ / 4 + 1);
        auto saved = names_.find(t.binder()) != names_.end()
                         ? std::optional<std::string>(names_[t.binder()])
                         : std::nullopt;
        names_[t.binder()] = name;
        ++depth_;
        std::string out = "μ" + name + "." + type(t.body());
        --depth_;
        if (saved) {
          names_[t.binder()] = *saved;
        } else {
          names_.erase(t.binder());
        }
        return out;
      }
      case TypeKind::kObject: {
        std::string out = "{";
        bool first = true;
        for (const auto& [name, pt] : t.props()) {
          if (!first) out += ", ";
          first = false;
          if (t.rw_split() && t.rw_split()->readonly.count(name)) out += "ro ";
          out += plain_name(name) ? name : "\"" + name + "\"";
          out += ": ";
          out += type(pt);
        }
        out += "}";
        if (t.precise()) out += "!";
        return out;
      }
      case TypeKind::kFunction: {
        if (t.uncalled()) return "<uncalled>";
        std::string out = "<";
        bool first = true;
        for (const auto& s : t.signatures()) {
          if (!first) out += " ∧ ";
          first = false;
          out += sig(s);
        }
        return out + ">";
      }
      case TypeKind::kUnion: {
        std::string out;
        bool first = true;
        for (const auto& m : t.members()) {
          if (!first) out += " | ";
          first = false;
          out += type(m);
        }
        return out;
      }
    }
    return "?";
  }

  std::string sig(const FuncSig& s) {
    std::string out;
    if (!s.receiver.is(TypeKind::kUndefined) && !s.receiver.is(TypeKind::kBottom)) {
      out += "[" + type(s.receiver) + "]";
    }
    out += "(";
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      if (i) out += ", ";
      out += type(s.params[i]);
    }
    out += ") -> " + type(s.ret);
    return out;
  }

 private:
  std::map<std::uint32_t, std::string> names_;
  int depth_ = 0;
};

int rank(const Type& t) {
  switch (t.kind()) {
    case TypeKind::kObject:
    case TypeKind::kRecVar:
      return 0;
    case TypeKind::kRec:
      return rank(t.body());
    case TypeKind::kFunction: return 1;
    case TypeKind::kNumber: return 2;
    case TypeKind::kBoolean: return 3;
    case TypeKind::kString: return 4;
    case TypeKind::kNull: return 5;
    case TypeKind::kUndefined: return 6;
    case TypeKind::kTypeVar: return 7;
    case TypeKind::kTop: return 8;
    case TypeKind::kBottom: return 9;
    case TypeKind::kUnion: return 10;
  }
  return 11;
}

}  // namespace

std::string render(const Type& t) {
  Renderer r;
  return r.type(t);
}

std::string render(const FuncSig& s) {
  Renderer r;
  return r.sig(s);
}

bool type_less(const Type& a, const Type& b) {
  int ra = rank(a);
  int rb = rank(b);
  if (ra != rb) return ra < rb;
  if (a.is(TypeKind::kTypeVar) && b.is(TypeKind::kTypeVar)) return a.var_id() < b.var_id();
  if (a.is(TypeKind::kRecVar) && b.is(TypeKind::kRecVar)) return a.binder() < b.binder();
  return render(a) < render(b);
}

}  // namespace tracetype
