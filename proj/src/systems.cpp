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

#include "tracetype/systems.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace tracetype {

// ---------------------------------------------------------------------------
// Function generalization.

Type lub_fn_base(std::span<const FuncSig> invocations, const LubFn& lub) {
  if (invocations.empty()) return Type::uncalled_function();
  FuncSig out{Type::bottom(), {}, Type::bottom()};
  for (const auto& s : invocations) {
    out.receiver = lub(out.receiver, s.receiver);
    if (s.params.size() > out.params.size()) out.params.resize(s.params.size(), Type::bottom());
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      out.params[i] = lub(out.params[i], s.params[i]);
    }
    out.ret = lub(out.ret, s.ret);
  }
  return Type::function(std::move(out));
}

Type lub_fn_intersect(std::span<const FuncSig> invocations) {
  if (invocations.empty()) return Type::uncalled_function();
  std::vector<FuncSig> sigs(invocations.begin(), invocations.end());
  return Type::intersection(std::move(sigs));
}

namespace {

void rename_walk(const Type& t, std::map<std::uint32_t, Type>& names) {
  switch (t.kind()) {
    case TypeKind::kTypeVar:
      if (!names.count(t.var_id())) {
        names.emplace(t.var_id(), Type::type_var(static_cast<std::uint32_t>(names.size())));
      }
      return;
    case TypeKind::kObject:
      for (const auto& [k, v] : t.props()) rename_walk(v, names);
      return;
    case TypeKind::kRec:
      rename_walk(t.body(), names);
      return;
    case TypeKind::kFunction:
      for (const auto& s : t.signatures()) {
        rename_walk(s.receiver, names);
        for (const auto& p : s.params) rename_walk(p, names);
        rename_walk(s.ret, names);
      }
      return;
    case TypeKind::kUnion:
      for (const auto& m : t.members()) rename_walk(m, names);
      return;
    default:
      return;
  }
}

std::size_t count_vars(const Type& t, std::map<std::uint32_t, std::size_t>& counts) {
  switch (t.kind()) {
    case TypeKind::kTypeVar:
      ++counts[t.var_id()];
      return 1;
    case TypeKind::kObject: {
      std::size_t n = 0;
      for (const auto& [k, v] : t.props()) n += count_vars(v, counts);
      return n;
    }
    case TypeKind::kRec:
      return count_vars(t.body(), counts);
    case TypeKind::kFunction: {
      std::size_t n = 0;
      for (const auto& s : t.signatures()) {
        n += count_vars(s.receiver, counts);
        for (const auto& p : s.params) n += count_vars(p, counts);
        n += count_vars(s.ret, counts);
      }
      return n;
    }
    case TypeKind::kUnion: {
      std::size_t n = 0;
      for (const auto& m : t.members()) n += count_vars(m, counts);
      return n;
    }
    default:
      return 0;
  }
}

std::size_t count_sig_vars(const FuncSig& s, std::map<std::uint32_t, std::size_t>& counts) {
  std::size_t n = count_vars(s.receiver, counts);
  for (const auto& p : s.params) n += count_vars(p, counts);
  return n + count_vars(s.ret, counts);
}

}  // namespace

FuncSig canonical_vars(const FuncSig& sig) {
  std::map<std::uint32_t, Type> names;
  rename_walk(sig.receiver, names);
  for (const auto& p : sig.params) rename_walk(p, names);
  rename_walk(sig.ret, names);
  return substitute_type_vars(sig, names);
}

bool equal_up_to_renaming(const FuncSig& a, const FuncSig& b) {
  return sig_equal(canonical_vars(a), canonical_vars(b));
}

std::size_t generality_score(const FuncSig& sig) {
  std::map<std::uint32_t, std::size_t> counts;
  return count_sig_vars(sig, counts);
}

std::size_t type_var_count(const FuncSig& sig) {
  std::map<std::uint32_t, std::size_t> counts;
  count_sig_vars(sig, counts);
  return counts.size();
}

bool admissible(const FuncSig& sig) {
  std::map<std::uint32_t, std::size_t> counts;
  count_sig_vars(sig, counts);
  return std::all_of(counts.begin(), counts.end(), [](const auto& c) { return c.second >= 2; });
}

bool better_candidate(const FuncSig& a, const FuncSig& b) {
  std::size_t sa = generality_score(a);
  std::size_t sb = generality_score(b);
  if (sa != sb) return sa > sb;
  std::size_t va = type_var_count(a);
  std::size_t vb = type_var_count(b);
  if (va != vb) return va < vb;
  return render(canonical_vars(a)) < render(canonical_vars(b));
}

namespace {

// A position in a signature: a slot (0 = receiver, 1..n = params,
// n+1 = return), optionally one property level inside it.
struct Position {
  std::size_t slot;
  std::optional<std::string> prop;
};

std::size_t slot_count(const FuncSig& s) { return s.params.size() + 2; }

const Type& slot_type(const FuncSig& s, std::size_t slot) {
  if (slot == 0) return s.receiver;
  if (slot <= s.params.size()) return s.params[slot - 1];
  return s.ret;
}

Type& slot_type(FuncSig& s, std::size_t slot) {
  if (slot == 0) return s.receiver;
  if (slot <= s.params.size()) return s.params[slot - 1];
  return s.ret;
}

const Type& position_type(const FuncSig& s, const Position& p) {
  const Type& t = slot_type(s, p.slot);
  if (!p.prop) return t;
  return t.props().at(*p.prop);
}

// Replaces the given positions with type variables.
FuncSig apply_replacements(const FuncSig& base, const std::vector<std::pair<Position, std::uint32_t>>& repl) {
  FuncSig out = base;
  std::map<std::size_t, std::map<std::string, std::uint32_t>> nested;
  for (const auto& [pos, var] : repl) {
    if (pos.prop) {
      nested[pos.slot][*pos.prop] = var;
    } else {
      slot_type(out, pos.slot) = Type::type_var(var);
    }
  }
  for (const auto& [slot, props] : nested) {
    const Type& obj = slot_type(base, slot);
    std::map<std::string, Type> np = obj.props();
    for (const auto& [name, var] : props) np[name] = Type::type_var(var);
    slot_type(out, slot) = Type::object(std::move(np), obj.precise(), obj.rw_split());
  }
  return out;
}

}  // namespace

std::vector<FuncSig> enumerate_candidates(const FuncSig& sig, const PolyLimits& limits) {
  std::vector<Position> positions;
  for (std::size_t slot = 0; slot < slot_count(sig); ++slot) {
    const Type& t = slot_type(sig, slot);
    if (slot == 0 && t.is(TypeKind::kUndefined)) continue;
    positions.push_back({slot, std::nullopt});
    if (t.is(TypeKind::kObject)) {
      for (const auto& [name, pt] : t.props()) positions.push_back({slot, name});
    }
  }
  // Group occurrences by concrete type.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Type> group_types;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Type& t = position_type(sig, positions[i]);
    std::size_t g = 0;
    while (g < group_types.size() && !type_equal(group_types[g], t)) ++g;
    if (g == group_types.size()) {
      group_types.push_back(t);
      groups.emplace_back();
    }
    groups[g].push_back(i);
  }

  std::vector<FuncSig> out;
  // Per group: chosen subset mask (0 = not replaced).
  std::vector<std::uint64_t> choice(groups.size(), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t g, std::size_t used) {
    if (g == groups.size()) {
      std::set<std::size_t> whole_slots;
      std::vector<std::pair<Position, std::uint32_t>> repl;
      std::uint32_t var = 0;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        if (!choice[k]) continue;
        for (std::size_t b = 0; b < groups[k].size(); ++b) {
          if (choice[k] >> b & 1) {
            const Position& p = positions[groups[k][b]];
            repl.emplace_back(p, var);
            if (!p.prop) whole_slots.insert(p.slot);
          }
        }
        ++var;
      }
      for (const auto& [p, v] : repl) {
        if (p.prop && whole_slots.count(p.slot)) return;
      }
      out.push_back(canonical_vars(apply_replacements(sig, repl)));
      return;
    }
    const std::size_t size = groups[g].size();
    const std::uint64_t limit = size >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << size);
    choice[g] = 0;
    rec(g + 1, used);
    if (used >= limits.max_vars) return;
    for (std::uint64_t m = 1; m < limit; ++m) {
      choice[g] = m;
      rec(g + 1, used + 1);
    }
    choice[g] = 0;
  };
  rec(0, 0);
  return out;
}

Type lub_fn_poly(std::span<const FuncSig> invocations, const LubFn& lub,
                 const PolyLimits& limits) {
  if (invocations.empty()) return Type::uncalled_function();
  const std::size_t arity = invocations[0].params.size();
  for (const auto& s : invocations) {
    if (s.params.size() != arity) return lub_fn_base(invocations, lub);
  }
  if (arity > limits.max_params) return lub_fn_base(invocations, lub);
  const std::size_t nslots = arity + 2;
  const std::size_t ninv = invocations.size();

  bool receiver_open = std::none_of(invocations.begin(), invocations.end(), [](const FuncSig& s) {
    return s.receiver.is(TypeKind::kUndefined);
  });

  std::vector<std::size_t> slots;
  for (std::size_t s = receiver_open ? 0 : 1; s < nslots; ++s) slots.push_back(s);
  // The receiver is fixed when excluded; it must then agree everywhere.
  if (!receiver_open) {
    for (const auto& s : invocations) {
      if (!type_equal(s.receiver, invocations[0].receiver)) return lub_fn_base(invocations, lub);
    }
  }

  std::vector<std::size_t> openable;
  for (std::size_t s : slots) {
    bool ok = true;
    const Type& first = slot_type(invocations[0], s);
    for (const auto& inv : invocations) {
      const Type& t = slot_type(inv, s);
      if (!t.is(TypeKind::kObject) || t.props().size() != first.props().size() ||
          !std::equal(t.props().begin(), t.props().end(), first.props().begin(),
                      [](const auto& a, const auto& b) { return a.first == b.first; })) {
        ok = false;
        break;
      }
    }
    if (ok && openable.size() < limits.max_openings) openable.push_back(s);
  }

  std::optional<FuncSig> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << openable.size()); ++mask) {
    std::set<std::size_t> opened;
    for (std::size_t k = 0; k < openable.size(); ++k) {
      if (mask >> k & 1) opened.insert(openable[k]);
    }
    std::vector<Position> positions;
    for (std::size_t s : slots) {
      if (opened.count(s)) {
        for (const auto& [name, t] : slot_type(invocations[0], s).props()) {
          positions.push_back({s, name});
        }
      } else {
        positions.push_back({s, std::nullopt});
      }
    }
    // Classes of positions whose types coincide in every invocation.
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      std::size_t c = 0;
      for (; c < classes.size(); ++c) {
        const Position& rep = positions[classes[c][0]];
        bool same = true;
        for (const auto& inv : invocations) {
          if (!type_equal(position_type(inv, rep), position_type(inv, positions[i]))) {
            same = false;
            break;
          }
        }
        if (same) break;
      }
      if (c == classes.size()) classes.emplace_back();
      classes[c].push_back(i);
    }
    std::vector<std::size_t> mandatory;
    std::vector<std::size_t> optional;
    bool feasible = true;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const Position& rep = positions[classes[c][0]];
      bool consistent = true;
      for (const auto& inv : invocations) {
        if (!type_equal(position_type(inv, rep), position_type(invocations[0], rep))) {
          consistent = false;
          break;
        }
      }
      if (!consistent) {
        if (classes[c].size() < 2) {
          feasible = false;
          break;
        }
        mandatory.push_back(c);
      } else if (classes[c].size() >= 2) {
        optional.push_back(c);
      }
    }
    if (!feasible || mandatory.size() > limits.max_vars) continue;

    auto distinct = [&](const std::vector<std::size_t>& chosen) {
      for (std::size_t a = 0; a < chosen.size(); ++a) {
        for (std::size_t b = a + 1; b < chosen.size(); ++b) {
          const Position& pa = positions[classes[chosen[a]][0]];
          const Position& pb = positions[classes[chosen[b]][0]];
          for (std::size_t k = 0; k < ninv; ++k) {
            if (type_equal(position_type(invocations[k], pa),
                           position_type(invocations[k], pb))) {
              return false;
            }
          }
        }
      }
      return true;
    };
    auto consider = [&](const std::vector<std::size_t>& chosen) {
      if (!distinct(chosen)) return;
      std::vector<std::pair<Position, std::uint32_t>> repl;
      for (std::size_t v = 0; v < chosen.size(); ++v) {
        for (std::size_t i : classes[chosen[v]]) {
          repl.emplace_back(positions[i], static_cast<std::uint32_t>(v));
        }
      }
      FuncSig cand = canonical_vars(apply_replacements(invocations[0], repl));
      if (!best || better_candidate(cand, *best)) best = std::move(cand);
    };
    const std::size_t room = limits.max_vars - mandatory.size();
    std::vector<std::size_t> chosen = mandatory;
    std::function<void(std::size_t)> pick = [&](std::size_t from) {
      consider(chosen);
      if (chosen.size() - mandatory.size() >= room) return;
      for (std::size_t k = from; k < optional.size(); ++k) {
        chosen.push_back(optional[k]);
        pick(k + 1);
        chosen.pop_back();
      }
    };
    pick(0);
  }
  if (!best) return lub_fn_base(invocations, lub);
  return Type::function(std::move(*best));
}

std::string poly_context_key(const FuncSig& invocation, const Type& generalized) {
  auto f = as_function(generalized);
  if (!f || f->uncalled() || f->signatures().size() != 1) return "";
  const FuncSig& sig = f->signatures()[0];
  if (!has_type_vars(sig)) return "";
  auto inst = match_type_vars(sig, invocation);
  if (!inst) throw NoMatch("invocation does not instantiate " + render(generalized));
  std::string key;
  for (const auto& [id, t] : *inst) {
    if (!key.empty()) key += ";";
    key += type_var_name(id) + "=" + render(t);
  }
  return key;
}

Type ascribe_fixed_layout(const ShapeMap& shape, AscriptionContext& ctx) {
  std::map<std::string, Type> props;
  for (const auto& [name, values] : shape.layout) props.emplace(name, ctx.lub_values(values));
  return Type::object(std::move(props), true, RwSplit{shape.readwrite, shape.readonly});
}

// ---------------------------------------------------------------------------
// Systems.

namespace {

enum class Lattice { kSubtyping, kUnion };
enum class Generalize { kBase, kPoly, kIntersect };

class CoreSystem : public TypeSystem {
 public:
  CoreSystem(std::string name, Lattice lattice, Generalize gen)
      : name_(std::move(name)), lattice_(lattice), gen_(gen) {}

  std::string name() const override { return name_; }

  Type lub(const Type& a, const Type& b) const override {
    return lattice_ == Lattice::kSubtyping ? lub_subtyping(a, b) : lub_union(a, b);
  }

  Type lub_fn(std::span<const FuncSig> invocations) const override {
    LubFn l = [this](const Type& a, const Type& b) { return lub(a, b); };
    switch (gen_) {
      case Generalize::kBase: return lub_fn_base(invocations, l);
      case Generalize::kPoly: return lub_fn_poly(invocations, l);
      case Generalize::kIntersect: return lub_fn_intersect(invocations);
    }
    return lub_fn_base(invocations, l);
  }

  MergePolicy merge() const override {
    MergePolicy p;
    if (gen_ != Generalize::kBase) p.context = Context::kSensitive;
    return p;
  }

  std::string context_key(const CallFrame& frame, const FuncSig& invocation,
                          const Type& callee_type) const override {
    switch (gen_) {
      case Generalize::kBase:
        return "";
      case Generalize::kIntersect:
        return frame.id;
      case Generalize::kPoly:
        try {
          return frame.function + "|" + poly_context_key(invocation, callee_type);
        } catch (const NoMatch&) {
          return frame.id;
        }
    }
    return "";
  }

 private:
  std::string name_;
  Lattice lattice_;
  Generalize gen_;
};

class FixedLayoutSystem : public CoreSystem {
 public:
  FixedLayoutSystem() : CoreSystem("fixed-layout", Lattice::kSubtyping, Generalize::kBase) {}

  Type ascribe_object(const ShapeMap& shape, AscriptionContext& ctx) const override {
    return ascribe_fixed_layout(shape, ctx);
  }

  void check_trace(const CheckContext& ctx, ErrorReport& report) const override {
    const TypedTrace& t = ctx.typed;
    const TraceProgram& trace = *t.trace;
    std::set<SourceLoc> rw_all, rw_bad, proto_all, proto_bad;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (!ctx.reportable(i)) continue;
      const auto* fw = std::get_if<FieldWrite>(&trace[i].kind);
      if (!fw) continue;
      const SourceLoc& loc = trace[i].src;
      if (fw->name == kProtoField) {
        proto_all.insert(loc);
        const Type& ty = t.gamma_hat(fw->rhs);
        bool bad = false;
        if (auto o = as_object(ty)) {
          bad = !o->precise();
        } else if (ty.is(TypeKind::kUnion)) {
          bad = std::any_of(ty.members().begin(), ty.members().end(),
                            [](const Type& m) { return as_object(m).has_value(); });
        }
        if (bad) {
          proto_bad.insert(loc);
          report.add(loc, ErrorKind::kImpreciseProto);
        }
        continue;
      }
      std::vector<Type> objects;
      const Type& tb = t.gamma_hat(fw->base);
      if (tb.is(TypeKind::kUnion)) {
        for (const auto& m : tb.members()) {
          if (auto o = as_object(m)) objects.push_back(*o);
        }
      } else if (auto o = as_object(tb)) {
        objects.push_back(*o);
      }
      if (objects.empty()) continue;
      rw_all.insert(loc);
      // Inherited layout props and props added after initialization are
      // both outside the writable part of the layout.
      bool not_writable = std::any_of(objects.begin(), objects.end(), [&](const Type& o) {
        return o.rw_split() && !o.rw_split()->readwrite.count(fw->name);
      });
      if (not_writable) {
        rw_bad.insert(loc);
        report.add(loc, ErrorKind::kRoWrite);
      }
    }

    std::set<std::pair<SourceLoc, std::string>> inh_all, inh_bad;
    for (ObjId o = 0; o < t.eval.heap.size(); ++o) {
      const auto& shape = t.shapes[o];
      if (shape.shadowed.empty() || t.eval.heap[o].function) continue;
      const SourceLoc& loc = trace[t.eval.heap[o].alloc_stmt].src;
      if (!ctx.in_subject(loc)) continue;
      for (const auto& name : shape.shadowed) {
        inh_all.emplace(loc, name);
        auto own = property_type(t.object_types[o], name);
        for (ObjId q : shape.layout_parents) {
          auto inherited = property_type(t.object_types[q], name);
          if (own && inherited && !type_equal(*own, *inherited)) {
            if (inh_bad.emplace(loc, name).second) report.add(loc, ErrorKind::kShadowIncompat);
            break;
          }
        }
      }
    }
    LayoutCounts c;
    c.ro_rw_errors = rw_bad.size();
    c.ro_rw_total = rw_all.size();
    c.prototypal_errors = proto_bad.size();
    c.prototypal_total = proto_all.size();
    c.inheritance_errors = inh_bad.size();
    c.inheritance_total = inh_all.size();
    report.layout = c;
  }
};

class TagTestSystem : public CoreSystem {
 public:
  TagTestSystem() : CoreSystem("tagtest", Lattice::kUnion, Generalize::kBase) {}
  MergePolicy merge() const override {
    return MergePolicy{Flow::kSensitive, Context::kInsensitive, false};
  }
};

}  // namespace

const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names = {
      "sub/base",   "sub/poly",        "sub/intersect", "union/base",
      "union/poly", "union/intersect", "fixed-layout",
  };
  return names;
}

std::unique_ptr<TypeSystem> make_system(std::string_view name) {
  if (name == "fixed-layout") return std::make_unique<FixedLayoutSystem>();
  auto slash = name.find('/');
  if (slash != std::string_view::npos) {
    std::string_view lat = name.substr(0, slash);
    std::string_view gen = name.substr(slash + 1);
    std::optional<Lattice> l;
    std::optional<Generalize> g;
    if (lat == "sub") l = Lattice::kSubtyping;
    if (lat == "union") l = Lattice::kUnion;
    if (gen == "base") g = Generalize::kBase;
    if (gen == "poly") g = Generalize::kPoly;
    if (gen == "intersect") g = Generalize::kIntersect;
    if (l && g) return std::make_unique<CoreSystem>(std::string(name), *l, *g);
  }
  throw UnknownSystem("unknown type system: " + std::string(name));
}

std::unique_ptr<TypeSystem> make_tagtest_system() { return std::make_unique<TagTestSystem>(); }

}  // namespace tracetype
