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

#include "tracetype/framework.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <unordered_map>

namespace tracetype {

std::vector<CallFrame> collect_frames(const TraceProgram& trace, const Evaluation& eval) {
  std::vector<CallFrame> frames;
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace[i].kind;
    if (std::holds_alternative<BeginCall>(s)) {
      open.push_back(i);
    } else if (const auto* ec = std::get_if<EndCall>(&s)) {
      if (open.empty()) continue;
      std::size_t b = open.back();
      open.pop_back();
      const auto& bc = std::get<BeginCall>(trace[b].kind);
      CallFrame f;
      f.id = trace.var(ec->result).frame;
      f.function = frame_function(f.id);
      f.begin = b;
      f.end = i;
      f.callee = object_id(eval.value(bc.callee));
      f.native = f.id == "N";
      frames.push_back(std::move(f));
    }
  }
  std::sort(frames.begin(), frames.end(),
            [](const CallFrame& a, const CallFrame& b) { return a.begin < b.begin; });
  return frames;
}

// ---------------------------------------------------------------------------
// Shape maps.

namespace {

struct ValueLess {
  bool operator()(const ConcreteValue& a, const ConcreteValue& b) const {
    return value_less(a, b);
  }
};
using ValueSet = std::set<ConcreteValue, ValueLess>;
using Domain = std::map<std::string, ValueSet>;

class ShapeBuilder {
 public:
  ShapeBuilder(const Evaluation& eval, std::size_t trace_end)
      : heap_(eval.heap), trace_end_(trace_end) {
    std::size_t n = heap_.size();
    own_.resize(n);
    own_pre_.resize(n);
    parents_.resize(n);
    layout_parents_.resize(n);
    flat_.resize(n);
    flat_state_.assign(n, 0);
    pre_.resize(n);
    pre_state_.assign(n, 0);
    for (std::size_t o = 0; o < n; ++o) {
      const auto& h = heap_[o];
      std::size_t cutoff = h.end_init.value_or(trace_end_);
      for (const auto& b : h.bindings) {
        if (b.name == kProtoField) {
          if (auto p = object_id(b.value)) {
            add_unique(parents_[o], *p);
            if (b.stmt < cutoff) add_unique(layout_parents_[o], *p);
          }
          continue;
        }
        own_[o][b.name].insert(b.value);
        if (b.stmt < cutoff) own_pre_[o].insert(b.name);
      }
    }
  }

  ShapeMap build(ObjId o) {
    ShapeMap s;
    for (const auto& [name, values] : flattened(o)) {
      s.props.emplace(name, std::vector<ConcreteValue>(values.begin(), values.end()));
    }
    s.parents = parents_[o];
    s.layout_parents = layout_parents_[o];
    s.missing_end_init = !heap_[o].end_init.has_value();
    s.readwrite = own_pre_[o];
    std::set<std::string> inherited;
    for (ObjId q : layout_parents_[o]) {
      for (const auto& name : pre_domain(q)) inherited.insert(name);
    }
    for (const auto& name : inherited) {
      if (s.readwrite.count(name)) {
        s.shadowed.insert(name);
      } else {
        s.readonly.insert(name);
      }
    }
    for (const auto& name : s.readwrite) {
      const auto& values = own_[o][name];
      s.layout.emplace(name, std::vector<ConcreteValue>(values.begin(), values.end()));
    }
    for (const auto& name : s.readonly) {
      ValueSet values;
      for (ObjId q : layout_parents_[o]) {
        const auto& fq = flattened(q);
        auto it = fq.find(name);
        if (it != fq.end()) values.insert(it->second.begin(), it->second.end());
      }
      s.layout.emplace(name, std::vector<ConcreteValue>(values.begin(), values.end()));
    }
    return s;
  }

  // Values a parent contributes for a property, for shadowing checks.
  const Domain& flattened(ObjId o) {
    if (flat_state_[o] == 2) return flat_[o];
    if (flat_state_[o] == 1) return empty_;  // prototype cycle
    flat_state_[o] = 1;
    Domain d = own_[o];
    for (ObjId q : parents_[o]) {
      for (const auto& [name, values] : flattened(q)) {
        if (own_[o].count(name)) continue;
        d[name].insert(values.begin(), values.end());
      }
    }
    flat_[o] = std::move(d);
    flat_state_[o] = 2;
    return flat_[o];
  }

 private:
  static void add_unique(std::vector<ObjId>& v, ObjId x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  }

  const std::set<std::string>& pre_domain(ObjId o) {
    if (pre_state_[o] == 2) return pre_[o];
    if (pre_state_[o] == 1) return empty_names_;
    pre_state_[o] = 1;
    std::set<std::string> d = own_pre_[o];
    for (ObjId q : layout_parents_[o]) {
      for (const auto& name : pre_domain(q)) d.insert(name);
    }
    pre_[o] = std::move(d);
    pre_state_[o] = 2;
    return pre_[o];
  }

  const std::vector<HeapObject>& heap_;
  std::size_t trace_end_;
  std::vector<Domain> own_;
  std::vector<std::set<std::string>> own_pre_;
  std::vector<std::vector<ObjId>> parents_;
  std::vector<std::vector<ObjId>> layout_parents_;
  std::vector<Domain> flat_;
  std::vector<int> flat_state_;
  std::vector<std::set<std::string>> pre_;
  std::vector<int> pre_state_;
  Domain empty_;
  std::set<std::string> empty_names_;
};

std::string describe_value(const ConcreteValue& v, const Evaluation& eval, int depth) {
  auto id = object_id(v);
  if (!id) return render_value(v);
  if (std::holds_alternative<FuncRef>(v)) return "function " + std::get<FuncRef>(v).name;
  if (depth > 2) return "{...}";
  std::string out = "{";
  bool first = true;
  for (const auto& [name, pv] : eval.heap[*id].props) {
    if (!first) out += ",";
    first = false;
    out += name + ":" + describe_value(pv, eval, depth + 1);
  }
  return out + "}";
}

}  // namespace

std::vector<ShapeMap> build_shape_maps(const Evaluation& eval, std::size_t trace_end) {
  ShapeBuilder b(eval, trace_end);
  std::vector<ShapeMap> out;
  out.reserve(eval.heap.size());
  for (ObjId o = 0; o < eval.heap.size(); ++o) out.push_back(b.build(o));
  return out;
}

std::string render_shape_map(const ShapeMap& shape, const Evaluation& eval) {
  std::string out;
  bool first = true;
  for (const auto& [name, values] : shape.props) {
    if (!first) out += ", ";
    first = false;
    out += name + "↦{";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ",";
      out += describe_value(values[i], eval, 0);
    }
    out += "}";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ascription.

Type AscriptionContext::lub_values(std::span<const ConcreteValue> values) {
  Type t = Type::bottom();
  for (const auto& v : values) t = lub(t, value(v));
  return t;
}

Type ascribe_core_object(const ShapeMap& shape, AscriptionContext& ctx) {
  std::map<std::string, Type> props;
  for (const auto& [name, values] : shape.props) props.emplace(name, ctx.lub_values(values));
  return Type::object(std::move(props));
}

Type TypeSystem::ascribe_object(const ShapeMap& shape, AscriptionContext& ctx) const {
  return ascribe_core_object(shape, ctx);
}

std::string TypeSystem::context_key(const CallFrame&, const FuncSig&, const Type&) const {
  return "";
}

void TypeSystem::check_statement(const CheckContext& ctx, std::size_t stmt,
                                 ErrorReport& report) const {
  check_core(ctx, stmt, report);
}

void TypeSystem::check_trace(const CheckContext&, ErrorReport&) const {}

namespace {

// Ascribes values of one evaluated trace. Objects under construction are
// tracked on a stack; a revisit yields a RecVar and the enclosing result is
// wrapped in a Rec. Only results without references to enclosing
// constructions are memoized.
class Ascriber final : public AscriptionContext {
 public:
  Ascriber(const TypedTrace& t, const TypeSystem& sys) : t_(t), sys_(sys) {
    for (std::size_t k = 0; k < t.frames.size(); ++k) {
      if (t.frames[k].callee) calls_[*t.frames[k].callee].push_back(k);
    }
  }

  Type value(const ConcreteValue& v) override {
    return std::visit(
        [&](const auto& x) -> Type {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, NullV>) {
            return Type::null();
          } else if constexpr (std::is_same_v<T, UndefinedV>) {
            return Type::undefined();
          } else if constexpr (std::is_same_v<T, BoolV>) {
            return Type::boolean();
          } else if constexpr (std::is_same_v<T, NumberV>) {
            return Type::number();
          } else if constexpr (std::is_same_v<T, StringV>) {
            return Type::string();
          } else if constexpr (std::is_same_v<T, ObjRef>) {
            return ascribe(x.id, false);
          } else {
            return ascribe(x.id, true);
          }
        },
        v);
  }

  Type lub(const Type& a, const Type& b) const override { return sys_.lub(a, b); }

  Type object(ObjId id) {
    return ascribe(id, t_.eval.heap[id].function.has_value());
  }

  FuncSig invocation(std::size_t frame) {
    const auto& f = t_.frames[frame];
    const auto& bc = std::get<BeginCall>((*t_.trace)[f.begin].kind);
    const auto& ec = std::get<EndCall>((*t_.trace)[f.end].kind);
    FuncSig s;
    s.receiver = value(t_.eval.value(bc.receiver));
    for (VarId a : bc.args) s.params.push_back(value(t_.eval.value(a)));
    s.ret = value(t_.eval.value(ec.result));
    return s;
  }

 private:
  struct Pending {
    ObjId id;
    bool used = false;
    std::size_t min_ref = std::numeric_limits<std::size_t>::max();
  };

  static std::uint32_t binder_of(ObjId id) { return id + 1; }

  Type ascribe(ObjId id, bool function) {
    auto memo = memo_.find(id);
    if (memo != memo_.end()) return memo->second;
    for (std::size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].id == id) {
        stack_[k].used = true;
        stack_.back().min_ref = std::min(stack_.back().min_ref, k);
        return Type::rec_var(binder_of(id));
      }
    }
    std::size_t depth = stack_.size();
    stack_.push_back(Pending{id});
    Type body = function ? function_type(id) : sys_.ascribe_object(t_.shapes[id], *this);
    Pending p = stack_.back();
    stack_.pop_back();
    Type result = p.used ? Type::rec(binder_of(id), body) : body;
    if (p.min_ref < depth) {
      if (!stack_.empty()) stack_.back().min_ref = std::min(stack_.back().min_ref, p.min_ref);
    } else {
      memo_.emplace(id, result);
    }
    return result;
  }

  Type function_type(ObjId id) {
    auto it = calls_.find(id);
    if (it == calls_.end()) return Type::uncalled_function();
    std::vector<FuncSig> sigs;
    for (std::size_t k : it->second) sigs.push_back(invocation(k));
    return sys_.lub_fn(sigs);
  }

  const TypedTrace& t_;
  const TypeSystem& sys_;
  std::map<ObjId, std::vector<std::size_t>> calls_;
  std::map<ObjId, Type> memo_;
  std::vector<Pending> stack_;
};

Type field_read_type(const TypedTrace& t, VarId x, VarId base, const std::string& name) {
  const Type& tb = t.gamma_hat(base);
  auto from = [&](const Type& m) -> std::optional<Type> { return property_type(m, name); };
  std::optional<Type> found;
  if (tb.is(TypeKind::kUnion)) {
    for (const auto& m : tb.members()) {
      if ((found = from(m))) break;
    }
  } else {
    found = from(tb);
  }
  if (found) return *found;
  if (t.field_fallback == FieldFallback::kTop) return Type::top();
  if (auto p = property_type(t.gamma0[base], name)) return *p;
  return t.gamma0[x];
}

Type contribution(const TypedTrace& t, VarId x, const MergePolicy& policy) {
  const auto& d = t.def_stmt[x];
  if (!d) return Type::bottom();
  const auto& w = std::get<VarWrite>((*t.trace)[*d].kind);
  if (const auto* r = std::get_if<VarRead>(&w.rhs)) {
    return policy.propagate_assignments ? t.gamma_hat(r->var) : Type::bottom();
  }
  if (const auto* f = std::get_if<FieldRead>(&w.rhs)) {
    return field_read_type(t, x, f->base, f->name);
  }
  return Type::bottom();
}

}  // namespace

std::optional<Type> TypedTrace::variable_type(const std::string& name,
                                              const std::string& frame) const {
  for (VarId v = 0; v < trace->var_count(); ++v) {
    const auto& tv = trace->var(v);
    if (tv.name == name && tv.frame == frame) return gamma_hat(v);
  }
  return std::nullopt;
}

std::string merge_key(const TypedTrace& t, VarId v, const MergePolicy& policy) {
  const auto& tv = t.trace->var(v);
  std::string ctx;
  if (policy.context == Context::kSensitive) {
    auto it = t.frame_context.find(tv.frame);
    if (it != t.frame_context.end()) ctx = it->second;
  }
  std::string site;
  if (policy.flow == Flow::kSensitive) {
    std::string occ = "#" + std::to_string(tv.occurrence) + "@" + tv.frame;
    if (policy.context == Context::kSensitive) {
      site = occ;
    } else {
      const auto& d = t.def_stmt[v];
      const SourceLoc* loc = d ? &(*t.trace)[*d].src : nullptr;
      site = loc && loc->valid() ? loc->str() : occ;
    }
  }
  std::string key = tv.name;
  key += '\x1f';
  key += frame_function(tv.frame);
  key += '\x1f';
  key += ctx;
  key += '\x1f';
  key += site;
  return key;
}

TypedTrace type_trace(const TraceProgram& trace, const TypeSystem& system,
                      const TypingOptions& options) {
  TypedTrace t;
  t.trace = &trace;
  t.system = &system;
  t.field_fallback = options.field_fallback;
  t.eval = evaluate_trace(trace);
  t.shapes = build_shape_maps(t.eval, trace.size());
  t.frames = collect_frames(trace, t.eval);
  for (std::size_t k = 0; k < t.frames.size(); ++k) t.frame_of_begin[t.frames[k].begin] = k;
  t.def_stmt.assign(trace.var_count(), std::nullopt);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (auto v = trace.defined_var(i)) t.def_stmt[*v] = i;
  }

  Ascriber asc(t, system);
  t.object_types.reserve(t.eval.heap.size());
  for (ObjId o = 0; o < t.eval.heap.size(); ++o) t.object_types.push_back(asc.object(o));
  t.gamma0.reserve(trace.var_count());
  for (VarId v = 0; v < trace.var_count(); ++v) t.gamma0.push_back(asc.value(t.eval.value(v)));
  for (std::size_t k = 0; k < t.frames.size(); ++k) t.invocations.push_back(asc.invocation(k));

  const MergePolicy policy = system.merge();
  if (policy.context == Context::kSensitive) {
    for (std::size_t k = 0; k < t.frames.size(); ++k) {
      const auto& f = t.frames[k];
      if (f.native) continue;
      Type callee = f.callee ? t.object_types[*f.callee] : Type::top();
      t.frame_context[f.id] = system.context_key(f, t.invocations[k], callee);
    }
  }

  std::unordered_map<std::string, std::size_t> index;
  t.class_of.resize(trace.var_count());
  for (VarId v = 0; v < trace.var_count(); ++v) {
    auto [it, fresh] = index.emplace(merge_key(t, v, policy), t.classes.size());
    if (fresh) t.classes.emplace_back();
    t.classes[it->second].push_back(v);
    t.class_of[v] = it->second;
  }

  const std::size_t n = t.classes.size();
  std::vector<std::vector<std::size_t>> dependents(n);
  std::size_t edges = 0;
  for (VarId x = 0; x < trace.var_count(); ++x) {
    const auto& d = t.def_stmt[x];
    if (!d) continue;
    const auto& w = std::get<VarWrite>(trace[*d].kind);
    std::optional<VarId> src;
    if (const auto* r = std::get_if<VarRead>(&w.rhs)) {
      if (policy.propagate_assignments) src = r->var;
    } else if (const auto* f = std::get_if<FieldRead>(&w.rhs)) {
      src = f->base;
    }
    if (src) {
      dependents[t.class_of[*src]].push_back(t.class_of[x]);
      ++edges;
    }
  }
  for (auto& d : dependents) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
  }

  t.class_type.assign(n, Type::bottom());
  for (std::size_t c = 0; c < n; ++c) {
    for (VarId v : t.classes[c]) t.class_type[c] = system.lub(t.class_type[c], t.gamma0[v]);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < n; ++c) order[c] = c;
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::deque<std::size_t> work(order.begin(), order.end());
  std::vector<bool> queued(n, true);
  const std::size_t bound =
      options.max_steps ? options.max_steps : 64 * (n + edges) + 10000;
  while (!work.empty()) {
    if (++t.steps > bound) {
      throw NonTermination("propagation exceeded " + std::to_string(bound) + " steps");
    }
    std::size_t c = work.front();
    work.pop_front();
    queued[c] = false;
    Type next = t.class_type[c];
    for (VarId x : t.classes[c]) next = system.lub(next, contribution(t, x, policy));
    if (type_equal(next, t.class_type[c])) continue;
    t.class_type[c] = std::move(next);
    for (std::size_t d : dependents[c]) {
      if (!queued[d]) {
        queued[d] = true;
        work.push_back(d);
      }
    }
  }
  return t;
}

bool is_fixed_point(const TypedTrace& t) {
  const MergePolicy policy = t.system->merge();
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    Type next = t.class_type[c];
    for (VarId x : t.classes[c]) {
      next = t.system->lub(next, t.gamma0[x]);
      next = t.system->lub(next, contribution(t, x, policy));
    }
    if (!type_equal(next, t.class_type[c])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reports.

std::string error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::kWriteIncompat: return "write-incompat";
    case ErrorKind::kMissingProp: return "missing-prop";
    case ErrorKind::kCallIncompat: return "call-incompat";
    case ErrorKind::kTopUse: return "top-use";
    case ErrorKind::kRoWrite: return "ro-write";
    case ErrorKind::kImpreciseProto: return "imprecise-proto";
    case ErrorKind::kShadowIncompat: return "shadow-incompat";
  }
  return "unknown";
}

void ErrorReport::add(const SourceLoc& loc, ErrorKind kind, std::size_t count) {
  if (count == 0) return;
  entries_[loc][kind] += count;
}

std::size_t ErrorReport::total_errors() const {
  std::size_t n = 0;
  for (const auto& [loc, kinds] : entries_) {
    for (const auto& [k, c] : kinds) n += c;
  }
  return n;
}

std::size_t ErrorReport::count(ErrorKind kind) const {
  std::size_t n = 0;
  for (const auto& [loc, kinds] : entries_) {
    auto it = kinds.find(kind);
    if (it != kinds.end()) n += it->second;
  }
  return n;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string ErrorReport::summary_row() const {
  return csv_field(config_) + "," + std::to_string(error_locations()) + "," +
         std::to_string(total_errors());
}

std::string ErrorReport::to_csv() const {
  std::string out = "location,kind,count\n";
  for (const auto& [loc, kinds] : entries_) {
    for (const auto& [k, c] : kinds) {
      out += csv_field(loc.str()) + "," + error_kind_name(k) + "," + std::to_string(c) + "\n";
    }
  }
  out += "\nconfig,error_locations,total_errors\n";
  out += summary_row() + "\n";
  if (layout) out += "\nro_rw,prototypal,inheritance\n" + layout_row() + "\n";
  return out;
}

std::string ErrorReport::layout_row() const {
  if (!layout) return ",,";
  auto frac = [](std::size_t a, std::size_t b) {
    return std::to_string(a) + "/" + std::to_string(b);
  };
  return frac(layout->ro_rw_errors, layout->ro_rw_total) + "," +
         frac(layout->prototypal_errors, layout->prototypal_total) + "," +
         frac(layout->inheritance_errors, layout->inheritance_total);
}

bool CheckContext::in_subject(const SourceLoc& loc) const {
  if (!loc.valid()) return false;
  if (subject_prefixes.empty()) return true;
  return std::any_of(subject_prefixes.begin(), subject_prefixes.end(),
                     [&](const std::string& p) { return loc.file.rfind(p, 0) == 0; });
}

bool CheckContext::reportable(std::size_t stmt) const {
  return in_subject((*typed.trace)[stmt].src);
}

// ---------------------------------------------------------------------------
// Core checks.

namespace {

enum class Access { kFound, kMissing, kSkip };

struct FieldAccess {
  Access access = Access::kMissing;
  std::vector<Type> types;
};

FieldAccess access_field(const Type& base, const std::string& name) {
  std::vector<Type> objects;
  bool skip = false;
  auto consider = [&](const Type& m) {
    if (auto o = as_object(m)) {
      objects.push_back(*o);
    } else if (as_function(m) || m.is(TypeKind::kTypeVar) || m.is(TypeKind::kBottom) ||
               m.is(TypeKind::kRecVar)) {
      skip = true;
    }
  };
  if (base.is(TypeKind::kUnion)) {
    for (const auto& m : base.members()) consider(m);
  } else {
    consider(base);
  }
  FieldAccess out;
  for (const auto& o : objects) {
    auto it = o.props().find(name);
    if (it != o.props().end()) out.types.push_back(it->second);
  }
  if (!out.types.empty()) {
    out.access = Access::kFound;
  } else if (skip) {
    out.access = Access::kSkip;
  }
  return out;
}

bool fits_any(const Type& t, const std::vector<Type>& targets) {
  return std::any_of(targets.begin(), targets.end(),
                     [&](const Type& u) { return is_subtype(t, u); });
}

bool is_top(const Type& t) { return t.is(TypeKind::kTop); }

// Number of falsified antecedents for one signature.
std::size_t sig_failures(const TypedTrace& t, std::size_t stmt, const BeginCall& bc,
                         FuncSig sig) {
  if (has_type_vars(sig)) {
    std::optional<std::map<std::uint32_t, Type>> inst;
    auto f = t.frame_of_begin.find(stmt);
    if (f != t.frame_of_begin.end()) inst = match_type_vars(sig, t.invocations[f->second]);
    if (!inst && f != t.frame_of_begin.end()) {
      const auto& ec = std::get<EndCall>((*t.trace)[t.frames[f->second].end].kind);
      FuncSig observed;
      observed.receiver = t.gamma_hat(bc.receiver);
      for (VarId a : bc.args) observed.params.push_back(t.gamma_hat(a));
      observed.ret = t.gamma_hat(ec.result);
      inst = match_type_vars(sig, observed);
    }
    if (!inst) return 1;
    sig = substitute_type_vars(sig, *inst);
  }
  std::size_t failures = 0;
  const Type& recv = t.gamma_hat(bc.receiver);
  if (!is_top(recv) && !is_subtype(recv, sig.receiver)) ++failures;
  std::size_t n = std::min(bc.args.size(), sig.params.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Type& a = t.gamma_hat(bc.args[i]);
    if (!is_top(a) && !is_subtype(a, sig.params[i])) ++failures;
  }
  return failures;
}

std::size_t call_failures(const TypedTrace& t, std::size_t stmt, const BeginCall& bc,
                          const Type& callee) {
  std::vector<Type> fns;
  if (callee.is(TypeKind::kUnion)) {
    for (const auto& m : callee.members()) {
      if (auto f = as_function(m)) fns.push_back(*f);
    }
  } else if (auto f = as_function(callee)) {
    fns.push_back(*f);
  }
  if (fns.empty()) return 1;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& f : fns) {
    if (f.uncalled()) return 0;
    auto sigs = f.signatures();
    std::size_t n = 0;
    if (sigs.size() == 1) {
      n = sig_failures(t, stmt, bc, sigs[0]);
    } else {
      bool any = std::any_of(sigs.begin(), sigs.end(), [&](const FuncSig& s) {
        return sig_failures(t, stmt, bc, s) == 0;
      });
      n = any ? 0 : 1;
    }
    best = std::min(best, n);
  }
  return best;
}

}  // namespace

void check_core(const CheckContext& ctx, std::size_t stmt, ErrorReport& report) {
  const TypedTrace& t = ctx.typed;
  const auto& st = (*t.trace)[stmt];
  const SourceLoc& loc = st.src;
  std::size_t top_uses = 0;
  auto use = [&](VarId v) -> const Type& {
    const Type& ty = t.gamma_hat(v);
    if (is_top(ty)) ++top_uses;
    return ty;
  };
  if (const auto* w = std::get_if<VarWrite>(&st.kind)) {
    const Type& tx = use(w->lhs);
    if (const auto* r = std::get_if<VarRead>(&w->rhs)) {
      const Type& ty = use(r->var);
      if (!is_top(ty) && !is_top(tx) && !is_subtype(ty, tx)) {
        report.add(loc, ErrorKind::kWriteIncompat);
      }
    } else if (const auto* f = std::get_if<FieldRead>(&w->rhs)) {
      const Type& tb = use(f->base);
      if (!is_top(tb) && f->name != kProtoField) {
        auto acc = access_field(tb, f->name);
        if (acc.access == Access::kMissing) {
          report.add(loc, ErrorKind::kMissingProp);
        } else if (acc.access == Access::kFound && !is_top(tx)) {
          bool ok = std::any_of(acc.types.begin(), acc.types.end(),
                                [&](const Type& p) { return is_subtype(p, tx); });
          if (!ok) report.add(loc, ErrorKind::kWriteIncompat);
        }
      }
    }
  } else if (const auto* fw = std::get_if<FieldWrite>(&st.kind)) {
    const Type& tb = use(fw->base);
    const Type& ty = use(fw->rhs);
    if (!is_top(tb) && fw->name != kProtoField) {
      auto acc = access_field(tb, fw->name);
      if (acc.access == Access::kMissing) {
        report.add(loc, ErrorKind::kMissingProp);
      } else if (acc.access == Access::kFound && !is_top(ty) && !fits_any(ty, acc.types)) {
        report.add(loc, ErrorKind::kWriteIncompat);
      }
    }
  } else if (const auto* d = std::get_if<Delete>(&st.kind)) {
    use(d->base);
  } else if (const auto* bc = std::get_if<BeginCall>(&st.kind)) {
    const Type& callee = use(bc->callee);
    use(bc->receiver);
    for (VarId a : bc->args) use(a);
    if (!is_top(callee)) report.add(loc, ErrorKind::kCallIncompat, call_failures(t, stmt, *bc, callee));
  }
  report.add(loc, ErrorKind::kTopUse, top_uses);
}

ErrorReport typecheck_trace(const TypedTrace& typed,
                            const std::vector<std::string>& subject_prefixes) {
  ErrorReport report(typed.system->name());
  CheckContext ctx{typed, subject_prefixes};
  for (std::size_t i = 0; i < typed.trace->size(); ++i) {
    if (!ctx.reportable(i)) continue;
    typed.system->check_statement(ctx, i, report);
  }
  typed.system->check_trace(ctx, report);
  return report;
}

}  // namespace tracetype
