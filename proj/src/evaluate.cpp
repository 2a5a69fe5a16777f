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

#include "tracetype/evaluate.hpp"

#include <cmath>
#include <set>

namespace tracetype {

std::optional<ObjId> object_id(const ConcreteValue& v) {
  if (const auto* o = std::get_if<ObjRef>(&v)) return o->id;
  if (const auto* f = std::get_if<FuncRef>(&v)) return f->id;
  return std::nullopt;
}

bool value_equal(const ConcreteValue& a, const ConcreteValue& b) {
  return !value_less(a, b) && !value_less(b, a);
}

bool value_less(const ConcreteValue& a, const ConcreteValue& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* x = std::get_if<BoolV>(&a)) return x->value < std::get<BoolV>(b).value;
  if (const auto* x = std::get_if<NumberV>(&a)) {
    double p = x->value;
    double q = std::get<NumberV>(b).value;
    if (std::isnan(p) || std::isnan(q)) return !std::isnan(p) && std::isnan(q);
    if (p == q) return std::signbit(p) && !std::signbit(q);
    return p < q;
  }
  if (const auto* x = std::get_if<StringV>(&a)) return x->value < std::get<StringV>(b).value;
  if (const auto* x = std::get_if<ObjRef>(&a)) return x->id < std::get<ObjRef>(b).id;
  if (const auto* x = std::get_if<FuncRef>(&a)) return x->id < std::get<FuncRef>(b).id;
  return false;
}

std::string render_value(const ConcreteValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NullV>) {
          return "null";
        } else if constexpr (std::is_same_v<T, UndefinedV>) {
          return "undefined";
        } else if constexpr (std::is_same_v<T, BoolV>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, NumberV>) {
          return format_number(x.value);
        } else if constexpr (std::is_same_v<T, StringV>) {
          return quote_string(x.value);
        } else if constexpr (std::is_same_v<T, ObjRef>) {
          return "obj" + std::to_string(x.id);
        } else {
          return "fn" + std::to_string(x.id) + "(" + x.name + ")";
        }
      },
      v);
}

ConcreteValue lookup_property(const std::vector<HeapObject>& heap, ObjId obj,
                              const std::string& name) {
  std::set<ObjId> seen;
  std::optional<ObjId> cur = obj;
  while (cur && seen.insert(*cur).second) {
    const auto& o = heap[*cur];
    auto it = o.props.find(name);
    if (it != o.props.end()) return it->second;
    cur = object_id(o.proto);
  }
  return UndefinedV{};
}

namespace {

ConcreteValue literal_value(const TraceExpr& e) {
  if (std::holds_alternative<NullLit>(e)) return NullV{};
  if (const auto* b = std::get_if<BoolLit>(&e)) return BoolV{b->value};
  if (const auto* n = std::get_if<NumberLit>(&e)) return NumberV{n->value};
  if (const auto* s = std::get_if<StringLit>(&e)) return StringV{s->value};
  return UndefinedV{};
}

}  // namespace

Evaluation evaluate_trace(const TraceProgram& trace) {
  Evaluation ev;
  ev.values.assign(trace.var_count(), UndefinedV{});
  auto& heap = ev.heap;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& st = trace[i];
    if (const auto* w = std::get_if<VarWrite>(&st.kind)) {
      ConcreteValue v;
      if (const auto* r = std::get_if<VarRead>(&w->rhs)) {
        v = ev.values[r->var];
      } else if (const auto* f = std::get_if<FieldRead>(&w->rhs)) {
        auto base = object_id(ev.values[f->base]);
        if (!base) {
          ev.defects.push_back({i, "field read on primitive"});
          v = UndefinedV{};
        } else if (f->name == kProtoField) {
          v = heap[*base].proto;
        } else {
          v = lookup_property(heap, *base, f->name);
        }
      } else if (const auto* a = std::get_if<Allocate>(&w->rhs)) {
        ObjId id = static_cast<ObjId>(heap.size());
        HeapObject o;
        o.alloc_stmt = i;
        o.function = a->function;
        heap.push_back(std::move(o));
        if (a->function) {
          v = FuncRef{id, *a->function, st.src};
        } else {
          v = ObjRef{id};
        }
      } else {
        v = literal_value(w->rhs);
      }
      ev.values[w->lhs] = std::move(v);
    } else if (const auto* fw = std::get_if<FieldWrite>(&st.kind)) {
      auto base = object_id(ev.values[fw->base]);
      if (!base) {
        ev.defects.push_back({i, "field write on primitive"});
        continue;
      }
      auto& o = heap[*base];
      const auto& v = ev.values[fw->rhs];
      o.bindings.push_back({fw->name, v, i});
      if (fw->name == kProtoField) {
        o.proto = v;
      } else {
        o.props[fw->name] = v;
      }
    } else if (const auto* d = std::get_if<Delete>(&st.kind)) {
      auto base = object_id(ev.values[d->base]);
      if (!base) {
        ev.defects.push_back({i, "delete on primitive"});
        continue;
      }
      auto& o = heap[*base];
      o.removals.push_back({d->name, i});
      if (d->name == kProtoField) {
        o.proto = NullV{};
      } else {
        o.props.erase(d->name);
      }
    } else if (const auto* ei = std::get_if<EndInit>(&st.kind)) {
      auto base = object_id(ev.values[ei->object]);
      if (base && !heap[*base].end_init) heap[*base].end_init = i;
    }
  }
  return ev;
}

}  // namespace tracetype
