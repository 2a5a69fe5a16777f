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

#ifndef TRACETYPE_EVALUATE_HPP_
#define TRACETYPE_EVALUATE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tracetype/trace.hpp"

namespace tracetype {

using ObjId = std::uint32_t;

struct NullV {};
struct UndefinedV {};
struct BoolV {
  bool value;
};
struct NumberV {
  double value;
};
struct StringV {
  std::string value;
};
struct ObjRef {
  ObjId id;
};
// A function object; also an object (see object_id()).
struct FuncRef {
  ObjId id;
  std::string name;
  SourceLoc decl;
};

using ConcreteValue = std::variant<NullV, UndefinedV, BoolV, NumberV, StringV, ObjRef, FuncRef>;

std::optional<ObjId> object_id(const ConcreteValue& v);
bool value_equal(const ConcreteValue& a, const ConcreteValue& b);
// Total order: by variant index, then payload (numbers numerically, NaN last).
bool value_less(const ConcreteValue& a, const ConcreteValue& b);
std::string render_value(const ConcreteValue& v);

inline constexpr const char* kProtoField = "__proto__";

// Everything that ever happened to one heap object.
struct HeapObject {
  struct Binding {
    std::string name;
    ConcreteValue value;
    std::size_t stmt;  // statement index of the write
  };
  struct Removal {
    std::string name;
    std::size_t stmt;
  };

  std::size_t alloc_stmt = 0;
  std::optional<std::string> function;  // set for function objects
  std::vector<Binding> bindings;       // includes __proto__ writes
  std::vector<Removal> removals;
  std::optional<std::size_t> end_init;

  // Current state, maintained during evaluation.
  std::map<std::string, ConcreteValue> props;
  ConcreteValue proto = NullV{};
};

struct EvalDefect {
  std::size_t stmt;
  std::string what;
};

struct Evaluation {
  std::vector<ConcreteValue> values;  // indexed by VarId
  std::vector<HeapObject> heap;       // indexed by ObjId
  std::vector<EvalDefect> defects;

  const ConcreteValue& value(VarId v) const { return values.at(v); }
};

// Replays a trace over a fresh heap. Objects are numbered by allocation
// order. Field reads follow the current prototype chain and yield undefined
// for absent properties. Field access on primitives is recorded as a defect
// and skipped (reads yield undefined).
Evaluation evaluate_trace(const TraceProgram& trace);

// Looks up a property through the prototype chain of the current heap state.
ConcreteValue lookup_property(const std::vector<HeapObject>& heap, ObjId obj,
                              const std::string& name);

}  // namespace tracetype

#endif  // TRACETYPE_EVALUATE_HPP_
