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

#ifndef TRACETYPE_MINIDYN_INTERPRETER_HPP_
#define TRACETYPE_MINIDYN_INTERPRETER_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "tracetype/evaluate.hpp"
#include "tracetype/minidyn/ast.hpp"
#include "tracetype/trace.hpp"

namespace tracetype::minidyn {

struct Object;
using ObjPtr = std::shared_ptr<Object>;

struct Undefined {
  bool operator==(const Undefined&) const = default;
};
struct Null {
  bool operator==(const Null&) const = default;
};

using Value = std::variant<Undefined, Null, bool, double, std::string, ObjPtr>;

enum class Builtin { kNone, kArray, kPush, kPop, kConcat, kIndexOf, kSort };

std::string_view builtin_name(Builtin b);
std::optional<Builtin> builtin_by_name(std::string_view name);

struct Scope;

struct Object {
  std::vector<std::pair<std::string, Value>> props;  // insertion order
  Value proto = Null{};
  bool is_array = false;

  std::shared_ptr<const FunctionDecl> function;
  std::shared_ptr<Scope> closure;
  Builtin builtin = Builtin::kNone;

  std::optional<ObjId> trace_id;
  std::optional<VarId> escape;  // latest occurrence of its escape variable
  std::optional<VarId> home;    // latest program variable holding it

  bool is_function() const { return function != nullptr || builtin != Builtin::kNone; }
  const Value* find(std::string_view name) const;
  Value* find(std::string_view name);
  void set(const std::string& name, Value v);
  bool erase(std::string_view name);
};

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(Loc loc, const std::string& what);
  Loc loc() const { return loc_; }

 private:
  Loc loc_;
};

class DuplicateModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownBuiltin : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ECMAScript-style conversions.
double to_number(const Value& v);
std::string to_string(const Value& v);
bool to_boolean(const Value& v);
std::string property_key(const Value& v);
std::string format_js_number(double v);
std::string type_of(const Value& v);
bool strict_equals(const Value& a, const Value& b);
// Identity for objects, bit-level for numbers (NaN equals NaN).
bool same_value(const Value& a, const Value& b);

// Implicit conversions a native operator applies to its operands: for each
// operand, the converted value if a conversion happens, and the result.
struct CoercionPlan {
  std::vector<std::optional<Value>> converted;
  Value result;
};

// Operators: + - * / % < > <= >= == != === !== ! unary- and the boolean test
// "test" used by conditions and logical operators.
CoercionPlan plan_coercions(std::string_view op, std::span<const Value> operands);

class Recorder;

// Emission interface handed to manual native models.
class NativeCall {
 public:
  virtual ~NativeCall() = default;
  virtual Builtin builtin() const = 0;
  virtual std::size_t object_count() const = 0;            // receiver and object args
  virtual VarId escape_var(std::size_t object) const = 0;  // current escape variable
  virtual const std::vector<std::pair<std::string, Value>>& before(std::size_t object) const = 0;
  virtual const std::vector<std::pair<std::string, Value>>& after(std::size_t object) const = 0;
  virtual const Value& result() const = 0;
  virtual VarId read_field(VarId base, const std::string& name) = 0;
  virtual void write_field(VarId base, const std::string& name, VarId value) = 0;
  virtual VarId from_native(const Value& v) = 0;
};

// Emits the statements for one native call given its pre and post states;
// returns the variable holding the result.
using ManualModel = std::function<VarId(NativeCall&)>;

struct RecordOptions {
  std::string file = "<input>";
  std::size_t max_statements = 2'000'000;
};

struct OracleEntry {
  VarId var;
  ConcreteValue value;
};

struct RecordResult {
  TraceProgram trace;
  std::optional<std::string> error;  // runtime failure; trace holds the prefix
  std::optional<Loc> error_loc;
  std::vector<OracleEntry> oracle;   // value the interpreter computed per write
  std::size_t prelude = 0;           // statements modeling the global object
};

class Interpreter {
 public:
  Interpreter();
  // Replaces the inferred model of a builtin with a hand-written one.
  void register_manual_model(std::string_view builtin, ManualModel model);
  bool has_manual_model(Builtin b) const { return models_.count(b) > 0; }

  RecordResult run(const Program& program, const RecordOptions& options = {}) const;

 private:
  std::map<Builtin, ManualModel> models_;
};

// Parses and records with the default interpreter; a parse error throws.
RecordResult run_and_record(std::string_view source, const RecordOptions& options = {});

// (file, line) pairs that produced at least one statement.
std::set<std::pair<std::string, std::uint32_t>> covered_lines(const TraceProgram& trace);

}  // namespace tracetype::minidyn

#endif  // TRACETYPE_MINIDYN_INTERPRETER_HPP_
