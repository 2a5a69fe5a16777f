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

#ifndef TRACETYPE_FRAMEWORK_HPP_
#define TRACETYPE_FRAMEWORK_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracetype/evaluate.hpp"
#include "tracetype/trace.hpp"
#include "tracetype/types.hpp"

namespace tracetype {

enum class Flow { kInsensitive, kSensitive };
enum class Context { kInsensitive, kSensitive };

struct MergePolicy {
  Flow flow = Flow::kInsensitive;
  Context context = Context::kInsensitive;
  bool propagate_assignments = true;
};

// One completed call, from its begin-call to its end-call.
struct CallFrame {
  std::string id;        // frame of the end-call variable
  std::string function;  // function part of the frame id
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<ObjId> callee;
  bool native = false;
};

std::vector<CallFrame> collect_frames(const TraceProgram& trace, const Evaluation& eval);

// Property domains of one object over the whole execution, and the
// restricted view up to its end-initialization used by fixed layouts.
struct ShapeMap {
  // Own properties shadow inherited ones; __proto__ is excluded.
  std::map<std::string, std::vector<ConcreteValue>> props;
  std::vector<ObjId> parents;

  std::map<std::string, std::vector<ConcreteValue>> layout;
  std::set<std::string> readwrite;  // own, bound before end-initialization
  std::set<std::string> readonly;   // inherited, bound before end-initialization
  std::set<std::string> shadowed;   // own layout props also present in a parent layout
  std::vector<ObjId> layout_parents;
  bool missing_end_init = false;
};

std::vector<ShapeMap> build_shape_maps(const Evaluation& eval, std::size_t trace_end);

// "a↦{4,10}, b↦{{c:false}}" style rendering of the flattened domain.
std::string render_shape_map(const ShapeMap& shape, const Evaluation& eval);

class AscriptionContext {
 public:
  virtual ~AscriptionContext() = default;
  virtual Type value(const ConcreteValue& v) = 0;
  virtual Type lub(const Type& a, const Type& b) const = 0;
  Type lub_values(std::span<const ConcreteValue> values);
};

// Object types built from the flattened domain; imprecise, no split.
Type ascribe_core_object(const ShapeMap& shape, AscriptionContext& ctx);

class ErrorReport;
class TypedTrace;

struct CheckContext {
  const TypedTrace& typed;
  std::vector<std::string> subject_prefixes;

  // Statement has a source location inside the analyzed subject.
  bool reportable(std::size_t stmt) const;
  bool in_subject(const SourceLoc& loc) const;
};

// A type system plugin: lattice, function generalization, merge policy,
// object ascription and the per-statement well-formedness check.
class TypeSystem {
 public:
  virtual ~TypeSystem() = default;
  virtual std::string name() const = 0;
  virtual Type lub(const Type& a, const Type& b) const = 0;
  virtual Type lub_fn(std::span<const FuncSig> invocations) const = 0;
  virtual MergePolicy merge() const = 0;
  virtual Type ascribe_object(const ShapeMap& shape, AscriptionContext& ctx) const;
  // Key distinguishing call contexts under context-sensitive merging.
  virtual std::string context_key(const CallFrame& frame, const FuncSig& invocation,
                                  const Type& callee_type) const;
  virtual void check_statement(const CheckContext& ctx, std::size_t stmt,
                               ErrorReport& report) const;
  virtual void check_trace(const CheckContext& ctx, ErrorReport& report) const;
};

enum class FieldFallback { kPrecise, kTop };

struct TypingOptions {
  std::size_t max_steps = 0;  // 0 picks a bound from the problem size
  std::optional<std::uint64_t> shuffle_seed;
  FieldFallback field_fallback = FieldFallback::kPrecise;
};

class NonTermination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A trace together with everything derived for one type system.
class TypedTrace {
 public:
  const TraceProgram* trace = nullptr;
  const TypeSystem* system = nullptr;
  Evaluation eval;
  std::vector<ShapeMap> shapes;
  std::vector<CallFrame> frames;
  std::vector<FuncSig> invocations;  // per frame, ascribed
  std::map<std::size_t, std::size_t> frame_of_begin;
  std::map<std::string, std::string> frame_context;  // frame id -> context key
  std::vector<std::optional<std::size_t>> def_stmt;  // per VarId
  std::vector<Type> gamma0;                          // per VarId
  std::vector<std::vector<VarId>> classes;
  std::vector<std::size_t> class_of;  // per VarId
  std::vector<Type> class_type;       // propagated type per class
  std::vector<Type> object_types;     // per ObjId
  std::size_t steps = 0;
  FieldFallback field_fallback = FieldFallback::kPrecise;

  const Type& gamma_hat(VarId v) const { return class_type[class_of[v]]; }
  // Propagated type of any occurrence of name in frame.
  std::optional<Type> variable_type(const std::string& name, const std::string& frame) const;
};

TypedTrace type_trace(const TraceProgram& trace, const TypeSystem& system,
                      const TypingOptions& options = {});

// Merge-class key of a variable occurrence under a policy.
std::string merge_key(const TypedTrace& typed, VarId v, const MergePolicy& policy);

// The propagated environment is stable under one more propagation round.
bool is_fixed_point(const TypedTrace& typed);

enum class ErrorKind {
  kWriteIncompat,
  kMissingProp,
  kCallIncompat,
  kTopUse,
  kRoWrite,
  kImpreciseProto,
  kShadowIncompat,
};

std::string error_kind_name(ErrorKind k);

struct LayoutCounts {
  std::size_t ro_rw_errors = 0;
  std::size_t ro_rw_total = 0;
  std::size_t prototypal_errors = 0;
  std::size_t prototypal_total = 0;
  std::size_t inheritance_errors = 0;
  std::size_t inheritance_total = 0;
};

class ErrorReport {
 public:
  explicit ErrorReport(std::string config = "") : config_(std::move(config)) {}

  void add(const SourceLoc& loc, ErrorKind kind, std::size_t count = 1);
  const std::string& config() const { return config_; }
  const std::map<SourceLoc, std::map<ErrorKind, std::size_t>>& entries() const {
    return entries_;
  }
  std::size_t error_locations() const { return entries_.size(); }
  std::size_t total_errors() const;
  std::size_t count(ErrorKind kind) const;

  std::optional<LayoutCounts> layout;

  std::string to_csv() const;  // location,kind,count rows, then a summary block
  std::string summary_row() const;
  // "errors/total" for ro_rw, prototypal, inheritance; empty cells without layout data.
  std::string layout_row() const;

 private:
  std::string config_;
  std::map<SourceLoc, std::map<ErrorKind, std::size_t>> entries_;
};

std::string csv_field(const std::string& s);

// The core rules shared by every system.
void check_core(const CheckContext& ctx, std::size_t stmt, ErrorReport& report);

ErrorReport typecheck_trace(const TypedTrace& typed,
                            const std::vector<std::string>& subject_prefixes = {});

}  // namespace tracetype

#endif  // TRACETYPE_FRAMEWORK_HPP_
