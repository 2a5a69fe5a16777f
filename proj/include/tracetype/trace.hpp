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

#ifndef TRACETYPE_TRACE_HPP_
#define TRACETYPE_TRACE_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace tracetype {

struct SourceLoc {
  std::string file;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool valid() const { return line != 0; }
  std::string str() const;  // file:line:col
  auto operator<=>(const SourceLoc&) const = default;
};

// One occurrence of a source variable in one call frame.
struct TraceVar {
  std::string name;
  std::uint32_t occurrence = 0;
  std::string frame;  // "G", "N" or <function>_<k>

  std::string str() const;  // name#occ@frame
  auto operator<=>(const TraceVar&) const = default;
};

// Function name part of a frame id ("f_2" -> "f"); G and N map to themselves.
std::string frame_function(std::string_view frame);

using VarId = std::uint32_t;

struct VarRead {
  VarId var;
};
struct FieldRead {
  VarId base;
  std::string name;
};
// Allocation of a fresh object; a function name marks a function object.
struct Allocate {
  std::optional<std::string> function;
};
struct NullLit {};
struct UndefinedLit {};
struct BoolLit {
  bool value;
};
struct NumberLit {
  double value;
};
struct StringLit {
  std::string value;
};

using TraceExpr = std::variant<VarRead, FieldRead, Allocate, NullLit, UndefinedLit,
                               BoolLit, NumberLit, StringLit>;

struct VarWrite {
  VarId lhs;
  TraceExpr rhs;
};
struct FieldWrite {
  VarId base;
  std::string name;
  VarId rhs;
};
struct Delete {
  VarId base;
  std::string name;
};
struct BeginCall {
  VarId callee;
  VarId receiver;
  std::vector<VarId> args;
};
struct EndCall {
  VarId result;
};
struct EndInit {
  VarId object;
};

using StatementKind = std::variant<VarWrite, FieldWrite, Delete, BeginCall, EndCall, EndInit>;

struct TraceStatement {
  StatementKind kind;
  SourceLoc src;  // line 0 when the statement has no source location
};

// A recorded execution: an interned variable table plus the statement list.
class TraceProgram {
 public:
  VarId intern(const TraceVar& v);
  std::optional<VarId> find(const TraceVar& v) const;
  const TraceVar& var(VarId id) const { return vars_.at(id); }
  std::size_t var_count() const { return vars_.size(); }

  void append(TraceStatement s) { statements_.push_back(std::move(s)); }
  std::span<const TraceStatement> statements() const { return statements_; }
  std::size_t size() const { return statements_.size(); }
  const TraceStatement& operator[](std::size_t i) const { return statements_[i]; }

  // Variables written by statement i (VarWrite lhs only).
  std::optional<VarId> defined_var(std::size_t i) const;

 private:
  std::vector<TraceVar> vars_;
  std::unordered_map<std::string, VarId> index_;
  std::vector<TraceStatement> statements_;
};

// Structural equality through variable names (ids may differ).
bool trace_equal(const TraceProgram& a, const TraceProgram& b);

class TraceError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUseBeforeDef, kDoubleAssignment, kUnmatchedEndCall };
  TraceError(Kind kind, std::size_t line, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

// Parses the line-oriented text form. Statement i of the result comes from
// the i-th non-blank, non-comment line. Validates single assignment and
// define-before-use; begin-call without a matching end-call is accepted.
TraceProgram parse_trace(std::string_view text);

// Checks single assignment, define-before-use and call bracketing.
void validate_trace(const TraceProgram& trace);

std::string serialize_trace(const TraceProgram& trace);
std::string serialize_statement(const TraceProgram& trace, const TraceStatement& s);

// Shortest round-trip decimal text, plus NaN, Infinity, -Infinity, -0.
std::string format_number(double v);
std::optional<double> parse_number(std::string_view s);

std::string quote_string(std::string_view s);

}  // namespace tracetype

#endif  // TRACETYPE_TRACE_HPP_
