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

#ifndef TRACETYPE_MINIDYN_AST_HPP_
#define TRACETYPE_MINIDYN_AST_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracetype::minidyn {

struct Loc {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

struct Expr;
struct Stmt;
struct FunctionDecl;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
  kNumber,
  kString,
  kBool,
  kNull,
  kUndefined,
  kIdent,
  kThis,
  kObject,    // props, optional proto clause
  kArray,     // children = elements
  kFunction,  // function expression
  kMember,    // children[0].text
  kIndex,     // children[0][children[1]]
  kCall,      // children[0](children[1..])
  kNew,       // new children[0](children[1..])
  kUnary,     // text = "!", "-", "typeof", "delete"
  kBinary,    // text = operator
  kLogical,   // text = "&&" or "||"
  kAssign,    // children[0] = children[1]
};

struct Expr {
  ExprKind kind;
  Loc loc;
  std::uint32_t id = 0;  // unique per program, names temporaries
  double number = 0;
  bool boolean = false;
  std::string text;
  std::vector<ExprPtr> children;
  std::vector<std::pair<std::string, ExprPtr>> props;
  ExprPtr proto;
  std::shared_ptr<FunctionDecl> function;
};

enum class StmtKind { kExpr, kVar, kFunction, kReturn, kIf, kWhile, kBlock, kEmpty };

struct Stmt {
  StmtKind kind;
  Loc loc;
  ExprPtr expr;  // expression, var initializer, return value, condition
  std::string name;  // var name
  std::vector<std::pair<std::string, ExprPtr>> decls;  // var a = 1, b
  std::vector<Loc> decl_locs;
  std::vector<StmtPtr> body;  // block, while body, if-then
  std::vector<StmtPtr> else_body;
  bool has_else = false;
  std::shared_ptr<FunctionDecl> function;
};

struct FunctionDecl {
  std::string name;  // empty for anonymous function expressions
  std::vector<std::string> params;
  std::vector<Loc> param_locs;
  std::vector<StmtPtr> body;
  Loc loc;
  Loc end_loc;
};

struct Program {
  std::string file;
  std::vector<StmtPtr> body;
  std::uint32_t node_count = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(Loc loc, const std::string& what);
  Loc loc() const { return loc_; }

 private:
  Loc loc_;
};

Program parse_program(std::string_view source, std::string file = "<input>");

}  // namespace tracetype::minidyn

#endif  // TRACETYPE_MINIDYN_AST_HPP_
