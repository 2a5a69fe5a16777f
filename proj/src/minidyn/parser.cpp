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

#include <cctype>
#include <charconv>
#include <set>

#include "tracetype/minidyn/ast.hpp"

namespace tracetype::minidyn {

ParseError::ParseError(Loc loc, const std::string& what)
    : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
                         what),
      loc_(loc) {}

namespace {

enum class Tok { kIdent, kKeyword, kNumber, kString, kPunct, kEof };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  Loc loc;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "var",  "function", "return", "if",     "else",       "while", "true",   "false",
      "null", "undefined", "typeof", "delete", "instanceof", "new",   "this",   "proto",
  };
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Loc loc{line_, col_};
      if (pos_ >= s_.size()) {
        out.push_back({Tok::kEof, "", 0, loc});
        return out;
      }
      char c = s_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
          advance();
        }
        std::string w(s_.substr(start, pos_ - start));
        out.push_back({keywords().count(w) ? Tok::kKeyword : Tok::kIdent, w, 0, loc});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < s_.size() &&
                  std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        out.push_back(number(loc));
      } else if (c == '"' || c == '\'') {
        out.push_back(string(loc));
      } else {
        out.push_back(punct(loc));
      }
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*') {
        Loc loc{line_, col_};
        advance();
        advance();
        while (pos_ + 1 < s_.size() && !(s_[pos_] == '*' && s_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= s_.size()) throw ParseError(loc, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token number(Loc loc) {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      advance();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
      digits();
    }
    std::string text(s_.substr(start, pos_ - start));
    double v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
      throw ParseError(loc, "malformed number " + text);
    }
    return {Tok::kNumber, text, v, loc};
  }

  Token string(Loc loc) {
    char quote = s_[pos_];
    advance();
    std::string out;
    while (true) {
      if (pos_ >= s_.size() || s_[pos_] == '\n') throw ParseError(loc, "unterminated string");
      char c = s_[pos_];
      advance();
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= s_.size()) throw ParseError(loc, "unterminated string");
        char e = s_[pos_];
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          default: throw ParseError(loc, std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return {Tok::kString, out, 0, loc};
  }

  Token punct(Loc loc) {
    static const char* kOps[] = {"===", "!==", "==", "!=", "<=", ">=", "&&", "||", "{", "}",
                                 "(",   ")",   "[",  "]",  ";",  ",",  ".",  ":",  "=", "<",
                                 ">",   "+",   "-",  "*",  "/",  "%",  "!"};
    for (const char* op : kOps) {
      std::string_view o(op);
      if (s_.substr(pos_, o.size()) == o) {
        for (std::size_t i = 0; i < o.size(); ++i) advance();
        return {Tok::kPunct, std::string(o), 0, loc};
      }
    }
    throw ParseError(loc, std::string("unexpected character '") + s_[pos_] + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, Program& prog) : t_(std::move(toks)), prog_(prog) {}

  void program() {
    while (!at(Tok::kEof)) prog_.body.push_back(statement());
  }

 private:
  const Token& cur() const { return t_[i_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at(Tok k, std::string_view text) const { return cur().kind == k && cur().text == text; }
  bool punct(std::string_view p) const { return at(Tok::kPunct, p); }
  bool keyword(std::string_view k) const { return at(Tok::kKeyword, k); }

  Token take() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& what) {
    std::string near = at(Tok::kEof) ? "end of input" : "'" + cur().text + "'";
    throw ParseError(cur().loc, what + " near " + near);
  }

  void expect_punct(std::string_view p) {
    if (!punct(p)) fail("expected '" + std::string(p) + "'");
    take();
  }

  std::string ident() {
    if (!at(Tok::kIdent)) fail("expected identifier");
    return take().text;
  }

  void end_statement() {
    if (punct(";")) take();
  }

  ExprPtr node(ExprKind k, Loc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->loc = loc;
    e->id = prog_.node_count++;
    return e;
  }

  StmtPtr statement() {
    auto s = std::make_unique<Stmt>();
    s->loc = cur().loc;
    if (keyword("var")) {
      take();
      s->kind = StmtKind::kVar;
      do {
        Loc loc = cur().loc;
        std::string name = ident();
        ExprPtr init;
        if (punct("=")) {
          take();
          init = assignment();
        }
        s->decls.emplace_back(std::move(name), std::move(init));
        s->decl_locs.push_back(loc);
        if (!punct(",")) break;
        take();
      } while (true);
      end_statement();
    } else if (keyword("function")) {
      take();
      s->kind = StmtKind::kFunction;
      s->function = function_rest(s->loc, true);
    } else if (keyword("return")) {
      take();
      s->kind = StmtKind::kReturn;
      if (!punct(";") && !punct("}") && !at(Tok::kEof)) s->expr = expression();
      end_statement();
    } else if (keyword("if")) {
      take();
      s->kind = StmtKind::kIf;
      expect_punct("(");
      s->expr = expression();
      expect_punct(")");
      s->body.push_back(statement());
      if (keyword("else")) {
        take();
        s->has_else = true;
        s->else_body.push_back(statement());
      }
    } else if (keyword("while")) {
      take();
      s->kind = StmtKind::kWhile;
      expect_punct("(");
      s->expr = expression();
      expect_punct(")");
      s->body.push_back(statement());
    } else if (punct("{")) {
      take();
      s->kind = StmtKind::kBlock;
      while (!punct("}")) {
        if (at(Tok::kEof)) fail("expected '}'");
        s->body.push_back(statement());
      }
      take();
    } else if (punct(";")) {
      take();
      s->kind = StmtKind::kEmpty;
    } else {
      s->kind = StmtKind::kExpr;
      s->expr = expression();
      end_statement();
    }
    return s;
  }

  std::shared_ptr<FunctionDecl> function_rest(Loc loc, bool named) {
    auto f = std::make_shared<FunctionDecl>();
    f->loc = loc;
    if (at(Tok::kIdent)) {
      f->name = take().text;
    } else if (named) {
      fail("expected function name");
    }
    expect_punct("(");
    while (!punct(")")) {
      f->param_locs.push_back(cur().loc);
      f->params.push_back(ident());
      if (!punct(",")) break;
      take();
    }
    expect_punct(")");
    expect_punct("{");
    while (!punct("}")) {
      if (at(Tok::kEof)) fail("expected '}'");
      f->body.push_back(statement());
    }
    f->end_loc = cur().loc;
    take();
    return f;
  }

  ExprPtr expression() { return assignment(); }

  ExprPtr assignment() {
    ExprPtr lhs = logical_or();
    if (punct("=")) {
      Token op = take();
      if (lhs->kind != ExprKind::kIdent && lhs->kind != ExprKind::kMember &&
          lhs->kind != ExprKind::kIndex) {
        throw ParseError(op.loc, "invalid assignment target");
      }
      auto e = node(ExprKind::kAssign, lhs->loc);
      e->children.push_back(std::move(lhs));
      e->children.push_back(assignment());
      return e;
    }
    return lhs;
  }

  ExprPtr binary_level(int level) {
    static const std::vector<std::vector<std::string>> kLevels = {
        {"||"}, {"&&"}, {"==", "!=", "===", "!=="}, {"<", ">", "<=", ">=", "instanceof"},
        {"+", "-"}, {"*", "/", "%"},
    };
    if (level == static_cast<int>(kLevels.size())) return unary();
    ExprPtr lhs = binary_level(level + 1);
    while (true) {
      bool matched = false;
      for (const auto& op : kLevels[level]) {
        if ((cur().kind == Tok::kPunct || cur().kind == Tok::kKeyword) && cur().text == op) {
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
      Token op = take();
      bool logical = op.text == "&&" || op.text == "||";
      auto e = node(logical ? ExprKind::kLogical : ExprKind::kBinary, op.loc);
      e->text = op.text;
      e->children.push_back(std::move(lhs));
      e->children.push_back(binary_level(level + 1));
      lhs = std::move(e);
    }
  }

  ExprPtr logical_or() { return binary_level(0); }

  ExprPtr unary() {
    if (punct("!") || punct("-") || keyword("typeof") || keyword("delete")) {
      Token op = take();
      auto e = node(ExprKind::kUnary, op.loc);
      e->text = op.text;
      e->children.push_back(unary());
      if (op.text == "delete" && e->children[0]->kind != ExprKind::kMember &&
          e->children[0]->kind != ExprKind::kIndex) {
        throw ParseError(op.loc, "delete needs a property reference");
      }
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e;
    if (keyword("new")) {
      Token kw = take();
      e = node(ExprKind::kNew, kw.loc);
      e->children.push_back(member_only());
      if (punct("(")) arguments(*e);
    } else {
      e = primary();
    }
    while (true) {
      if (punct(".")) {
        take();
        auto m = node(ExprKind::kMember, e->loc);
        if (!at(Tok::kIdent) && !at(Tok::kKeyword)) fail("expected property name");
        m->text = take().text;
        m->children.push_back(std::move(e));
        e = std::move(m);
      } else if (punct("[")) {
        take();
        auto m = node(ExprKind::kIndex, e->loc);
        m->children.push_back(std::move(e));
        m->children.push_back(expression());
        expect_punct("]");
        e = std::move(m);
      } else if (punct("(")) {
        auto c = node(ExprKind::kCall, e->loc);
        c->children.push_back(std::move(e));
        arguments(*c);
        e = std::move(c);
      } else {
        return e;
      }
    }
  }

  // Callee of a new expression: primary with member accesses, no calls.
  ExprPtr member_only() {
    ExprPtr e = primary();
    while (punct(".") || punct("[")) {
      if (punct(".")) {
        take();
        auto m = node(ExprKind::kMember, e->loc);
        m->text = ident();
        m->children.push_back(std::move(e));
        e = std::move(m);
      } else {
        take();
        auto m = node(ExprKind::kIndex, e->loc);
        m->children.push_back(std::move(e));
        m->children.push_back(expression());
        expect_punct("]");
        e = std::move(m);
      }
    }
    return e;
  }

  void arguments(Expr& call) {
    expect_punct("(");
    while (!punct(")")) {
      call.children.push_back(assignment());
      if (!punct(",")) break;
      take();
    }
    expect_punct(")");
  }

  ExprPtr primary() {
    const Token& tk = cur();
    Loc loc = tk.loc;
    switch (tk.kind) {
      case Tok::kNumber: {
        auto e = node(ExprKind::kNumber, loc);
        e->number = take().number;
        return e;
      }
      case Tok::kString: {
        auto e = node(ExprKind::kString, loc);
        e->text = take().text;
        return e;
      }
      case Tok::kIdent: {
        auto e = node(ExprKind::kIdent, loc);
        e->text = take().text;
        return e;
      }
      case Tok::kKeyword: {
        if (tk.text == "true" || tk.text == "false") {
          auto e = node(ExprKind::kBool, loc);
          e->boolean = take().text == "true";
          return e;
        }
        if (tk.text == "null") {
          take();
          return node(ExprKind::kNull, loc);
        }
        if (tk.text == "undefined") {
          take();
          return node(ExprKind::kUndefined, loc);
        }
        if (tk.text == "this") {
          take();
          return node(ExprKind::kThis, loc);
        }
        if (tk.text == "function") {
          take();
          auto e = node(ExprKind::kFunction, loc);
          e->function = function_rest(loc, false);
          return e;
        }
        fail("unexpected keyword");
      }
      case Tok::kPunct: {
        if (tk.text == "(") {
          take();
          ExprPtr e = expression();
          expect_punct(")");
          return e;
        }
        if (tk.text == "{") return object_literal();
        if (tk.text == "[") {
          take();
          auto e = node(ExprKind::kArray, loc);
          while (!punct("]")) {
            e->children.push_back(assignment());
            if (!punct(",")) break;
            take();
          }
          expect_punct("]");
          return e;
        }
        fail("unexpected token");
      }
      case Tok::kEof:
        fail("unexpected end of input");
    }
    fail("unexpected token");
  }

  ExprPtr object_literal() {
    auto e = node(ExprKind::kObject, cur().loc);
    expect_punct("{");
    while (!punct("}")) {
      std::string name;
      if (at(Tok::kIdent) || at(Tok::kKeyword) || at(Tok::kString)) {
        name = take().text;
      } else if (at(Tok::kNumber)) {
        name = take().text;
      } else {
        fail("expected property name");
      }
      expect_punct(":");
      e->props.emplace_back(std::move(name), assignment());
      if (!punct(",")) break;
      take();
    }
    expect_punct("}");
    if (keyword("proto")) {
      take();
      e->proto = postfix();
    }
    return e;
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
  Program& prog_;
};

}  // namespace

Program parse_program(std::string_view source, std::string file) {
  Program prog;
  prog.file = std::move(file);
  Lexer lex(source);
  Parser p(lex.run(), prog);
  p.program();
  return prog;
}

}  // namespace tracetype::minidyn
