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

#include "tracetype/trace.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace tracetype {

std::string SourceLoc::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::string TraceVar::str() const {
  return name + "#" + std::to_string(occurrence) + "@" + frame;
}

std::string frame_function(std::string_view frame) {
  auto pos = frame.rfind('_');
  if (pos == std::string_view::npos) return std::string(frame);
  return std::string(frame.substr(0, pos));
}

VarId TraceProgram::intern(const TraceVar& v) {
  std::string key = v.str();
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  VarId id = static_cast<VarId>(vars_.size());
  vars_.push_back(v);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<VarId> TraceProgram::find(const TraceVar& v) const {
  auto it = index_.find(v.str());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VarId> TraceProgram::defined_var(std::size_t i) const {
  if (const auto* w = std::get_if<VarWrite>(&statements_[i].kind)) return w->lhs;
  return std::nullopt;
}

TraceError::TraceError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      kind_(kind),
      line_(line) {}

// ---------------------------------------------------------------------------
// Numbers and strings.

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (v == 0) return std::signbit(v) ? "-0" : "0";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (s == "Infinity") return std::numeric_limits<double>::infinity();
  if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::string property_text(const std::string& name) {
  bool plain = !name.empty();
  for (char c : name) plain = plain && name_char(c);
  return plain ? name : quote_string(name);
}

std::string number_text(double v) { return format_number(v); }

std::string expr_text(const TraceProgram& t, const TraceExpr& e) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarRead>) {
          return t.var(x.var).str();
        } else if constexpr (std::is_same_v<T, FieldRead>) {
          return t.var(x.base).str() + "." + property_text(x.name);
        } else if constexpr (std::is_same_v<T, Allocate>) {
          return x.function ? "allocate function " + *x.function : "allocate";
        } else if constexpr (std::is_same_v<T, NullLit>) {
          return "null";
        } else if constexpr (std::is_same_v<T, UndefinedLit>) {
          return "undefined";
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, NumberLit>) {
          return number_text(x.value);
        } else {
          return quote_string(x.value);
        }
      },
      e);
}

}  // namespace

std::string serialize_statement(const TraceProgram& t, const TraceStatement& s) {
  std::string out = std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarWrite>) {
          return t.var(x.lhs).str() + " = " + expr_text(t, x.rhs);
        } else if constexpr (std::is_same_v<T, FieldWrite>) {
          return t.var(x.base).str() + "." + property_text(x.name) + " = " + t.var(x.rhs).str();
        } else if constexpr (std::is_same_v<T, Delete>) {
          return "delete " + t.var(x.base).str() + "." + property_text(x.name);
        } else if constexpr (std::is_same_v<T, BeginCall>) {
          std::string r = "begin-call " + t.var(x.callee).str() + " " + t.var(x.receiver).str();
          for (VarId a : x.args) r += " " + t.var(a).str();
          return r;
        } else if constexpr (std::is_same_v<T, EndCall>) {
          return "end-call " + t.var(x.result).str();
        } else {
          return "end-initialization " + t.var(x.object).str();
        }
      },
      s.kind);
  if (s.src.valid()) out += " ; src=" + s.src.str();
  return out;
}

std::string serialize_trace(const TraceProgram& t) {
  std::string out;
  for (const auto& s : t.statements()) {
    out += serialize_statement(t, s);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, TraceProgram& out)
      : s_(text), line_(line), out_(out) {}

  TraceStatement statement() {
    TraceStatement st;
    std::string_view body = split_source(st.src);
    s_ = body;
    pos_ = 0;
    skip_ws();
    if (keyword("begin-call")) {
      BeginCall bc;
      bc.callee = var();
      bc.receiver = var();
      skip_ws();
      while (!at_end()) {
        bc.args.push_back(var());
        skip_ws();
      }
      st.kind = std::move(bc);
    } else if (keyword("end-call")) {
      st.kind = EndCall{var()};
    } else if (keyword("end-initialization")) {
      st.kind = EndInit{var()};
    } else if (keyword("delete")) {
      VarId base = var();
      expect('.');
      st.kind = Delete{base, property()};
    } else {
      VarId lhs = var();
      skip_ws();
      if (peek() == '.') {
        ++pos_;
        std::string name = property();
        skip_ws();
        expect('=');
        st.kind = FieldWrite{lhs, std::move(name), var()};
      } else {
        expect('=');
        st.kind = VarWrite{lhs, expr()};
      }
    }
    skip_ws();
    if (!at_end()) fail("unexpected trailing text");
    return st;
  }

 private:
  // Splits a trailing "; src=file:line:col"; the file part may contain ':'.
  std::string_view split_source(SourceLoc& loc) {
    std::string_view text = s_;
    std::size_t marker = std::string_view::npos;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (c == '\\') {
          ++i;
        } else if (c == '"') {
          in_string = false;
        }
      } else if (c == '"') {
        in_string = true;
      } else if (c == ';') {
        marker = i;
        break;
      }
    }
    if (marker == std::string_view::npos) return text;
    std::string_view tail = text.substr(marker + 1);
    while (!tail.empty() && tail.front() == ' ') tail.remove_prefix(1);
    while (!tail.empty() && (tail.back() == ' ' || tail.back() == '\r')) tail.remove_suffix(1);
    if (tail.substr(0, 4) != "src=") fail("expected src= after ';'");
    tail.remove_prefix(4);
    auto c2 = tail.rfind(':');
    if (c2 == std::string_view::npos || c2 == 0) fail("malformed source location");
    auto c1 = tail.rfind(':', c2 - 1);
    if (c1 == std::string_view::npos) fail("malformed source location");
    auto line = parse_uint(tail.substr(c1 + 1, c2 - c1 - 1));
    auto col = parse_uint(tail.substr(c2 + 1));
    if (!line || !col || *line == 0) fail("malformed source location");
    loc.file = std::string(tail.substr(0, c1));
    loc.line = *line;
    loc.column = *col;
    return text.substr(0, marker);
  }

  std::optional<std::uint32_t> parse_uint(std::string_view s) {
    std::uint32_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw TraceError(TraceError::Kind::kSyntax, line_, what);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool keyword(std::string_view kw) {
    if (s_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < s_.size() && s_[end] != ' ' && s_[end] != '\t') return false;
    pos_ = end;
    return true;
  }

  std::string word() {
    std::size_t start = pos_;
    while (!at_end() && name_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  VarId var() {
    skip_ws();
    std::string name = word();
    if (name.empty() || peek() != '#') fail("expected variable");
    ++pos_;
    std::string occ = word();
    auto n = parse_uint(occ);
    if (!n || peek() != '@') fail("expected occurrence number");
    ++pos_;
    std::string frame = word();
    if (frame.empty()) fail("expected frame");
    return out_.intern(TraceVar{std::move(name), *n, std::move(frame)});
  }

  std::string quoted() {
    if (peek() != '"') fail("expected string");
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        char e = s_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail("unknown escape");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string property() {
    skip_ws();
    if (peek() == '"') return quoted();
    std::string name = word();
    if (name.empty()) fail("expected property name");
    return name;
  }

  TraceExpr expr() {
    skip_ws();
    if (peek() == '"') return StringLit{quoted()};
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+' || peek() == '.') {
      return number_from(start);
    }
    std::string w = word();
    if (w.empty()) fail("expected expression");
    if (peek() == '#') {
      pos_ = start;
      VarId v = var();
      if (peek() == '.') {
        ++pos_;
        return FieldRead{v, property()};
      }
      return VarRead{v};
    }
    if (w == "allocate") {
      skip_ws();
      if (keyword("function")) {
        skip_ws();
        std::string fname = word();
        if (fname.empty()) fail("expected function name");
        return Allocate{std::move(fname)};
      }
      return Allocate{};
    }
    if (w == "null") return NullLit{};
    if (w == "undefined") return UndefinedLit{};
    if (w == "true") return BoolLit{true};
    if (w == "false") return BoolLit{false};
    pos_ = start;
    return number_from(start);
  }

  TraceExpr number_from(std::size_t start) {
    while (!at_end() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    auto v = parse_number(s_.substr(start, pos_ - start));
    if (!v) fail("malformed number");
    return NumberLit{*v};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  TraceProgram& out_;
};

void validate(const TraceProgram& t, const std::vector<std::size_t>& lines) {
  auto line_of = [&](std::size_t i) { return lines.empty() ? i + 1 : lines[i]; };
  std::vector<bool> defined(t.var_count(), false);
  auto use = [&](VarId v, std::size_t i) {
    if (!defined[v]) {
      throw TraceError(TraceError::Kind::kUseBeforeDef, line_of(i),
                       "use of undefined variable " + t.var(v).str());
    }
  };
  std::size_t open_calls = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& s = t[i].kind;
    if (const auto* w = std::get_if<VarWrite>(&s)) {
      if (const auto* r = std::get_if<VarRead>(&w->rhs)) use(r->var, i);
      if (const auto* r = std::get_if<FieldRead>(&w->rhs)) use(r->base, i);
      if (defined[w->lhs]) {
        throw TraceError(TraceError::Kind::kDoubleAssignment, line_of(i),
                         "variable assigned twice: " + t.var(w->lhs).str());
      }
      defined[w->lhs] = true;
    } else if (const auto* fw = std::get_if<FieldWrite>(&s)) {
      use(fw->base, i);
      use(fw->rhs, i);
    } else if (const auto* d = std::get_if<Delete>(&s)) {
      use(d->base, i);
    } else if (const auto* bc = std::get_if<BeginCall>(&s)) {
      use(bc->callee, i);
      use(bc->receiver, i);
      for (VarId a : bc->args) use(a, i);
      ++open_calls;
    } else if (const auto* ec = std::get_if<EndCall>(&s)) {
      use(ec->result, i);
      if (open_calls == 0) {
        throw TraceError(TraceError::Kind::kUnmatchedEndCall, line_of(i),
                         "end-call without begin-call");
      }
      --open_calls;
    } else if (const auto* ei = std::get_if<EndInit>(&s)) {
      use(ei->object, i);
    }
  }
}

}  // namespace

void validate_trace(const TraceProgram& trace) { validate(trace, {}); }

TraceProgram parse_trace(std::string_view text) {
  TraceProgram out;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    LineParser p(line, line_no, out);
    out.append(p.statement());
    lines.push_back(line_no);
  }
  validate(out, lines);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool same_double(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b) ||
         (std::isnan(a) && std::isnan(b));
}

bool expr_equal(const TraceProgram& ta, const TraceExpr& a, const TraceProgram& tb,
                const TraceExpr& b) {
  if (a.index() != b.index()) return false;
  auto v = [&](VarId x, VarId y) { return ta.var(x) == tb.var(y); };
  if (const auto* x = std::get_if<VarRead>(&a)) return v(x->var, std::get<VarRead>(b).var);
  if (const auto* x = std::get_if<FieldRead>(&a)) {
    const auto& y = std::get<FieldRead>(b);
    return v(x->base, y.base) && x->name == y.name;
  }
  if (const auto* x = std::get_if<Allocate>(&a)) return x->function == std::get<Allocate>(b).function;
  if (const auto* x = std::get_if<BoolLit>(&a)) return x->value == std::get<BoolLit>(b).value;
  if (const auto* x = std::get_if<NumberLit>(&a)) {
    return same_double(x->value, std::get<NumberLit>(b).value);
  }
  if (const auto* x = std::get_if<StringLit>(&a)) return x->value == std::get<StringLit>(b).value;
  return true;
}

}  // namespace

bool trace_equal(const TraceProgram& ta, const TraceProgram& tb) {
  if (ta.size() != tb.size()) return false;
  auto v = [&](VarId x, VarId y) { return ta.var(x) == tb.var(y); };
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const auto& a = ta[i];
    const auto& b = tb[i];
    if (a.src != b.src || a.kind.index() != b.kind.index()) return false;
    bool same = std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.kind);
          if constexpr (std::is_same_v<T, VarWrite>) {
            return v(x.lhs, y.lhs) && expr_equal(ta, x.rhs, tb, y.rhs);
          } else if constexpr (std::is_same_v<T, FieldWrite>) {
            return v(x.base, y.base) && x.name == y.name && v(x.rhs, y.rhs);
          } else if constexpr (std::is_same_v<T, Delete>) {
            return v(x.base, y.base) && x.name == y.name;
          } else if constexpr (std::is_same_v<T, BeginCall>) {
            if (x.args.size() != y.args.size()) return false;
            for (std::size_t k = 0; k < x.args.size(); ++k) {
              if (!v(x.args[k], y.args[k])) return false;
            }
            return v(x.callee, y.callee) && v(x.receiver, y.receiver);
          } else if constexpr (std::is_same_v<T, EndCall>) {
            return v(x.result, y.result);
          } else {
            return v(x.object, y.object);
          }
        },
        a.kind);
    if (!same) return false;
  }
  return true;
}

}  // namespace tracetype
