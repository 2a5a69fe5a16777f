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

#include "tracetype/minidyn/interpreter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <unordered_set>

namespace tracetype::minidyn {

struct Scope {
  struct Binding {
    std::optional<VarId> current;
    Value value = Undefined{};
  };
  std::unordered_map<std::string, Binding> vars;
  std::shared_ptr<Scope> parent;
  std::string frame;
};

const Value* Object::find(std::string_view name) const {
  for (const auto& [k, v] : props) {
    if (k == name) return &v;
  }
  return nullptr;
}

Value* Object::find(std::string_view name) {
  for (auto& [k, v] : props) {
    if (k == name) return &v;
  }
  return nullptr;
}

void Object::set(const std::string& name, Value v) {
  if (auto* slot = find(name)) {
    *slot = std::move(v);
  } else {
    props.emplace_back(name, std::move(v));
  }
}

bool Object::erase(std::string_view name) {
  auto it = std::find_if(props.begin(), props.end(), [&](const auto& p) { return p.first == name; });
  if (it == props.end()) return false;
  props.erase(it);
  return true;
}

RuntimeError::RuntimeError(Loc loc, const std::string& what)
    : std::runtime_error(what), loc_(loc) {}

namespace {

constexpr std::pair<Builtin, std::string_view> kBuiltinNames[] = {
    {Builtin::kArray, "Array"},     {Builtin::kPush, "push"},       {Builtin::kPop, "pop"},
    {Builtin::kConcat, "concat"},   {Builtin::kIndexOf, "indexOf"}, {Builtin::kSort, "sort"},
};

ObjPtr as_obj(const Value& v) {
  if (const auto* o = std::get_if<ObjPtr>(&v)) return *o;
  return nullptr;
}

bool is_primitive(const Value& v) { return !std::holds_alternative<ObjPtr>(v); }

std::string index_key(std::size_t i) { return std::to_string(i); }

std::optional<std::size_t> array_index(std::string_view name) {
  if (name.empty() || name.size() > 9) return std::nullopt;
  if (name.size() > 1 && name[0] == '0') return std::nullopt;
  std::size_t v = 0;
  for (char c : name) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

std::size_t array_length(const Object& o) {
  const Value* len = o.find("length");
  if (!len) return 0;
  if (const auto* d = std::get_if<double>(len)) {
    if (*d >= 0 && *d == std::floor(*d)) return static_cast<std::size_t>(*d);
  }
  return 0;
}

std::string trim(std::string_view s) {
  const char* ws = " \t\n\r\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view builtin_name(Builtin b) {
  for (const auto& [k, n] : kBuiltinNames) {
    if (k == b) return n;
  }
  return "";
}

std::optional<Builtin> builtin_by_name(std::string_view name) {
  for (const auto& [k, n] : kBuiltinNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string format_js_number(double v) {
  if (v == 0) return "0";
  if (std::isnan(v)) return "NaN";
  std::string s = format_number(v);
  // Exponent without leading zeros, as in "1e-7".
  auto e = s.find('e');
  if (e != std::string::npos) {
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    char sign = '+';
    if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) {
      sign = exp[0];
      exp.erase(0, 1);
    }
    exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
    s = mant + "e" + sign + exp;
  }
  return s;
}

double to_number(const Value& v) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) {
          return std::numeric_limits<double>::quiet_NaN();
        } else if constexpr (std::is_same_v<T, Null>) {
          return 0;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? 1 : 0;
        } else if constexpr (std::is_same_v<T, double>) {
          return x;
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string t = trim(x);
          if (t.empty()) return 0;
          if (t == "Infinity" || t == "+Infinity") return std::numeric_limits<double>::infinity();
          if (t == "-Infinity") return -std::numeric_limits<double>::infinity();
          std::string_view body = t;
          if (!body.empty() && body[0] == '+') body.remove_prefix(1);
          double out = 0;
          auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
          if (ec != std::errc() || p != body.data() + body.size()) {
            return std::numeric_limits<double>::quiet_NaN();
          }
          return out;
        } else {
          return to_number(Value(to_string(Value(x))));
        }
      },
      v);
}

namespace {

// Arrays already being joined; a cyclic entry joins as the empty string.
thread_local std::vector<const Object*> joining;

}  // namespace

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) {
          return "undefined";
        } else if constexpr (std::is_same_v<T, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_js_number(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          if (x->is_array) {
            if (std::find(joining.begin(), joining.end(), x.get()) != joining.end()) return "";
            joining.push_back(x.get());
            std::string out;
            std::size_t n = array_length(*x);
            for (std::size_t i = 0; i < n; ++i) {
              if (i) out += ',';
              const Value* e = x->find(index_key(i));
              if (e && !std::holds_alternative<Undefined>(*e) && !std::holds_alternative<Null>(*e)) {
                out += to_string(*e);
              }
            }
            joining.pop_back();
            return out;
          }
          if (x->is_function()) return "function";
          return "[object Object]";
        }
      },
      v);
}

bool to_boolean(const Value& v) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined> || std::is_same_v<T, Null>) {
          return false;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return !(x == 0 || std::isnan(x));
        } else if constexpr (std::is_same_v<T, std::string>) {
          return !x.empty();
        } else {
          return true;
        }
      },
      v);
}

std::string property_key(const Value& v) { return to_string(v); }

std::string type_of(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) {
          return "undefined";
        } else if constexpr (std::is_same_v<T, Null>) {
          return "object";
        } else if constexpr (std::is_same_v<T, bool>) {
          return "boolean";
        } else if constexpr (std::is_same_v<T, double>) {
          return "number";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "string";
        } else {
          return x->is_function() ? "function" : "object";
        }
      },
      v);
}

bool strict_equals(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) return *x == std::get<double>(b);
  return a == b;
}

bool same_value(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) {
    double y = std::get<double>(b);
    if (std::isnan(*x) && std::isnan(y)) return true;
    return std::memcmp(x, &y, sizeof y) == 0;
  }
  return a == b;
}

CoercionPlan plan_coercions(std::string_view op, std::span<const Value> in) {
  CoercionPlan plan;
  plan.converted.resize(in.size());
  auto number_of = [&](std::size_t i) {
    if (const auto* d = std::get_if<double>(&in[i])) return *d;
    double n = to_number(in[i]);
    plan.converted[i] = n;
    return n;
  };
  auto bool_of = [&](std::size_t i) {
    if (const auto* b = std::get_if<bool>(&in[i])) return *b;
    bool b = to_boolean(in[i]);
    plan.converted[i] = b;
    return b;
  };

  if (op == "!" || op == "test") {
    bool b = bool_of(0);
    plan.result = op == "!" ? !b : b;
  } else if (op == "neg") {
    plan.result = -number_of(0);
  } else if (op == "-" || op == "*" || op == "/" || op == "%") {
    double a = number_of(0), b = number_of(1);
    double r = op == "-" ? a - b : op == "*" ? a * b : op == "/" ? a / b : std::fmod(a, b);
    plan.result = r;
  } else if (op == "+") {
    Value p[2] = {in[0], in[1]};
    for (int i = 0; i < 2; ++i) {
      if (!is_primitive(in[i])) {
        p[i] = to_string(in[i]);
        plan.converted[i] = p[i];
      }
    }
    if (std::holds_alternative<std::string>(p[0]) || std::holds_alternative<std::string>(p[1])) {
      std::string s[2];
      for (int i = 0; i < 2; ++i) {
        if (const auto* str = std::get_if<std::string>(&p[i])) {
          s[i] = *str;
        } else {
          s[i] = to_string(p[i]);
          plan.converted[i] = s[i];
        }
      }
      plan.result = s[0] + s[1];
    } else {
      double n[2];
      for (int i = 0; i < 2; ++i) {
        if (const auto* d = std::get_if<double>(&p[i])) {
          n[i] = *d;
        } else {
          n[i] = to_number(p[i]);
          plan.converted[i] = n[i];
        }
      }
      plan.result = n[0] + n[1];
    }
  } else if (op == "<" || op == ">" || op == "<=" || op == ">=") {
    bool r;
    if (std::holds_alternative<std::string>(in[0]) && std::holds_alternative<std::string>(in[1])) {
      const auto& a = std::get<std::string>(in[0]);
      const auto& b = std::get<std::string>(in[1]);
      r = op == "<" ? a < b : op == ">" ? a > b : op == "<=" ? a <= b : a >= b;
    } else {
      double a = number_of(0), b = number_of(1);
      r = op == "<" ? a < b : op == ">" ? a > b : op == "<=" ? a <= b : a >= b;
    }
    plan.result = r;
  } else if (op == "===" || op == "!==") {
    bool eq = strict_equals(in[0], in[1]);
    plan.result = op == "===" ? eq : !eq;
  } else if (op == "==" || op == "!=") {
    auto nullish = [](const Value& v) {
      return std::holds_alternative<Undefined>(v) || std::holds_alternative<Null>(v);
    };
    bool eq;
    if (in[0].index() == in[1].index()) {
      eq = strict_equals(in[0], in[1]);
    } else if (nullish(in[0]) || nullish(in[1])) {
      eq = nullish(in[0]) && nullish(in[1]);
    } else if (!is_primitive(in[0]) || !is_primitive(in[1])) {
      eq = false;
    } else {
      eq = number_of(0) == number_of(1);
    }
    plan.result = op == "==" ? eq : !eq;
  } else {
    throw std::invalid_argument("unknown operator " + std::string(op));
  }
  return plan;
}

namespace {

TraceExpr literal_expr(const Value& v) {
  return std::visit(
      [](const auto& x) -> TraceExpr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) {
          return UndefinedLit{};
        } else if constexpr (std::is_same_v<T, Null>) {
          return NullLit{};
        } else if constexpr (std::is_same_v<T, bool>) {
          return BoolLit{x};
        } else if constexpr (std::is_same_v<T, double>) {
          return NumberLit{x};
        } else if constexpr (std::is_same_v<T, std::string>) {
          return StringLit{x};
        } else {
          throw std::logic_error("object has no literal form");
        }
      },
      v);
}

struct Ref {
  VarId var;
  Value value;
};

struct Completion {
  bool returned = false;
  std::optional<Ref> value;
  Loc loc;
};

using PropList = std::vector<std::pair<std::string, Value>>;

}  // namespace

class Recorder {
 public:
  Recorder(const Program& program, const RecordOptions& options,
           const std::map<Builtin, ManualModel>& models)
      : program_(program), options_(options), models_(models) {}

  RecordResult run();

 private:
  // State of the native call being modeled.
  struct NativeContext {
    std::vector<ObjPtr> touched;
    std::vector<PropList> before;
    std::vector<Value> before_proto;
    std::vector<Ref> args;
  };
  class Call;

  // Emission.
  SourceLoc src(Loc l) const {
    if (l.line == 0) return {};
    return SourceLoc{options_.file, l.line, l.column};
  }
  void emit(StatementKind k, Loc loc) {
    if (out_.trace.size() >= options_.max_statements) {
      throw RuntimeError(loc, "statement limit exceeded");
    }
    out_.trace.append(TraceStatement{std::move(k), src(loc)});
  }
  VarId fresh(const std::string& name, const std::string& frame) {
    auto& n = occurrences_[frame + "\x1f" + name];
    return out_.trace.intern(TraceVar{name, n++, frame});
  }
  ConcreteValue concrete(const Value& v) const;
  VarId write(const std::string& name, const std::string& frame, TraceExpr rhs, Loc loc,
              const Value& v) {
    bool alloc = std::holds_alternative<Allocate>(rhs);
    if (alloc) as_obj(v)->trace_id = next_id_++;
    VarId id = fresh(name, frame);
    emit(VarWrite{id, std::move(rhs)}, loc);
    if (alloc) alloc_src_[*as_obj(v)->trace_id] = src(loc);
    out_.oracle.push_back({id, concrete(v)});
    if (auto o = as_obj(v); o && frame != "N") o->home = id;
    return id;
  }
  std::string temp(const Expr& e, const std::string& suffix = "") const {
    return "$" + std::to_string(e.id) + suffix;
  }
  Ref literal(const Expr& e, const Value& v, const std::string& suffix = "") {
    return {write(temp(e, suffix), frame_, literal_expr(v), e.loc, v), v};
  }
  VarId coerce(const Ref& r, const std::optional<Value>& conv, const Expr& e, int i) {
    if (!conv) return r.var;
    return write(temp(e, "c" + std::to_string(i)), frame_, literal_expr(*conv), e.loc, *conv);
  }

  // Scopes.
  std::pair<Scope::Binding*, Scope*> lookup(const std::string& name) {
    for (Scope* s = scope_.get(); s; s = s->parent.get()) {
      auto it = s->vars.find(name);
      if (it != s->vars.end()) return {&it->second, s};
    }
    return {nullptr, nullptr};
  }
  void hoist_vars(const std::vector<StmtPtr>& body);
  void hoist_functions(const std::vector<StmtPtr>& body);
  ObjPtr make_function(const std::shared_ptr<FunctionDecl>& decl);
  const std::string& function_name(const FunctionDecl& decl);

  // Evaluation.
  Completion exec_list(const std::vector<StmtPtr>& body);
  Completion exec(const Stmt& s);
  Ref eval(const Expr& e);
  Ref read_var(const std::string& name, const Expr& e);
  Ref read_this(const Expr& e);
  Ref get_member(const Ref& base, const std::string& name, const Expr& e);
  void set_member(const Ref& base, const std::string& name, const Ref& value, const Expr& e);
  std::string member_name(const Expr& member);
  Ref call(const Expr& e);
  Ref construct(const Expr& e);
  Ref invoke(const Ref& callee, const Ref& recv, const std::vector<Ref>& args, const Expr& e);
  Ref user_call(const ObjPtr& fn, const Ref& callee, const Ref& recv, const std::vector<Ref>& args,
                const Expr& e);
  Ref unary(const Expr& e);
  Ref binary(const Expr& e);
  Ref logical(const Expr& e);
  Ref assign(const Expr& e);
  bool test(const Ref& r, const Expr& e);

  // Natives.
  ObjPtr native_method(Builtin b);
  VarId escape_of(const ObjPtr& o);
  void allocate_native(const ObjPtr& o);
  VarId from_native(const Value& v);
  VarId native_literal(const Value& v);
  VarId native_read(VarId base, const std::string& name, const Value& v) {
    return write("n" + std::to_string(native_count_++), "N", FieldRead{base, name}, {}, v);
  }
  Ref native_call(const ObjPtr& fn, const Ref& callee, const Ref& recv,
                  const std::vector<Ref>& args, const Expr& e);
  Value run_builtin(Builtin b, const Value& recv, const std::vector<Value>& args, Loc loc);
  void inferred_model();

  const Program& program_;
  const RecordOptions& options_;
  const std::map<Builtin, ManualModel>& models_;
  RecordResult out_;

  std::unordered_map<std::string, std::uint32_t> occurrences_;
  std::unordered_map<std::string, std::uint32_t> frame_counts_;
  std::unordered_map<const FunctionDecl*, std::string> fn_names_;
  std::unordered_set<std::string> used_fn_names_;
  std::unordered_set<const FunctionDecl*> hoisted_;
  std::map<ObjId, SourceLoc> alloc_src_;
  ObjId next_id_ = 0;
  std::uint32_t native_count_ = 0;
  std::uint32_t depth_ = 0;

  std::shared_ptr<Scope> scope_;
  std::string frame_ = "G";
  ObjPtr global_;
  std::map<Builtin, ObjPtr> natives_;
  NativeContext* ctx_ = nullptr;
};

ConcreteValue Recorder::concrete(const Value& v) const {
  return std::visit(
      [&](const auto& x) -> ConcreteValue {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Undefined>) {
          return UndefinedV{};
        } else if constexpr (std::is_same_v<T, Null>) {
          return NullV{};
        } else if constexpr (std::is_same_v<T, bool>) {
          return BoolV{x};
        } else if constexpr (std::is_same_v<T, double>) {
          return NumberV{x};
        } else if constexpr (std::is_same_v<T, std::string>) {
          return StringV{x};
        } else {
          ObjId id = *x->trace_id;
          if (x->is_function()) {
            std::string name = x->builtin != Builtin::kNone
                                   ? std::string(builtin_name(x->builtin))
                                   : fn_names_.at(x->function.get());
            auto it = alloc_src_.find(id);
            return FuncRef{id, name, it == alloc_src_.end() ? SourceLoc{} : it->second};
          }
          return ObjRef{id};
        }
      },
      v);
}

const std::string& Recorder::function_name(const FunctionDecl& decl) {
  auto it = fn_names_.find(&decl);
  if (it != fn_names_.end()) return it->second;
  std::string name;
  if (decl.name.empty()) {
    name = "anon$" + std::to_string(decl.loc.line) + "$" + std::to_string(decl.loc.column);
  } else if (used_fn_names_.count(decl.name)) {
    name = decl.name + "$" + std::to_string(decl.loc.line);
  } else {
    name = decl.name;
  }
  used_fn_names_.insert(name);
  return fn_names_.emplace(&decl, name).first->second;
}

ObjPtr Recorder::make_function(const std::shared_ptr<FunctionDecl>& decl) {
  auto fn = std::make_shared<Object>();
  fn->function = decl;
  fn->closure = scope_;
  function_name(*decl);
  return fn;
}

void Recorder::hoist_vars(const std::vector<StmtPtr>& body) {
  for (const auto& s : body) {
    switch (s->kind) {
      case StmtKind::kVar:
        for (const auto& d : s->decls) scope_->vars.try_emplace(d.first);
        break;
      case StmtKind::kFunction:
        scope_->vars.try_emplace(s->function->name);
        break;
      case StmtKind::kIf:
        hoist_vars(s->body);
        hoist_vars(s->else_body);
        break;
      case StmtKind::kWhile:
      case StmtKind::kBlock:
        hoist_vars(s->body);
        break;
      default:
        break;
    }
  }
}

void Recorder::hoist_functions(const std::vector<StmtPtr>& body) {
  for (const auto& s : body) {
    if (s->kind != StmtKind::kFunction) continue;
    hoisted_.insert(s->function.get());
    ObjPtr fn = make_function(s->function);
    auto& b = scope_->vars[s->function->name];
    b.current = write(s->function->name, frame_, Allocate{function_name(*s->function)}, s->loc,
                      fn);
    b.value = fn;
  }
}

Completion Recorder::exec_list(const std::vector<StmtPtr>& body) {
  for (const auto& s : body) {
    Completion c = exec(*s);
    if (c.returned) return c;
  }
  return {};
}

bool Recorder::test(const Ref& r, const Expr& e) {
  Value v[1] = {r.value};
  CoercionPlan plan = plan_coercions("test", v);
  coerce(r, plan.converted[0], e, 0);
  return std::get<bool>(plan.result);
}

Completion Recorder::exec(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::kExpr:
      eval(*s.expr);
      return {};
    case StmtKind::kVar:
      for (std::size_t i = 0; i < s.decls.size(); ++i) {
        const auto& [name, init] = s.decls[i];
        if (!init) continue;
        Ref r = eval(*init);
        auto [b, owner] = lookup(name);
        b->current = write(name, owner->frame, VarRead{r.var}, s.decl_locs[i], r.value);
        b->value = r.value;
      }
      return {};
    case StmtKind::kFunction:
      if (!hoisted_.count(s.function.get())) {
        ObjPtr fn = make_function(s.function);
        auto [b, owner] = lookup(s.function->name);
        b->current = write(s.function->name, owner->frame,
                           Allocate{function_name(*s.function)}, s.loc, fn);
        b->value = fn;
      }
      return {};
    case StmtKind::kReturn: {
      Completion c;
      c.returned = true;
      c.loc = s.loc;
      if (s.expr) c.value = eval(*s.expr);
      return c;
    }
    case StmtKind::kIf: {
      Ref cond = eval(*s.expr);
      if (test(cond, *s.expr)) return exec_list(s.body);
      return exec_list(s.else_body);
    }
    case StmtKind::kWhile:
      while (true) {
        Ref cond = eval(*s.expr);
        if (!test(cond, *s.expr)) break;
        Completion c = exec_list(s.body);
        if (c.returned) return c;
      }
      return {};
    case StmtKind::kBlock:
      return exec_list(s.body);
    case StmtKind::kEmpty:
      return {};
  }
  return {};
}

Ref Recorder::read_var(const std::string& name, const Expr& e) {
  auto [b, owner] = lookup(name);
  if (!b) {
    const Value* g = global_->find(name);
    if (!g) throw RuntimeError(e.loc, name + " is not defined");
    VarId gv = write(temp(e, "g"), frame_, VarRead{escape_of(global_)}, e.loc, global_);
    return {write(temp(e), frame_, FieldRead{gv, name}, e.loc, *g), *g};
  }
  TraceExpr rhs = b->current ? TraceExpr{VarRead{*b->current}} : TraceExpr{UndefinedLit{}};
  VarId v = write(name, owner->frame, std::move(rhs), e.loc, b->value);
  b->current = v;
  return {v, b->value};
}

Ref Recorder::read_this(const Expr& e) {
  auto [b, owner] = lookup("this");
  if (!b) return literal(e, Undefined{});
  return read_var("this", e);
}

Ref Recorder::get_member(const Ref& base, const std::string& name, const Expr& e) {
  ObjPtr o = as_obj(base.value);
  if (!o) {
    throw RuntimeError(e.loc, "cannot read property '" + name + "' of " + to_string(base.value));
  }
  if (name == kProtoField) {
    return {write(temp(e), frame_, FieldRead{base.var, name}, e.loc, o->proto), o->proto};
  }
  const Value* found = nullptr;
  for (ObjPtr cur = o; cur && !found; cur = as_obj(cur->proto)) found = cur->find(name);
  if (!found && o->is_array) {
    if (auto b = builtin_by_name(name); b && *b != Builtin::kArray) {
      ObjPtr m = native_method(*b);
      return {write(temp(e), frame_, VarRead{escape_of(m)}, e.loc, m), m};
    }
  }
  Value v = found ? *found : Value(Undefined{});
  return {write(temp(e), frame_, FieldRead{base.var, name}, e.loc, v), v};
}

void Recorder::set_member(const Ref& base, const std::string& name, const Ref& value,
                          const Expr& e) {
  ObjPtr o = as_obj(base.value);
  if (!o) {
    throw RuntimeError(e.loc, "cannot set property '" + name + "' of " + to_string(base.value));
  }
  emit(FieldWrite{base.var, name, value.var}, e.loc);
  if (name == kProtoField) {
    o->proto = value.value;
    return;
  }
  o->set(name, value.value);
  if (o->is_array) {
    if (auto idx = array_index(name); idx && *idx >= array_length(*o)) {
      Value len = static_cast<double>(*idx + 1);
      VarId lv = write(temp(e, "l"), frame_, literal_expr(len), e.loc, len);
      emit(FieldWrite{base.var, "length", lv}, e.loc);
      o->set("length", len);
    }
  }
}

std::string Recorder::member_name(const Expr& member) {
  if (member.kind == ExprKind::kMember) return member.text;
  return property_key(eval(*member.children[1]).value);
}

Ref Recorder::eval(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return literal(e, e.number);
    case ExprKind::kString:
      return literal(e, e.text);
    case ExprKind::kBool:
      return literal(e, e.boolean);
    case ExprKind::kNull:
      return literal(e, Null{});
    case ExprKind::kUndefined:
      return literal(e, Undefined{});
    case ExprKind::kIdent:
      return read_var(e.text, e);
    case ExprKind::kThis:
      return read_this(e);
    case ExprKind::kObject: {
      auto o = std::make_shared<Object>();
      VarId v = write(temp(e), frame_, Allocate{}, e.loc, o);
      for (const auto& [name, pe] : e.props) {
        Ref r = eval(*pe);
        emit(FieldWrite{v, name, r.var}, e.loc);
        o->set(name, r.value);
      }
      if (e.proto) {
        Ref p = eval(*e.proto);
        if (!as_obj(p.value) && !std::holds_alternative<Null>(p.value)) {
          throw RuntimeError(e.proto->loc, "prototype must be an object or null");
        }
        emit(FieldWrite{v, kProtoField, p.var}, e.loc);
        o->proto = p.value;
      }
      emit(EndInit{v}, e.loc);
      return {v, o};
    }
    case ExprKind::kArray: {
      auto o = std::make_shared<Object>();
      o->is_array = true;
      VarId v = write(temp(e), frame_, Allocate{}, e.loc, o);
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        Ref r = eval(*e.children[i]);
        emit(FieldWrite{v, index_key(i), r.var}, e.loc);
        o->set(index_key(i), r.value);
      }
      Value len = static_cast<double>(e.children.size());
      VarId lv = write(temp(e, "l"), frame_, literal_expr(len), e.loc, len);
      emit(FieldWrite{v, "length", lv}, e.loc);
      o->set("length", len);
      emit(EndInit{v}, e.loc);
      return {v, o};
    }
    case ExprKind::kFunction: {
      ObjPtr fn = make_function(e.function);
      return {write(temp(e), frame_, Allocate{function_name(*e.function)}, e.loc, fn), fn};
    }
    case ExprKind::kMember:
    case ExprKind::kIndex: {
      Ref base = eval(*e.children[0]);
      std::string name = member_name(e);
      return get_member(base, name, e);
    }
    case ExprKind::kCall:
      return call(e);
    case ExprKind::kNew:
      return construct(e);
    case ExprKind::kUnary:
      return unary(e);
    case ExprKind::kBinary:
      return binary(e);
    case ExprKind::kLogical:
      return logical(e);
    case ExprKind::kAssign:
      return assign(e);
  }
  throw std::logic_error("unhandled expression");
}

Ref Recorder::assign(const Expr& e) {
  const Expr& target = *e.children[0];
  if (target.kind == ExprKind::kIdent) {
    Ref r = eval(*e.children[1]);
    auto [b, owner] = lookup(target.text);
    if (!b) throw RuntimeError(target.loc, target.text + " is not defined");
    b->current = write(target.text, owner->frame, VarRead{r.var}, e.loc, r.value);
    b->value = r.value;
    return {*b->current, r.value};
  }
  if (target.kind != ExprKind::kMember && target.kind != ExprKind::kIndex) {
    throw RuntimeError(e.loc, "invalid assignment target");
  }
  Ref base = eval(*target.children[0]);
  std::string name = member_name(target);
  Ref r = eval(*e.children[1]);
  set_member(base, name, r, e);
  return r;
}

Ref Recorder::unary(const Expr& e) {
  const Expr& operand = *e.children[0];
  if (e.text == "delete") {
    if (operand.kind != ExprKind::kMember && operand.kind != ExprKind::kIndex) {
      return literal(e, true);
    }
    Ref base = eval(*operand.children[0]);
    std::string name = member_name(operand);
    ObjPtr o = as_obj(base.value);
    if (!o) throw RuntimeError(e.loc, "cannot delete property of " + to_string(base.value));
    emit(Delete{base.var, name}, e.loc);
    if (name == kProtoField) {
      o->proto = Null{};
    } else {
      o->erase(name);
    }
    return literal(e, true);
  }
  Ref r = eval(operand);
  if (e.text == "typeof") return literal(e, type_of(r.value));
  Value v[1] = {r.value};
  CoercionPlan plan = plan_coercions(e.text == "-" ? "neg" : "!", v);
  coerce(r, plan.converted[0], e, 0);
  return literal(e, plan.result);
}

Ref Recorder::binary(const Expr& e) {
  Ref a = eval(*e.children[0]);
  Ref b = eval(*e.children[1]);
  if (e.text == "instanceof") {
    ObjPtr ctor = as_obj(b.value);
    if (!ctor || !ctor->is_function()) {
      throw RuntimeError(e.loc, "right-hand side of instanceof is not callable");
    }
    bool r = false;
    const Value* proto = ctor->find("prototype");
    ObjPtr target = proto ? as_obj(*proto) : nullptr;
    if (ObjPtr o = as_obj(a.value); o && target) {
      for (ObjPtr cur = as_obj(o->proto); cur; cur = as_obj(cur->proto)) {
        if (cur == target) {
          r = true;
          break;
        }
      }
    }
    return literal(e, r);
  }
  Value v[2] = {a.value, b.value};
  CoercionPlan plan = plan_coercions(e.text, v);
  coerce(a, plan.converted[0], e, 0);
  coerce(b, plan.converted[1], e, 1);
  return literal(e, plan.result);
}

Ref Recorder::logical(const Expr& e) {
  Ref a = eval(*e.children[0]);
  bool truth = test(a, e);
  bool short_circuit = e.text == "&&" ? !truth : truth;
  Ref r = short_circuit ? a : eval(*e.children[1]);
  return {write(temp(e), frame_, VarRead{r.var}, e.loc, r.value), r.value};
}

Ref Recorder::call(const Expr& e) {
  const Expr& ce = *e.children[0];
  Ref callee, recv;
  bool method = false;
  if (ce.kind == ExprKind::kMember || ce.kind == ExprKind::kIndex) {
    Ref base = eval(*ce.children[0]);
    std::string name = member_name(ce);
    callee = get_member(base, name, ce);
    recv = base;
    method = true;
  } else {
    callee = eval(ce);
  }
  std::vector<Ref> args;
  for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(eval(*e.children[i]));
  if (!method) recv = literal(e, Undefined{}, "r");
  Ref r = invoke(callee, recv, args, e);
  return {write(temp(e), frame_, VarRead{r.var}, e.loc, r.value), r.value};
}

Ref Recorder::invoke(const Ref& callee, const Ref& recv, const std::vector<Ref>& args,
                     const Expr& e) {
  ObjPtr fn = as_obj(callee.value);
  if (!fn || !fn->is_function()) throw RuntimeError(e.loc, "callee is not a function");
  if (fn->builtin != Builtin::kNone) return native_call(fn, callee, recv, args, e);
  return user_call(fn, callee, recv, args, e);
}

Ref Recorder::user_call(const ObjPtr& fn, const Ref& callee, const Ref& recv,
                        const std::vector<Ref>& args, const Expr& e) {
  std::vector<VarId> arg_vars;
  for (const auto& a : args) arg_vars.push_back(a.var);
  emit(BeginCall{callee.var, recv.var, arg_vars}, e.loc);
  if (++depth_ > 2000) throw RuntimeError(e.loc, "call stack overflow");

  const FunctionDecl& decl = *fn->function;
  const std::string& name = function_name(decl);
  std::string frame = name + "_" + std::to_string(++frame_counts_[name]);
  auto scope = std::make_shared<Scope>();
  scope->parent = fn->closure;
  scope->frame = frame;

  auto saved_scope = scope_;
  std::string saved_frame = frame_;
  scope_ = scope;
  frame_ = frame;

  auto& self = scope->vars["this"];
  self.current = write("this", frame, VarRead{recv.var}, decl.loc, recv.value);
  self.value = recv.value;
  for (std::size_t i = 0; i < decl.params.size(); ++i) {
    auto& b = scope->vars[decl.params[i]];
    if (i < args.size()) {
      b.current = write(decl.params[i], frame, VarRead{args[i].var}, decl.param_locs[i],
                        args[i].value);
      b.value = args[i].value;
    }
  }
  hoist_vars(decl.body);
  hoist_functions(decl.body);
  Completion c = exec_list(decl.body);

  Ref ret;
  if (c.returned && c.value) {
    ret = {write("$ret", frame, VarRead{c.value->var}, c.loc, c.value->value), c.value->value};
  } else {
    ret = {write("$ret", frame, UndefinedLit{}, c.returned ? c.loc : decl.end_loc, Undefined{}),
           Undefined{}};
  }
  scope_ = saved_scope;
  frame_ = saved_frame;
  --depth_;
  emit(EndCall{ret.var}, e.loc);
  return ret;
}

Ref Recorder::construct(const Expr& e) {
  Ref c = eval(*e.children[0]);
  std::vector<Ref> args;
  for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(eval(*e.children[i]));
  ObjPtr fn = as_obj(c.value);
  if (!fn || !fn->is_function()) throw RuntimeError(e.loc, "constructor is not a function");
  if (fn->builtin == Builtin::kArray) {
    Ref recv = literal(e, Undefined{}, "r");
    Ref r = native_call(fn, c, recv, args, e);
    return {write(temp(e), frame_, VarRead{r.var}, e.loc, r.value), r.value};
  }
  if (fn->builtin != Builtin::kNone) throw RuntimeError(e.loc, "not a constructor");

  Ref proto;
  if (const Value* pv = fn->find("prototype")) {
    proto = {write(temp(e, "p"), frame_, FieldRead{c.var, "prototype"}, e.loc, *pv), *pv};
  } else {
    auto p = std::make_shared<Object>();
    proto = {write(temp(e, "p"), frame_, Allocate{}, e.loc, p), p};
    emit(EndInit{proto.var}, e.loc);
    emit(FieldWrite{c.var, "prototype", proto.var}, e.loc);
    fn->set("prototype", p);
  }
  auto o = std::make_shared<Object>();
  VarId ov = write(temp(e), frame_, Allocate{}, e.loc, o);
  if (as_obj(proto.value)) {
    emit(FieldWrite{ov, kProtoField, proto.var}, e.loc);
    o->proto = proto.value;
  }
  Ref self{ov, o};
  user_call(fn, c, self, args, e);
  emit(EndInit{ov}, e.loc);
  return self;
}

// Natives.

ObjPtr Recorder::native_method(Builtin b) {
  auto& slot = natives_[b];
  if (!slot) {
    slot = std::make_shared<Object>();
    slot->builtin = b;
  }
  return slot;
}

VarId Recorder::escape_of(const ObjPtr& o) {
  if (!o->trace_id) allocate_native(o);
  if (!o->escape) {
    // Created by the program but never handed to native code.
    o->escape = write("esc" + std::to_string(*o->trace_id), "N", VarRead{*o->home}, {}, o);
  }
  return *o->escape;
}

void Recorder::allocate_native(const ObjPtr& o) {
  std::optional<std::string> fname;
  if (o->builtin != Builtin::kNone) fname = std::string(builtin_name(o->builtin));
  // The id is assigned inside write(); the variable is named after it.
  ObjId id = next_id_;
  o->escape = write("esc" + std::to_string(id), "N", Allocate{fname}, {}, o);
  for (const auto& [name, v] : o->props) {
    VarId vv = name == "length" ? native_literal(v) : from_native(v);
    emit(FieldWrite{*o->escape, name, vv}, {});
  }
  if (as_obj(o->proto)) emit(FieldWrite{*o->escape, kProtoField, from_native(o->proto)}, {});
  emit(EndInit{*o->escape}, {});
}

VarId Recorder::native_literal(const Value& v) {
  return write("n" + std::to_string(native_count_++), "N", literal_expr(v), {}, v);
}

VarId Recorder::from_native(const Value& v) {
  if (is_primitive(v)) {
    if (ctx_) {
      for (const auto& a : ctx_->args) {
        if (is_primitive(a.value) && same_value(a.value, v)) return a.var;
      }
      // Element slots only; other coincidences would invent flows.
      for (std::size_t k = 0; k < ctx_->touched.size(); ++k) {
        if (!ctx_->touched[k]->is_array) continue;
        for (const auto& [name, pv] : ctx_->before[k]) {
          if (array_index(name) && is_primitive(pv) && same_value(pv, v)) {
            return native_read(*ctx_->touched[k]->escape, name, pv);
          }
        }
      }
    }
    return native_literal(v);
  }
  ObjPtr o = as_obj(v);
  if (o->escape) return *o->escape;
  if (!o->trace_id) {
    allocate_native(o);
    return *o->escape;
  }
  if (ctx_) {
    // Shortest field path from an escaped object, as it was before the call.
    struct Node {
      ObjPtr obj;
      int parent;
      std::string name;
      Value value;
      int depth;
    };
    std::vector<Node> nodes;
    std::deque<int> queue;
    std::unordered_set<const Object*> seen;
    for (const auto& t : ctx_->touched) {
      nodes.push_back({t, -1, "", t, 0});
      seen.insert(t.get());
      queue.push_back(static_cast<int>(nodes.size()) - 1);
    }
    int hit = -1;
    while (!queue.empty() && hit < 0) {
      int n = queue.front();
      queue.pop_front();
      if (nodes[n].depth >= 3) continue;
      const PropList* props = &nodes[n].obj->props;
      for (std::size_t k = 0; k < ctx_->touched.size(); ++k) {
        if (ctx_->touched[k] == nodes[n].obj) props = &ctx_->before[k];
      }
      for (const auto& [name, pv] : *props) {
        ObjPtr child = as_obj(pv);
        if (!child || seen.count(child.get())) continue;
        seen.insert(child.get());
        nodes.push_back({child, n, name, pv, nodes[n].depth + 1});
        if (child == o) {
          hit = static_cast<int>(nodes.size()) - 1;
          break;
        }
        queue.push_back(static_cast<int>(nodes.size()) - 1);
      }
    }
    if (hit >= 0) {
      std::vector<int> path;
      for (int n = hit; nodes[n].parent >= 0; n = nodes[n].parent) path.push_back(n);
      std::reverse(path.begin(), path.end());
      VarId cur = *nodes[nodes[path.front()].parent].obj->escape;
      for (int n : path) cur = native_read(cur, nodes[n].name, nodes[n].value);
      return cur;
    }
  }
  if (o->home) return *o->home;
  throw std::logic_error("native value has no trace variable");
}

class Recorder::Call : public NativeCall {
 public:
  Call(Recorder& r, Builtin b, const Value& result) : r_(r), builtin_(b), result_(result) {}

  Builtin builtin() const override { return builtin_; }
  std::size_t object_count() const override { return r_.ctx_->touched.size(); }
  VarId escape_var(std::size_t k) const override { return *r_.ctx_->touched.at(k)->escape; }
  const PropList& before(std::size_t k) const override { return r_.ctx_->before.at(k); }
  const PropList& after(std::size_t k) const override { return r_.ctx_->touched.at(k)->props; }
  const Value& result() const override { return result_; }
  VarId read_field(VarId base, const std::string& name) override {
    Value v = Undefined{};
    for (std::size_t k = 0; k < r_.ctx_->touched.size(); ++k) {
      if (*r_.ctx_->touched[k]->escape != base) continue;
      for (const auto& [n, pv] : r_.ctx_->before[k]) {
        if (n == name) v = pv;
      }
    }
    return r_.native_read(base, name, v);
  }
  void write_field(VarId base, const std::string& name, VarId value) override {
    r_.emit(FieldWrite{base, name, value}, {});
  }
  VarId from_native(const Value& v) override { return r_.from_native(v); }

 private:
  Recorder& r_;
  Builtin builtin_;
  const Value& result_;
};

void Recorder::inferred_model() {
  struct Pending {
    VarId base;
    std::string name;
    std::optional<VarId> value;  // nullopt for a delete
  };
  std::vector<Pending> pending;
  for (std::size_t k = 0; k < ctx_->touched.size(); ++k) {
    const ObjPtr& o = ctx_->touched[k];
    const PropList& pre = ctx_->before[k];
    for (const auto& [name, v] : o->props) {
      auto it = std::find_if(pre.begin(), pre.end(), [&](const auto& p) { return p.first == name; });
      if (it != pre.end() && same_value(it->second, v)) continue;
      pending.push_back({*o->escape, name, name == "length" ? native_literal(v) : from_native(v)});
    }
    for (const auto& [name, v] : pre) {
      if (!o->find(name)) pending.push_back({*o->escape, name, std::nullopt});
    }
    if (!same_value(ctx_->before_proto[k], o->proto)) {
      if (as_obj(o->proto)) {
        pending.push_back({*o->escape, kProtoField, from_native(o->proto)});
      } else {
        pending.push_back({*o->escape, kProtoField, std::nullopt});
      }
    }
  }
  for (const auto& p : pending) {
    if (p.value) {
      emit(FieldWrite{p.base, p.name, *p.value}, {});
    } else {
      emit(Delete{p.base, p.name}, {});
    }
  }
}

Ref Recorder::native_call(const ObjPtr& fn, const Ref& callee, const Ref& recv,
                          const std::vector<Ref>& args, const Expr& e) {
  std::vector<VarId> arg_vars;
  for (const auto& a : args) arg_vars.push_back(a.var);
  emit(BeginCall{callee.var, recv.var, arg_vars}, e.loc);

  NativeContext ctx;
  ctx.args = args;
  auto touch = [&](const Ref& r) {
    ObjPtr o = as_obj(r.value);
    if (!o || std::find(ctx.touched.begin(), ctx.touched.end(), o) != ctx.touched.end()) return;
    ctx.touched.push_back(o);
    o->escape = write("esc" + std::to_string(*o->trace_id), "N", VarRead{r.var}, {}, o);
  };
  touch(recv);
  for (const auto& a : args) touch(a);
  for (const auto& o : ctx.touched) {
    ctx.before.push_back(o->props);
    ctx.before_proto.push_back(o->proto);
  }

  std::vector<Value> values;
  for (const auto& a : args) values.push_back(a.value);
  Value result = run_builtin(fn->builtin, recv.value, values, e.loc);

  ctx_ = &ctx;
  VarId rv;
  auto model = models_.find(fn->builtin);
  if (model != models_.end()) {
    Call call(*this, fn->builtin, result);
    rv = model->second(call);
  } else {
    // Result first so its reads see the pre-call state.
    rv = from_native(result);
    inferred_model();
  }
  ctx_ = nullptr;

  VarId end = write("n" + std::to_string(native_count_++), "N", VarRead{rv}, {}, result);
  emit(EndCall{end}, e.loc);
  return {end, result};
}

Value Recorder::run_builtin(Builtin b, const Value& recv, const std::vector<Value>& args,
                            Loc loc) {
  auto new_array = [] {
    auto a = std::make_shared<Object>();
    a->is_array = true;
    return a;
  };
  if (b == Builtin::kArray) {
    auto a = new_array();
    if (args.size() == 1 && std::holds_alternative<double>(args[0])) {
      double n = std::get<double>(args[0]);
      if (n < 0 || n != std::floor(n) || n > 1e7) throw RuntimeError(loc, "invalid array length");
      a->set("length", n);
    } else {
      for (std::size_t i = 0; i < args.size(); ++i) a->set(index_key(i), args[i]);
      a->set("length", static_cast<double>(args.size()));
    }
    return a;
  }
  ObjPtr self = as_obj(recv);
  if (!self || !self->is_array) {
    throw RuntimeError(loc, std::string(builtin_name(b)) + " called on a non-array");
  }
  std::size_t len = array_length(*self);
  switch (b) {
    case Builtin::kPush:
      for (std::size_t i = 0; i < args.size(); ++i) self->set(index_key(len + i), args[i]);
      self->set("length", static_cast<double>(len + args.size()));
      return static_cast<double>(len + args.size());
    case Builtin::kPop: {
      if (len == 0) {
        self->set("length", 0.0);
        return Undefined{};
      }
      const Value* last = self->find(index_key(len - 1));
      Value v = last ? *last : Value(Undefined{});
      self->erase(index_key(len - 1));
      self->set("length", static_cast<double>(len - 1));
      return v;
    }
    case Builtin::kConcat: {
      auto r = new_array();
      std::size_t n = 0;
      auto append_all = [&](const Object& a) {
        std::size_t m = array_length(a);
        for (std::size_t i = 0; i < m; ++i, ++n) {
          if (const Value* v = a.find(index_key(i))) r->set(index_key(n), *v);
        }
      };
      append_all(*self);
      for (const auto& a : args) {
        if (ObjPtr arr = as_obj(a); arr && arr->is_array) {
          append_all(*arr);
        } else {
          r->set(index_key(n++), a);
        }
      }
      r->set("length", static_cast<double>(n));
      return r;
    }
    case Builtin::kIndexOf: {
      Value x = args.empty() ? Value(Undefined{}) : args[0];
      for (std::size_t i = 0; i < len; ++i) {
        const Value* v = self->find(index_key(i));
        if (v && strict_equals(*v, x)) return static_cast<double>(i);
      }
      return -1.0;
    }
    case Builtin::kSort: {
      std::vector<Value> vals;
      std::size_t undefs = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const Value* v = self->find(index_key(i));
        if (!v) continue;
        if (std::holds_alternative<Undefined>(*v)) {
          ++undefs;
        } else {
          vals.push_back(*v);
        }
      }
      std::stable_sort(vals.begin(), vals.end(), [](const Value& a, const Value& b) {
        return to_string(a) < to_string(b);
      });
      for (std::size_t i = 0; i < undefs; ++i) vals.push_back(Undefined{});
      for (std::size_t i = 0; i < vals.size(); ++i) self->set(index_key(i), vals[i]);
      for (std::size_t i = vals.size(); i < len; ++i) self->erase(index_key(i));
      return self;
    }
    default:
      break;
  }
  throw RuntimeError(loc, "unknown builtin");
}

RecordResult Recorder::run() {
  global_ = std::make_shared<Object>();
  global_->set("Array", native_method(Builtin::kArray));
  try {
    allocate_native(global_);
    out_.prelude = out_.trace.size();
    scope_ = std::make_shared<Scope>();
    scope_->frame = "G";
    frame_ = "G";
    hoist_vars(program_.body);
    hoist_functions(program_.body);
    exec_list(program_.body);
  } catch (const RuntimeError& e) {
    out_.error = e.what();
    out_.error_loc = e.loc();
  }
  return std::move(out_);
}

namespace {

// Sorting permutes existing elements: each moved element is read from its old
// index, so element types flow through the receiver instead of escaping.
VarId sort_model(NativeCall& call) {
  VarId recv = call.escape_var(0);
  const PropList& pre = call.before(0);
  const PropList& post = call.after(0);
  std::vector<bool> used(pre.size(), false);
  std::vector<std::pair<std::string, VarId>> writes;
  for (const auto& [name, v] : post) {
    auto it = std::find_if(pre.begin(), pre.end(), [&](const auto& p) { return p.first == name; });
    if (it != pre.end() && same_value(it->second, v)) continue;
    std::optional<VarId> src;
    for (std::size_t j = 0; j < pre.size(); ++j) {
      if (used[j] || !array_index(pre[j].first) || !same_value(pre[j].second, v)) continue;
      used[j] = true;
      src = call.read_field(recv, pre[j].first);
      break;
    }
    writes.emplace_back(name, src ? *src : call.from_native(v));
  }
  for (const auto& [name, var] : writes) call.write_field(recv, name, var);
  return call.from_native(call.result());
}

}  // namespace

Interpreter::Interpreter() { models_[Builtin::kSort] = sort_model; }

void Interpreter::register_manual_model(std::string_view builtin, ManualModel model) {
  auto b = builtin_by_name(builtin);
  if (!b) throw UnknownBuiltin("unknown builtin: " + std::string(builtin));
  if (models_.count(*b)) {
    throw DuplicateModel("model already registered for " + std::string(builtin));
  }
  models_[*b] = std::move(model);
}

RecordResult Interpreter::run(const Program& program, const RecordOptions& options) const {
  Recorder r(program, options, models_);
  return r.run();
}

RecordResult run_and_record(std::string_view source, const RecordOptions& options) {
  Program p = parse_program(source, options.file);
  return Interpreter().run(p, options);
}

std::set<std::pair<std::string, std::uint32_t>> covered_lines(const TraceProgram& trace) {
  std::set<std::pair<std::string, std::uint32_t>> out;
  for (const auto& s : trace.statements()) {
    if (s.src.valid()) out.emplace(s.src.file, s.src.line);
  }
  return out;
}

}  // namespace tracetype::minidyn
