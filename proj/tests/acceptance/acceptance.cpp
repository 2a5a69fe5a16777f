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

// Exit gate: one PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "property_suites.hpp"
#include "test_support.hpp"
#include "tracetype/cli.hpp"
#include "tracetype/evaluate.hpp"
#include "tracetype/framework.hpp"
#include "tracetype/minidyn/interpreter.hpp"
#include "tracetype/systems.hpp"
#include "tracetype/tagtest.hpp"
#include "tracetype/types.hpp"

namespace fs = std::filesystem;
using namespace tracetype;
using tracetype::testing::read_text;
using tracetype::testing::record;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string type_of_var(const TypedTrace& t, const std::string& name) {
  auto ty = t.variable_type(name, "G");
  return ty ? render(*ty) : "<none>";
}

// Generalized type of the native function object with the given name.
std::optional<Type> function_type(const TypedTrace& t, const std::string& name) {
  for (std::size_t i = 0; i < t.eval.heap.size(); ++i) {
    if (t.eval.heap[i].function == name) return t.object_types[i];
  }
  return std::nullopt;
}

Outcome overview() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  auto rec = record("polymorphism_overview.mdyn");
  o.expect(!rec.error, "runtime error");

  auto base = make_system("sub/base");
  auto tb = type_trace(rec.trace, *base);
  o.expect(type_of_var(tb, "f") == "<({p: Number}) -> Undefined>", "f = " + type_of_var(tb, "f"));
  o.expect(type_of_var(tb, "g") == "<({q: String}) -> {q: String}>", "g = " + type_of_var(tb, "g"));
  o.expect(type_of_var(tb, "w") == "{q: String}", "w = " + type_of_var(tb, "w"));
  auto rb = typecheck_trace(tb);
  o.expect(rb.error_locations() == 1, "sub/base locations " + std::to_string(rb.error_locations()));
  if (rb.error_locations() == 1) {
    o.expect(rb.entries().begin()->first.line == 10, "error not on line 10");
  }

  auto poly = make_system("sub/poly");
  auto tp = type_trace(rec.trace, *poly);
  o.expect(type_of_var(tp, "g") == "<(E) -> E>", "poly g = " + type_of_var(tp, "g"));
  auto rp = typecheck_trace(tp);
  o.expect(rp.error_locations() == 0, "sub/poly locations " + std::to_string(rp.error_locations()));

  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  o.expect(ms.count() < 1000.0, "took " + std::to_string(ms.count()) + " ms");
  return o;
}

Outcome tag_test() {
  Outcome o;
  auto rec = record("tag_test.mdyn");
  auto res = detect_tag_tests(rec.trace);
  o.expect(res.deduplicated.size() == 1,
           std::to_string(res.deduplicated.size()) + " candidates");
  if (res.deduplicated.size() != 1) return o;
  const auto& c = res.deduplicated.front();
  // A-shaped object type, built by hand from the constructor body.
  Type a = Type::object({{"kind", Type::string()}});
  Type wide = Type::union_of({a, Type::number()});
  o.expect(type_equal(c.wide, wide), "wide = " + render(c.wide));
  o.expect(type_equal(c.narrow, a), "narrow = " + render(c.narrow));
  o.expect(c.wide_loc.line == 3 && c.narrow_loc.line == 4,
           "lines " + std::to_string(c.wide_loc.line) + "->" + std::to_string(c.narrow_loc.line));
  return o;
}

Outcome shape_map() {
  Outcome o;
  auto rec = record("shape_map.mdyn");
  auto sys = make_system("sub/base");
  auto t = type_trace(rec.trace, *sys);
  auto x = t.trace->find(TraceVar{"x", 0, "G"});
  o.expect(x.has_value(), "no x");
  if (!x) return o;
  auto id = object_id(t.eval.value(*x));
  o.expect(id.has_value(), "x is not an object");
  if (!id) return o;
  std::string shape = render_shape_map(t.shapes[*id], t.eval);
  o.expect(shape == "a↦{4,10}, b↦{{c:false}}, d↦{\"hello\"}", "shape " + shape);
  std::string ty = render(t.object_types[*id]);
  o.expect(ty == "{a: Number, b: {c: Boolean}, d: String}", "type " + ty);
  return o;
}

Outcome polymorphism() {
  Outcome o;
  auto sig = [](Type p, Type r) {
    FuncSig s;
    s.params = {std::move(p)};
    s.ret = std::move(r);
    return s;
  };
  std::vector<FuncSig> invocations{sig(Type::number(), Type::number()),
                                   sig(Type::boolean(), Type::boolean())};
  auto lub = [](const Type& a, const Type& b) { return lub_subtyping(a, b); };
  Type g = lub_fn_poly(invocations, lub);
  o.expect(type_equal(g, Type::function(sig(Type::type_var(0), Type::type_var(0)))),
           "generalized " + render(g));

  std::vector<FuncSig> expected{
      sig(Type::number(), Type::number()), sig(Type::type_var(0), Type::number()),
      sig(Type::number(), Type::type_var(0)), sig(Type::type_var(0), Type::type_var(0))};
  auto got = enumerate_candidates(invocations[0]);
  o.expect(got.size() == expected.size(), std::to_string(got.size()) + " candidates");
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& c : got) found = found || equal_up_to_renaming(c, e);
    o.expect(found, "missing " + render(e));
  }
  return o;
}

Outcome fixed_layout() {
  Outcome o;
  auto rec = record("fixed_layout.mdyn");
  auto sys = make_system("fixed-layout");
  auto t = type_trace(rec.trace, *sys);
  auto rep = typecheck_trace(t);
  o.expect(rep.layout.has_value(), "no layout counts");
  if (!rep.layout) return o;
  const auto& l = *rep.layout;

  // Denominators recounted from the trace text.
  std::set<SourceLoc> writes;
  std::size_t proto_writes = 0;
  for (const auto& s : rec.trace.statements()) {
    if (!s.src.valid()) continue;
    if (const auto* w = std::get_if<FieldWrite>(&s.kind)) {
      if (w->name == kProtoField) {
        ++proto_writes;
      } else {
        writes.insert(s.src);
      }
    }
  }
  o.expect(l.ro_rw_errors == 1, "ro/rw errors " + std::to_string(l.ro_rw_errors));
  o.expect(l.ro_rw_total == writes.size(), "ro/rw total " + std::to_string(l.ro_rw_total));
  o.expect(l.prototypal_errors == 0, "prototypal errors");
  o.expect(l.prototypal_total == proto_writes, "prototypal total");
  o.expect(l.inheritance_errors == 0 && l.inheritance_total == 0, "inheritance");
  bool line3 = rep.entries().size() == 1 && rep.entries().begin()->first.line == 3 &&
               rep.count(ErrorKind::kRoWrite) == 1;
  o.expect(line3, "ro/rw error not the line-3 write");
  return o;
}

Outcome inversion() {
  Outcome o;
  auto rec = record("inversion.mdyn");
  auto base = make_system("sub/base");
  auto rb = typecheck_trace(type_trace(rec.trace, *base));
  o.expect(rb.error_locations() == 0, "sub/base locations " + std::to_string(rb.error_locations()));

  auto inter = make_system("sub/intersect");
  auto ti = type_trace(rec.trace, *inter);
  auto ri = typecheck_trace(ti);
  bool at_call = false;
  for (const auto& [loc, kinds] : ri.entries()) at_call = at_call || loc.line == 6;
  o.expect(ri.error_locations() >= 1 && at_call, "no error at f(y)");
  std::string f = type_of_var(ti, "f");
  o.expect(f == "<({p: Number, q: Number}) -> Number ∧ ({p: Number, r: Boolean}) -> Number>",
           "f = " + f);
  return o;
}

Outcome natives() {
  Outcome o;
  {
    auto rec = record("array_natives.mdyn");
    o.expect(!rec.error, "runtime error");
    auto sys = make_system("sub/poly");
    auto t = type_trace(rec.trace, *sys);
    Type elem = Type::object({{"name", Type::string()}});

    auto method = [&](const std::string& name) -> std::optional<FuncSig> {
      auto ty = function_type(t, name);
      if (!ty || !ty->is(TypeKind::kFunction) || ty->signatures().size() != 1) {
        o.expect(false, name + " not a single signature");
        return std::nullopt;
      }
      return ty->signatures()[0];
    };
    auto elem_var = [](const FuncSig& s) -> std::optional<Type> {
      auto p = property_type(s.receiver, "0");
      if (p && p->is(TypeKind::kTypeVar)) return p;
      return std::nullopt;
    };

    if (auto pop = method("pop")) {
      auto e = elem_var(*pop);
      o.expect(pop->params.empty() && e && type_equal(pop->ret, *e), "pop " + render(*pop));
    }
    for (const char* name : {"push", "indexOf"}) {
      if (auto s = method(name)) {
        auto e = elem_var(*s);
        o.expect(s->params.size() == 1 && e && type_equal(s->params[0], *e),
                 std::string(name) + " " + render(*s));
      }
    }
    if (auto concat = method("concat")) {
      auto e = elem_var(*concat);
      auto r = property_type(concat->ret, "0");
      o.expect(e && r && type_equal(*r, *e), "concat " + render(*concat));
    }
    // E is instantiated with the element type at the pop calls.
    std::size_t pop_calls = 0;
    for (std::size_t i = 0; i < t.frames.size(); ++i) {
      const auto& f = t.frames[i];
      if (!f.callee || t.eval.heap[*f.callee].function != "pop") continue;
      auto gen = function_type(t, "pop");
      std::string key = poly_context_key(t.invocations[i], *gen);
      o.expect(key == "E=" + render(elem), "pop instantiation " + key);
      ++pop_calls;
    }
    o.expect(pop_calls == 2, std::to_string(pop_calls) + " pop calls");
    for (const char* v : {"c", "e"}) {
      auto ty = t.variable_type(v, "G");
      o.expect(ty && type_equal(*ty, elem), std::string(v) + " = " + type_of_var(t, v));
    }
  }
  {
    auto rec = record("array_constructor.mdyn");
    o.expect(!rec.error, "runtime error");
    auto ev = evaluate_trace(rec.trace);
    o.expect(ev.defects.empty(), "replay defects");
    for (const auto& e : rec.oracle) {
      if (!value_equal(ev.value(e.var), e.value)) {
        o.expect(false, "replay differs at " + rec.trace.var(e.var).str());
        break;
      }
    }
    auto a = rec.trace.find(TraceVar{"a", 0, "G"});
    auto id = a ? object_id(ev.value(*a)) : std::nullopt;
    o.expect(id.has_value(), "a not an object");
    if (id) {
      const auto& props = ev.heap[*id].props;
      bool ok = props.size() == 3 && props.count("length") &&
                value_equal(props.at("length"), NumberV{2});
      for (int i = 0; ok && i < 2; ++i) {
        auto el = props.find(std::to_string(i));
        auto el_id = el == props.end() ? std::nullopt : object_id(el->second);
        ok = el_id && ev.heap[*el_id].props.size() == 1 &&
             value_equal(ev.heap[*el_id].props.at("p"), NumberV{double(i + 1)});
      }
      o.expect(ok, "replayed array is not [{p:1},{p:2}]");
      auto sys = make_system("sub/base");
      auto t = type_trace(rec.trace, *sys);
      std::string at = type_of_var(t, "a");
      o.expect(at == "{0: {p: Number}, 1: {p: Number}, length: Number}", "a = " + at);
    }
  }
  return o;
}

Outcome property_suites() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  int count = 0;
  for (std::string exe : kPropertySuites) {
    ++count;
    std::string cmd = "\"" + exe + "\" > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    o.expect(rc == 0, fs::path(exe).filename().string() + " failed");
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(count > 0, "no suites");
  o.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = std::to_string(count) + " suites";
  return o;
}

struct CliRun {
  int rc;
  std::string out;
  std::string err;
  bool operator==(const CliRun&) const = default;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int rc = cli::run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

Outcome determinism() {
  Outcome o;
  fs::path dir = fs::temp_directory_path() /
                 ("tracetype_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<std::string> programs{"polymorphism_overview.mdyn", "tag_test.mdyn",
                                    "fixed_layout.mdyn", "array_natives.mdyn"};
  for (const auto& p : programs) {
    std::string src = tracetype::testing::program_path(p);
    std::string t1 = (dir / (p + ".1.trace")).string();
    std::string t2 = (dir / (p + ".2.trace")).string();
    auto r1 = run({"record", src, "-o", t1});
    auto r2 = run({"record", src, "-o", t2});
    o.expect(r1 == r2 && read_text(t1) == read_text(t2), "record " + p);
    o.expect(run({"record", src}) == run({"record", src}), "record to stdout " + p);

    std::vector<std::vector<std::string>> commands;
    for (const auto& s : system_names()) commands.push_back({"type", t1, s});
    std::vector<std::string> cmp{"compare", t1};
    cmp.insert(cmp.end(), system_names().begin(), system_names().end());
    commands.push_back(cmp);
    commands.push_back({"tagtest", t1});
    commands.push_back({"tagtest", t1, "--raw"});
    for (const auto& c : commands) {
      auto a = run(c), b = run(c);
      o.expect(a.rc == cli::kExitOk && a == b, c[0] + " " + (c.size() > 2 ? c[2] : "") + " " + p);
    }
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"overview reproduction", overview},
      {"tag-test reproduction", tag_test},
      {"shape-map reproduction", shape_map},
      {"polymorphism reproduction", polymorphism},
      {"fixed-layout reproduction", fixed_layout},
      {"inversion reproduction", inversion},
      {"native models and poly signatures", natives},
      {"property suites", property_suites},
      {"determinism", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << "\n";
  }
  return all ? 0 : 1;
}
