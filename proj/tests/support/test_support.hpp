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

#ifndef TRACETYPE_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define TRACETYPE_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tracetype/minidyn/interpreter.hpp"
#include "tracetype/trace.hpp"
#include "tracetype/types.hpp"

namespace tracetype::testing {

inline std::string program_path(const std::string& name) {
  return std::string(TRACETYPE_PROGRAMS_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Records tests/programs/<name>; locations use the bare name as file.
inline minidyn::RecordResult record(const std::string& name) {
  minidyn::RecordOptions o;
  o.file = name;
  return minidyn::run_and_record(read_text(program_path(name)), o);
}

inline minidyn::RecordResult record_source(const std::string& source,
                                           const std::string& file = "t.mdyn") {
  minidyn::RecordOptions o;
  o.file = file;
  return minidyn::run_and_record(source, o);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline Type gen_primitive(Rng& rng) {
  switch (pick(rng, 5)) {
    case 0:
      return Type::number();
    case 1:
      return Type::boolean();
    case 2:
      return Type::string();
    case 3:
      return Type::null();
    default:
      return Type::undefined();
  }
}

struct TypeGenOptions {
  bool unions = false;
  bool functions = true;
  bool top_bottom = true;
  int max_depth = 2;
};

// Random closed type without recursion or type variables.
inline Type gen_type(Rng& rng, const TypeGenOptions& opt, int depth = 0) {
  std::size_t choice = pick(rng, 10);
  if (depth >= opt.max_depth && choice >= 5) choice = pick(rng, 5);
  if (choice < 4) return gen_primitive(rng);
  if (choice == 4) {
    if (!opt.top_bottom) return gen_primitive(rng);
    return coin(rng) ? Type::top() : Type::bottom();
  }
  if (choice <= 7) {
    static const char* names[] = {"a", "b", "c", "d"};
    std::map<std::string, Type> props;
    for (const char* n : names) {
      if (coin(rng, 0.45)) props[n] = gen_type(rng, opt, depth + 1);
    }
    return Type::object(std::move(props));
  }
  if (choice == 8 && opt.functions) {
    FuncSig sig;
    std::size_t arity = pick(rng, 3);
    for (std::size_t i = 0; i < arity; ++i) sig.params.push_back(gen_type(rng, opt, depth + 1));
    sig.ret = gen_type(rng, opt, depth + 1);
    return Type::function(std::move(sig));
  }
  if (opt.unions) {
    std::vector<Type> members;
    std::size_t n = 2 + pick(rng, 2);
    for (std::size_t i = 0; i < n; ++i) members.push_back(gen_type(rng, opt, depth + 1));
    return Type::union_of(std::move(members));
  }
  return gen_primitive(rng);
}

}  // namespace tracetype::testing

#endif  // TRACETYPE_TESTS_SUPPORT_TEST_SUPPORT_HPP_
