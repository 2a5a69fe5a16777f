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

#include "tracetype/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include "tracetype/framework.hpp"
#include "tracetype/minidyn/interpreter.hpp"
#include "tracetype/systems.hpp"
#include "tracetype/tagtest.hpp"
#include "tracetype/trace.hpp"

namespace tracetype::cli {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string loc_str(const std::string& file, minidyn::Loc loc) {
  return file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

// Turns key=value lines into flags placed right after the subcommand, so
// later command-line flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest, extra;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config-file") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config-file needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config-file=", 0) == 0) {
      path = args[i].substr(14);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      line = line.substr(b, line.find_last_not_of(" \t\r") + 1 - b);
      auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError("config line without '=': " + line);
      std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      key.erase(key.find_last_not_of(" \t") + 1);
      value.erase(0, std::min(value.find_first_not_of(" \t"), value.size()));
      if (value == "true") {
        extra.push_back("--" + key);
      } else if (value != "false") {
        extra.push_back("--" + key + "=" + value);
      }
    }
  }
  if (extra.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

TraceProgram load_trace(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse_trace(text);
  } catch (const TraceError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ": " + e.what());
  }
}

std::unique_ptr<TypeSystem> load_system(const std::string& name) {
  return make_system(name);  // UnknownSystem is a usage error
}

ErrorReport run_system(const TraceProgram& trace, const TypeSystem& system,
                       const std::vector<std::string>& prefixes) {
  try {
    TypedTrace typed = type_trace(trace, system);
    return typecheck_trace(typed, prefixes);
  } catch (const NonTermination& e) {
    throw InputError(std::string("propagation did not converge: ") + e.what());
  }
}

struct Options {
  std::string program, output, trace, system;
  std::vector<std::string> systems, prefixes;
  bool keep_partial = false, timing = false, raw = false;
};

int cmd_record(const Options& o, std::ostream& out, std::ostream& err) {
  std::string source = read_file(o.program);
  minidyn::Program program;
  try {
    program = minidyn::parse_program(source, o.program);
  } catch (const minidyn::ParseError& e) {
    err << "parse error at " << loc_str(o.program, e.loc()) << ": " << e.what() << "\n";
    return kExitInput;
  }
  minidyn::RecordOptions options;
  options.file = o.program;
  minidyn::RecordResult r = minidyn::Interpreter().run(program, options);
  bool ok = !r.error;
  if (!ok) err << "runtime error at " << loc_str(o.program, *r.error_loc) << ": " << *r.error << "\n";
  if (ok || o.keep_partial) {
    std::string text = serialize_trace(r.trace);
    std::ostream& summary = o.output.empty() ? err : out;
    if (o.output.empty()) {
      out << text;
    } else {
      write_file(o.output, text);
    }
    summary << "statements,covered_lines\n"
            << r.trace.size() << "," << minidyn::covered_lines(r.trace).size() << "\n";
  }
  return ok ? kExitOk : kExitInput;
}

int cmd_type(const Options& o, std::ostream& out) {
  auto system = load_system(o.system);
  TraceProgram trace = load_trace(o.trace);
  out << run_system(trace, *system, o.prefixes).to_csv();
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.systems.size() < 2) {
    err << "compare needs at least two configurations\n";
    return kExitUsage;
  }
  std::vector<std::unique_ptr<TypeSystem>> systems;
  for (const auto& name : o.systems) systems.push_back(load_system(name));
  TraceProgram trace = load_trace(o.trace);
  out << "config,error_locations,total_errors," << (o.timing ? "wall_ms," : "")
      << "ro_rw,prototypal,inheritance\n";
  for (const auto& system : systems) {
    auto start = std::chrono::steady_clock::now();
    ErrorReport report = run_system(trace, *system, o.prefixes);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    out << report.summary_row() << ",";
    if (o.timing) out << ms << ",";
    out << report.layout_row() << "\n";
  }
  return kExitOk;
}

int cmd_tagtest(const Options& o, std::ostream& out, std::ostream& err) {
  TraceProgram trace = load_trace(o.trace);
  TagTestResult result;
  try {
    result = detect_tag_tests(trace);
  } catch (const NonTermination& e) {
    throw InputError(std::string("propagation did not converge: ") + e.what());
  }
  out << tag_tests_csv(o.raw ? result.raw : result.deduplicated);
  err << "raw_candidates=" << result.raw.size()
      << " deduplicated=" << result.deduplicated.size() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace typing workbench", "tracetype"};
  app.require_subcommand(1);
  app.add_option("--config-file", "key=value file whose entries act as flags");
  Options o;

  auto* record = app.add_subcommand("record", "Run a MiniDyn program and write its trace");
  record->add_option("program", o.program, "MiniDyn source file")->required();
  record->add_option("-o,--output", o.output, "Trace file (default: stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  record->add_flag("--keep-partial", o.keep_partial, "Write the trace prefix on runtime failure");

  auto* type = app.add_subcommand("type", "Type a trace under one configuration");
  type->add_option("trace", o.trace, "Trace file")->required();
  type->add_option("system,--system", o.system, "Configuration name")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  type->add_option("--subject-prefix", o.prefixes, "Only count locations under this prefix")
      ->delimiter(',');

  auto* compare = app.add_subcommand("compare", "Compare error counts across configurations");
  compare->add_option("trace", o.trace, "Trace file")->required();
  compare->add_option("systems,--systems", o.systems, "Configuration names")
      ->required()
      ->delimiter(',');
  compare->add_option("--subject-prefix", o.prefixes, "Only count locations under this prefix")
      ->delimiter(',');
  compare->add_flag("--timing", o.timing, "Add a wall_ms column");

  auto* tagtest = app.add_subcommand("tagtest", "List tag-test candidates");
  tagtest->add_option("trace", o.trace, "Trace file")->required();
  tagtest->add_flag("--raw", o.raw, "Per-frame candidates instead of deduplicated ones");

  try {
    std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (record->parsed()) return cmd_record(o, out, err);
    if (type->parsed()) return cmd_type(o, out);
    if (compare->parsed()) return cmd_compare(o, out, err);
    if (tagtest->parsed()) return cmd_tagtest(o, out, err);
  } catch (const UnknownSystem& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace tracetype::cli
