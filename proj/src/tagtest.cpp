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

#include "tracetype/tagtest.hpp"

#include <map>
#include <set>
#include <tuple>

#include "tracetype/systems.hpp"

namespace tracetype {

namespace {

struct LastEvent {
  bool is_read = false;
  VarId var = 0;
  std::size_t stmt = 0;
};

}  // namespace

TagTestResult detect_tag_tests(const TypedTrace& typed) {
  if (typed.system->merge().flow != Flow::kSensitive) {
    throw ConfigError("tag-test detection needs flow-sensitive merging");
  }
  const TraceProgram& trace = *typed.trace;
  TagTestResult out;
  std::map<std::pair<std::string, std::string>, LastEvent> last;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto* w = std::get_if<VarWrite>(&trace[i].kind);
    if (!w) continue;
    const TraceVar& lhs = trace.var(w->lhs);
    if (lhs.frame == "N" || lhs.name.empty() || lhs.name[0] == '$') continue;
    bool is_read = false;
    if (const auto* r = std::get_if<VarRead>(&w->rhs)) {
      const TraceVar& src = trace.var(r->var);
      is_read = src.name == lhs.name && src.frame == lhs.frame;
    }
    auto& prev = last[{lhs.name, lhs.frame}];
    if (is_read && prev.is_read && trace[i].src.valid() && trace[prev.stmt].src.valid()) {
      const Type& wide = typed.gamma_hat(prev.var);
      const Type& narrow = typed.gamma_hat(w->lhs);
      if (is_subtype(narrow, wide) && !type_equal(narrow, wide)) {
        out.raw.push_back(TagTestCandidate{lhs.name, lhs.frame, trace[prev.stmt].src,
                                           trace[i].src, wide, narrow, prev.stmt, i, false});
      }
    }
    prev = LastEvent{is_read, w->lhs, i};
  }

  std::set<std::pair<SourceLoc, SourceLoc>> seen;
  for (const auto& c : out.raw) {
    if (seen.insert({c.wide_loc, c.narrow_loc}).second) out.deduplicated.push_back(c);
  }
  // A saved guard re-checked nearby yields a second candidate with the same
  // refinement; both are marked for manual review.
  auto& d = out.deduplicated;
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = 0; b < d.size(); ++b) {
      if (a == b || d[a].var != d[b].var) continue;
      if (frame_function(d[a].frame) != frame_function(d[b].frame)) continue;
      if (d[a].wide_loc.file != d[b].wide_loc.file) continue;
      auto la = d[a].wide_loc.line, lb = d[b].wide_loc.line;
      if ((la > lb ? la - lb : lb - la) > 2) continue;
      if (render(d[a].wide) != render(d[b].wide) || render(d[a].narrow) != render(d[b].narrow)) {
        continue;
      }
      d[a].dup_hint = true;
    }
  }
  for (auto& c : out.raw) {
    for (const auto& k : d) {
      if (k.wide_loc == c.wide_loc && k.narrow_loc == c.narrow_loc) c.dup_hint = k.dup_hint;
    }
  }
  return out;
}

TagTestResult detect_tag_tests(const TraceProgram& trace) {
  auto system = make_tagtest_system();
  TypedTrace typed = type_trace(trace, *system);
  return detect_tag_tests(typed);
}

std::string tag_tests_csv(const std::vector<TagTestCandidate>& candidates) {
  std::string out = "var,frame,wide_loc,narrow_loc,wide_type,narrow_type,dup_hint\n";
  for (const auto& c : candidates) {
    out += csv_field(c.var) + ',' + csv_field(c.frame) + ',' + csv_field(c.wide_loc.str()) + ',' +
           csv_field(c.narrow_loc.str()) + ',' + csv_field(render(c.wide)) + ',' +
           csv_field(render(c.narrow)) + ',' + (c.dup_hint ? "possible duplicate" : "") + '\n';
  }
  return out;
}

}  // namespace tracetype
