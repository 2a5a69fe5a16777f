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

#ifndef TRACETYPE_TAGTEST_HPP_
#define TRACETYPE_TAGTEST_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "tracetype/framework.hpp"
#include "tracetype/trace.hpp"
#include "tracetype/types.hpp"

namespace tracetype {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two adjacent reads of a variable in one frame, the second strictly narrower.
struct TagTestCandidate {
  std::string var;
  std::string frame;
  SourceLoc wide_loc;
  SourceLoc narrow_loc;
  Type wide;
  Type narrow;
  std::size_t wide_stmt = 0;
  std::size_t narrow_stmt = 0;
  bool dup_hint = false;
};

struct TagTestResult {
  std::vector<TagTestCandidate> raw;           // per frame, trace order
  std::vector<TagTestCandidate> deduplicated;  // first per location pair
};

// Requires a flow-sensitive merge policy; compiler temporaries are skipped.
TagTestResult detect_tag_tests(const TypedTrace& typed);
// Types the trace with the tag-test system first.
TagTestResult detect_tag_tests(const TraceProgram& trace);

// var,frame,wide_loc,narrow_loc,wide_type,narrow_type,dup_hint
std::string tag_tests_csv(const std::vector<TagTestCandidate>& candidates);

}  // namespace tracetype

#endif  // TRACETYPE_TAGTEST_HPP_
