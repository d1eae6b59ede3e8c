// Copyright 2026 The dtcb-sim Authors
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

#ifndef DTCB_VERDICT_H_
#define DTCB_VERDICT_H_

#include <string>
#include <utility>

namespace dtcb {

// Outcome of a check whose failure is an expected value rather than an
// error: quote and manifest verification, SVN gating, trust decisions.
class Verdict {
 public:
  static Verdict Accept() { return Verdict(true, {}); }
  static Verdict Reject(std::string reason) {
    return Verdict(false, std::move(reason));
  }

  bool accepted() const { return accepted_; }
  explicit operator bool() const { return accepted_; }
  const std::string& reason() const { return reason_; }

 private:
  Verdict(bool accepted, std::string reason)
      : accepted_(accepted), reason_(std::move(reason)) {}

  bool accepted_;
  std::string reason_;
};

}  // namespace dtcb

#endif  // DTCB_VERDICT_H_
