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

#include "dtcb/attestation/policy.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace dtcb::attestation {

absl::Status DtcbPolicy::Validate() const {
  if (required_components.empty()) {
    return absl::InvalidArgumentError("policy: no required components");
  }
  return absl::OkStatus();
}

PolicyResult EvaluatePolicy(const Manifest& manifest,
                            const DtcbPolicy& policy) {
  PolicyResult result;
  for (const auto& req : policy.required_components) {
    auto it = std::find_if(
        manifest.entries.begin(), manifest.entries.end(),
        [&](const ManifestEntry& e) { return e.component_name == req.name; });
    if (it == manifest.entries.end()) {
      result.reasons.push_back(absl::StrCat("missing component ", req.name));
      continue;
    }
    if (it->svn < req.min_svn) {
      result.reasons.push_back(
          absl::StrCat("svn regression component ", req.name));
    }
    if (req.pinned_digest.has_value() && it->code_digest != *req.pinned_digest) {
      result.reasons.push_back(
          absl::StrCat("digest mismatch component ", req.name));
    }
  }
  result.compliant = result.reasons.empty();
  return result;
}

}  // namespace dtcb::attestation
