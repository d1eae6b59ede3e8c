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

#ifndef DTCB_ATTESTATION_POLICY_H_
#define DTCB_ATTESTATION_POLICY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "dtcb/attestation/manifest.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::attestation {

struct RequiredComponent {
  std::string name;
  uint64_t min_svn = 0;
  std::optional<crypto::Digest> pinned_digest;
};

// The minimal hardware/software set a node must run to join the group, plus
// freshness and group-authority parameters.
struct DtcbPolicy {
  std::vector<RequiredComponent> required_components;
  uint64_t max_quote_age_ticks = 0;
  crypto::PublicKey group_authority_key;

  absl::Status Validate() const;
};

struct PolicyResult {
  bool compliant = false;
  std::vector<std::string> reasons;
};

// Assumes the manifest signature was already verified. Every failed
// requirement contributes one reason:
//   "missing component <name>"
//   "svn regression component <name>"   (svn below min_svn)
//   "digest mismatch component <name>"
PolicyResult EvaluatePolicy(const Manifest& manifest, const DtcbPolicy& policy);

}  // namespace dtcb::attestation

#endif  // DTCB_ATTESTATION_POLICY_H_
