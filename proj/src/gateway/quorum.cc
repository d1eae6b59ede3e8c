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

#include "dtcb/gateway/quorum.h"

#include <algorithm>
#include <set>

namespace dtcb::gateway {
namespace {

bool IsAuthorized(std::span<const crypto::PublicKey> authorized,
                  const crypto::PublicKey& key) {
  return std::find(authorized.begin(), authorized.end(), key) !=
         authorized.end();
}

}  // namespace

absl::Status PeeringPolicy::Validate() const {
  if (auto s = dtcb.Validate(); !s.ok()) return s;
  if (quorum_m < 1 || quorum_m > quorum_n) {
    return absl::InvalidArgumentError("peering policy: need 1 <= m <= n");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<CoSignature>> QuorumApprove(
    std::span<const QuorumSigner> gateways, ByteView payload,
    const PeeringPolicy& policy,
    std::span<const crypto::PublicKey> authorized) {
  std::vector<CoSignature> out;
  std::set<crypto::PublicKey> seen;
  for (const auto& g : gateways) {
    if (!g.live || !IsAuthorized(authorized, g.key.public_key)) continue;
    if (!seen.insert(g.key.public_key).second) continue;
    out.push_back(CoSignature{g.key.public_key,
                              crypto::Sign(g.key.secret_key, payload)});
  }
  if (out.size() < policy.quorum_m) {
    return absl::UnavailableError("quorum unreachable");
  }
  return out;
}

bool VerifyQuorum(ByteView payload, std::span<const CoSignature> signatures,
                  std::span<const crypto::PublicKey> authorized, size_t m) {
  std::set<crypto::PublicKey> counted;
  for (const auto& sig : signatures) {
    if (!IsAuthorized(authorized, sig.signer)) continue;
    if (counted.contains(sig.signer)) continue;
    if (!crypto::Verify(sig.signer, payload, sig.signature.view())) continue;
    counted.insert(sig.signer);
  }
  return counted.size() >= m;
}

}  // namespace dtcb::gateway
