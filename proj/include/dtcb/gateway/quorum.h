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

#ifndef DTCB_GATEWAY_QUORUM_H_
#define DTCB_GATEWAY_QUORUM_H_

// Peering parameters and m-of-n co-signing for sensitive transfers.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dtcb/attestation/policy.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::gateway {

struct PeeringPolicy {
  attestation::DtcbPolicy dtcb;
  std::string group_id = "gateways";
  size_t quorum_m = 1;
  size_t quorum_n = 1;
  // Transfers with value >= this need quorum approval.
  uint64_t sensitive_threshold = std::numeric_limits<uint64_t>::max();

  absl::Status Validate() const;
  bool IsSensitive(uint64_t value) const { return value >= sensitive_threshold; }
};

struct CoSignature {
  crypto::PublicKey signer;
  crypto::Signature signature;

  friend bool operator==(const CoSignature&, const CoSignature&) = default;
};

struct QuorumSigner {
  crypto::KeyPair key;
  bool live = true;
};

// Every live signer signs `payload`. Signatures from keys outside
// `authorized` are dropped. Fails with "quorum unreachable" when fewer than
// quorum_m distinct authorized signers are live.
absl::StatusOr<std::vector<CoSignature>> QuorumApprove(
    std::span<const QuorumSigner> gateways, ByteView payload,
    const PeeringPolicy& policy, std::span<const crypto::PublicKey> authorized);

// True iff at least `m` distinct members of `authorized` produced a valid
// signature over `payload`.
bool VerifyQuorum(ByteView payload, std::span<const CoSignature> signatures,
                  std::span<const crypto::PublicKey> authorized, size_t m);

}  // namespace dtcb::gateway

#endif  // DTCB_GATEWAY_QUORUM_H_
