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

#ifndef DTCB_ATTESTATION_QUOTE_H_
#define DTCB_ATTESTATION_QUOTE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/attestation/policy.h"
#include "dtcb/attestation/registers.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/verdict.h"

namespace dtcb::attestation {

// Modeled TCB properties. A node lacking either one refuses to quote.
struct Capabilities {
  bool well_defined = true;  // functions are well defined
  bool shielded = true;      // execution is shielded
};

struct Quote {
  crypto::PublicKey signer;
  RegisterValues registers{};
  crypto::Nonce nonce;
  crypto::Digest chain_digest;
  crypto::Signature signature;

  // 0x05 | registers | nonce | chain_digest
  Bytes SignedPayload() const;
  Bytes Serialize() const;
  static absl::StatusOr<Quote> Parse(ByteView bytes);
};

// Signs with the topmost AliasID. Fails for a layer-0-only chain or when the
// node's capabilities do not allow attestation.
absl::StatusOr<Quote> CreateQuote(const dice::DeviceIdentity& identity,
                                  const Registers& regs,
                                  const crypto::Nonce& nonce,
                                  Capabilities caps = {});

// Checks, in order: signature ("bad signature"), signer ("unexpected
// signer"), nonce ("nonce mismatch"), then age against the policy window
// ("stale quote"). `age_ticks` is the simulated time since the nonce was
// issued.
Verdict VerifyQuote(const Quote& quote, const crypto::PublicKey& expected_key,
                    const crypto::Nonce& nonce, const DtcbPolicy& policy,
                    uint64_t age_ticks = 0);

struct GroupMember {
  const dice::DeviceIdentity* identity = nullptr;
  const Registers* registers = nullptr;
  Capabilities caps;
};

struct GroupQuote {
  crypto::Nonce challenge;
  std::vector<Quote> member_quotes;
  bool quorum_met = false;
};

// Every member quotes over the shared challenge; members that cannot quote
// are left out. quorum_met reflects CountVerifiedSigners at creation time.
absl::StatusOr<GroupQuote> CollectGroupQuote(
    std::span<const GroupMember> members, const crypto::Nonce& challenge,
    size_t quorum_m);

// Distinct signers whose quote carries the group challenge and a valid
// signature. Repeated signers count once.
size_t CountVerifiedSigners(const GroupQuote& group);

// Re-derives the quorum decision from the quotes themselves.
bool GroupQuorumMet(const GroupQuote& group, size_t quorum_m);

}  // namespace dtcb::attestation

#endif  // DTCB_ATTESTATION_QUOTE_H_
