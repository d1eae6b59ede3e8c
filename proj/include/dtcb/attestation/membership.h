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

#ifndef DTCB_ATTESTATION_MEMBERSHIP_H_
#define DTCB_ATTESTATION_MEMBERSHIP_H_

#include <string>

#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::attestation {

// Authority-issued credential binding a per-enrollment pseudonym key to a
// group. Holding it proves membership without disclosing the DeviceID.
struct MembershipCredential {
  crypto::PublicKey member_pseudonym;
  std::string group_id;
  crypto::Signature authority_signature;

  // 0x09 | pseudonym | group_id
  Bytes SignedPayload() const;
  Bytes Serialize() const;
  static absl::StatusOr<MembershipCredential> Parse(ByteView bytes);
};

// Refuses to certify a pseudonym equal to the holder's DeviceID key.
absl::StatusOr<MembershipCredential> IssueMembership(
    const crypto::KeyPair& authority, const crypto::PublicKey& pseudonym,
    const std::string& group_id, const crypto::PublicKey& holder_device_id);

bool VerifyMembership(const MembershipCredential& credential,
                      const crypto::PublicKey& authority_public);

// Proof that the presenter holds the pseudonym's secret key, bound to a
// challenge chosen by the verifier.
crypto::Signature ProvePseudonym(const crypto::KeyPair& pseudonym,
                                 ByteView challenge);
bool VerifyPseudonymProof(const crypto::PublicKey& pseudonym,
                          ByteView challenge, ByteView proof);

}  // namespace dtcb::attestation

#endif  // DTCB_ATTESTATION_MEMBERSHIP_H_
