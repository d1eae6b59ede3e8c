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

#include "dtcb/attestation/membership.h"

#include "dtcb/crypto/canonical.h"

namespace dtcb::attestation {
namespace {

constexpr char kPossessionLabel[] = "pseudonym-possession";

}  // namespace

Bytes MembershipCredential::SignedPayload() const {
  crypto::CanonicalWriter w(crypto::Tag::kMembership);
  w.Put(member_pseudonym).PutString(group_id);
  return w.Take();
}

Bytes MembershipCredential::Serialize() const {
  crypto::CanonicalWriter w(crypto::Tag::kMembership);
  w.Put(member_pseudonym).PutString(group_id).Put(authority_signature);
  return w.Take();
}

absl::StatusOr<MembershipCredential> MembershipCredential::Parse(
    ByteView bytes) {
  crypto::CanonicalReader r(bytes);
  if (auto s = r.ExpectTag(crypto::Tag::kMembership); !s.ok()) return s;
  MembershipCredential c;
  auto pseudonym = r.GetFixed<crypto::PublicKey>();
  if (!pseudonym.ok()) return pseudonym.status();
  auto group = r.GetString();
  if (!group.ok()) return group.status();
  auto sig = r.GetFixed<crypto::Signature>();
  if (!sig.ok()) return sig.status();
  if (auto s = r.Finish(); !s.ok()) return s;
  c.member_pseudonym = *pseudonym;
  c.group_id = std::move(*group);
  c.authority_signature = *sig;
  return c;
}

absl::StatusOr<MembershipCredential> IssueMembership(
    const crypto::KeyPair& authority, const crypto::PublicKey& pseudonym,
    const std::string& group_id, const crypto::PublicKey& holder_device_id) {
  if (pseudonym == holder_device_id) {
    return absl::InvalidArgumentError(
        "membership: pseudonym must not be the holder's DeviceID key");
  }
  MembershipCredential c;
  c.member_pseudonym = pseudonym;
  c.group_id = group_id;
  c.authority_signature = crypto::Sign(authority.secret_key, c.SignedPayload());
  return c;
}

bool VerifyMembership(const MembershipCredential& credential,
                      const crypto::PublicKey& authority_public) {
  return crypto::Verify(authority_public, credential.SignedPayload(),
                        credential.authority_signature.view());
}

namespace {

Bytes PossessionPayload(ByteView challenge) {
  crypto::CanonicalWriter w(crypto::Tag::kMembership);
  w.PutString(kPossessionLabel).PutBytes(challenge);
  return w.Take();
}

}  // namespace

crypto::Signature ProvePseudonym(const crypto::KeyPair& pseudonym,
                                 ByteView challenge) {
  return crypto::Sign(pseudonym.secret_key, PossessionPayload(challenge));
}

bool VerifyPseudonymProof(const crypto::PublicKey& pseudonym,
                          ByteView challenge, ByteView proof) {
  return crypto::Verify(pseudonym, PossessionPayload(challenge), proof);
}

}  // namespace dtcb::attestation
