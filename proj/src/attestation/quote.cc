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

#include "dtcb/attestation/quote.h"

#include <set>

#include "dtcb/crypto/canonical.h"

namespace dtcb::attestation {
namespace {

using crypto::CanonicalReader;
using crypto::CanonicalWriter;

void WriteBody(const Quote& q, CanonicalWriter& w) {
  w.PutU64(q.registers.size());
  for (const auto& slot : q.registers) w.Put(slot);
  w.Put(q.nonce).Put(q.chain_digest);
}

}  // namespace

Bytes Quote::SignedPayload() const {
  CanonicalWriter w(crypto::Tag::kQuote);
  WriteBody(*this, w);
  return w.Take();
}

Bytes Quote::Serialize() const {
  CanonicalWriter w(crypto::Tag::kQuote);
  w.Put(signer);
  WriteBody(*this, w);
  w.Put(signature);
  return w.Take();
}

absl::StatusOr<Quote> Quote::Parse(ByteView bytes) {
  CanonicalReader r(bytes);
  if (auto s = r.ExpectTag(crypto::Tag::kQuote); !s.ok()) return s;
  Quote q;
  auto signer = r.GetFixed<crypto::PublicKey>();
  if (!signer.ok()) return signer.status();
  q.signer = *signer;
  auto count = r.GetU64();
  if (!count.ok()) return count.status();
  if (*count != kRegisterCount) {
    return absl::InvalidArgumentError("quote: wrong register count");
  }
  for (auto& slot : q.registers) {
    auto d = r.GetFixed<crypto::Digest>();
    if (!d.ok()) return d.status();
    slot = *d;
  }
  auto nonce = r.GetFixed<crypto::Nonce>();
  if (!nonce.ok()) return nonce.status();
  q.nonce = *nonce;
  auto chain = r.GetFixed<crypto::Digest>();
  if (!chain.ok()) return chain.status();
  q.chain_digest = *chain;
  auto sig = r.GetFixed<crypto::Signature>();
  if (!sig.ok()) return sig.status();
  q.signature = *sig;
  if (auto s = r.Finish(); !s.ok()) return s;
  return q;
}

absl::StatusOr<Quote> CreateQuote(const dice::DeviceIdentity& identity,
                                  const Registers& regs,
                                  const crypto::Nonce& nonce,
                                  Capabilities caps) {
  if (!caps.well_defined || !caps.shielded) {
    return absl::FailedPreconditionError(
        "quote: node lacks the well-defined/shielded capabilities");
  }
  auto alias = identity.top_alias();
  if (!alias.has_value()) {
    return absl::FailedPreconditionError(
        "quote: no signing key (chain has no alias layer)");
  }
  Quote q;
  q.signer = alias->public_key;
  q.registers = regs.values();
  q.nonce = nonce;
  q.chain_digest = identity.public_chain().Digest();
  q.signature = crypto::Sign(alias->secret_key, q.SignedPayload());
  return q;
}

Verdict VerifyQuote(const Quote& quote, const crypto::PublicKey& expected_key,
                    const crypto::Nonce& nonce, const DtcbPolicy& policy,
                    uint64_t age_ticks) {
  if (!crypto::Verify(quote.signer, quote.SignedPayload(),
                      quote.signature.view())) {
    return Verdict::Reject("bad signature");
  }
  if (quote.signer != expected_key) {
    return Verdict::Reject("unexpected signer");
  }
  if (quote.nonce != nonce) {
    return Verdict::Reject("nonce mismatch");
  }
  if (policy.max_quote_age_ticks > 0 && age_ticks > policy.max_quote_age_ticks) {
    return Verdict::Reject("stale quote");
  }
  return Verdict::Accept();
}

absl::StatusOr<GroupQuote> CollectGroupQuote(
    std::span<const GroupMember> members, const crypto::Nonce& challenge,
    size_t quorum_m) {
  if (quorum_m < 1) {
    return absl::InvalidArgumentError("group quote: quorum must be >= 1");
  }
  GroupQuote group;
  group.challenge = challenge;
  for (const auto& member : members) {
    if (member.identity == nullptr || member.registers == nullptr) continue;
    auto q = CreateQuote(*member.identity, *member.registers, challenge,
                         member.caps);
    if (q.ok()) group.member_quotes.push_back(std::move(*q));
  }
  group.quorum_met = GroupQuorumMet(group, quorum_m);
  return group;
}

size_t CountVerifiedSigners(const GroupQuote& group) {
  std::set<crypto::PublicKey> signers;
  for (const auto& q : group.member_quotes) {
    if (q.nonce != group.challenge) continue;
    if (!crypto::Verify(q.signer, q.SignedPayload(), q.signature.view())) {
      continue;
    }
    signers.insert(q.signer);
  }
  return signers.size();
}

bool GroupQuorumMet(const GroupQuote& group, size_t quorum_m) {
  return quorum_m >= 1 && CountVerifiedSigners(group) >= quorum_m;
}

}  // namespace dtcb::attestation
