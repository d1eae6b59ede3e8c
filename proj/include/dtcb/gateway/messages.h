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

#ifndef DTCB_GATEWAY_MESSAGES_H_
#define DTCB_GATEWAY_MESSAGES_H_

// Inter-gateway wire format: a one-byte message kind, then the canonical
// encoding of sender, recipient and the kind-specific fields. Nested evidence
// (quotes, manifests, chains, credentials) travels as length-prefixed
// canonical blobs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/attestation/manifest.h"
#include "dtcb/attestation/membership.h"
#include "dtcb/attestation/quote.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/gateway/quorum.h"

namespace dtcb::gateway {

enum class MessageKind : uint8_t {
  kTrustChallenge = 0x10,
  kTrustEvidence = 0x11,
  kTransferRequest = 0x12,
  kRegisteredAssertion = 0x13,
  kInvalidatedAssertion = 0x14,
  kError = 0x15,
};

std::string_view KindName(MessageKind kind);

// Public transaction id hiding a private one: H(0x08 | chain | private | nonce).
crypto::Digest MaskTxId(const crypto::Digest& private_id,
                        std::string_view chain_id, const crypto::Nonce& nonce);

enum class AssertionKind : uint8_t { kRegistered = 1, kInvalidated = 2 };

struct SignedAssertion {
  AssertionKind kind = AssertionKind::kRegistered;
  crypto::Digest txid1_public;
  crypto::Digest txid2_public;
  crypto::PublicKey asserter;
  crypto::Nonce session_nonce;
  crypto::Signature signature;

  // 0x07 | kind | txid1 | txid2 | asserter | session_nonce
  Bytes SignedPayload() const;
  void SignWith(const crypto::KeyPair& key);
  bool SignatureValid() const;
};

struct TrustChallenge {
  crypto::Nonce session_id;
  crypto::Nonce challenge;
  std::optional<attestation::MembershipCredential> credential;
  // Pseudonym possession proof; all zeros when there is no credential.
  crypto::Signature possession_proof;
};

struct TrustEvidence {
  crypto::Nonce session_id;
  attestation::Quote quote;
  attestation::Manifest manifest;
  dice::PublicChain chain;
};

struct TransferRequest {
  crypto::Nonce session_id;
  crypto::Digest txid1_public;
  crypto::PublicKey dest_owner;
  uint64_t value = 0;
  std::string source_chain;
  std::string dest_chain;
};

struct AssertionMessage {
  SignedAssertion assertion;
  // Present for transfers at or above the sensitivity threshold.
  std::vector<CoSignature> cosignatures;
};

struct ErrorMessage {
  crypto::Nonce session_id;
  std::string reason;
};

using Message = std::variant<TrustChallenge, TrustEvidence, TransferRequest,
                             AssertionMessage, ErrorMessage>;

MessageKind KindOf(const Message& message);
// The session a message belongs to; assertions are bound by session_nonce.
const crypto::Nonce& SessionOf(const Message& message);

struct Envelope {
  std::string from;
  std::string to;
  Message message;
};

Bytes Encode(const Envelope& envelope);
absl::StatusOr<Envelope> Decode(ByteView bytes);

}  // namespace dtcb::gateway

#endif  // DTCB_GATEWAY_MESSAGES_H_
