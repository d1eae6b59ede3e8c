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

#include "dtcb/gateway/messages.h"

#include "absl/strings/str_cat.h"
#include "dtcb/crypto/canonical.h"
#include "dtcb/status_macros.h"

namespace dtcb::gateway {
namespace {

using crypto::CanonicalReader;
using crypto::CanonicalWriter;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr uint64_t kMaxCosignatures = 64;

void WriteAssertion(const SignedAssertion& a, CanonicalWriter& w) {
  w.PutU64(static_cast<uint64_t>(a.kind))
      .Put(a.txid1_public)
      .Put(a.txid2_public)
      .Put(a.asserter)
      .Put(a.session_nonce);
}

absl::StatusOr<SignedAssertion> ReadAssertion(CanonicalReader& r) {
  SignedAssertion a;
  DTCB_ASSIGN_OR_RETURN(uint64_t kind, r.GetU64());
  if (kind != static_cast<uint64_t>(AssertionKind::kRegistered) &&
      kind != static_cast<uint64_t>(AssertionKind::kInvalidated)) {
    return absl::InvalidArgumentError("assertion: unknown kind");
  }
  a.kind = static_cast<AssertionKind>(kind);
  DTCB_ASSIGN_OR_RETURN(a.txid1_public, r.GetFixed<crypto::Digest>());
  DTCB_ASSIGN_OR_RETURN(a.txid2_public, r.GetFixed<crypto::Digest>());
  DTCB_ASSIGN_OR_RETURN(a.asserter, r.GetFixed<crypto::PublicKey>());
  DTCB_ASSIGN_OR_RETURN(a.session_nonce, r.GetFixed<crypto::Nonce>());
  DTCB_ASSIGN_OR_RETURN(a.signature, r.GetFixed<crypto::Signature>());
  return a;
}

void WriteBody(const Message& message, CanonicalWriter& w) {
  std::visit(
      Overloaded{
          [&](const TrustChallenge& m) {
            w.Put(m.session_id).Put(m.challenge);
            w.PutBool(m.credential.has_value());
            if (m.credential.has_value()) w.PutBytes(m.credential->Serialize());
            w.Put(m.possession_proof);
          },
          [&](const TrustEvidence& m) {
            w.Put(m.session_id)
                .PutBytes(m.quote.Serialize())
                .PutBytes(m.manifest.Serialize())
                .PutBytes(m.chain.Serialize());
          },
          [&](const TransferRequest& m) {
            w.Put(m.session_id)
                .Put(m.txid1_public)
                .Put(m.dest_owner)
                .PutU64(m.value)
                .PutString(m.source_chain)
                .PutString(m.dest_chain);
          },
          [&](const AssertionMessage& m) {
            WriteAssertion(m.assertion, w);
            w.Put(m.assertion.signature);
            w.PutU64(m.cosignatures.size());
            for (const auto& c : m.cosignatures) w.Put(c.signer).Put(c.signature);
          },
          [&](const ErrorMessage& m) {
            w.Put(m.session_id).PutString(m.reason);
          },
      },
      message);
}

absl::StatusOr<Message> ReadBody(MessageKind kind, CanonicalReader& r) {
  switch (kind) {
    case MessageKind::kTrustChallenge: {
      TrustChallenge m;
      DTCB_ASSIGN_OR_RETURN(m.session_id, r.GetFixed<crypto::Nonce>());
      DTCB_ASSIGN_OR_RETURN(m.challenge, r.GetFixed<crypto::Nonce>());
      DTCB_ASSIGN_OR_RETURN(bool has_credential, r.GetBool());
      if (has_credential) {
        DTCB_ASSIGN_OR_RETURN(Bytes raw, r.GetBytes());
        DTCB_ASSIGN_OR_RETURN(m.credential,
                              attestation::MembershipCredential::Parse(raw));
      }
      DTCB_ASSIGN_OR_RETURN(m.possession_proof,
                            r.GetFixed<crypto::Signature>());
      return m;
    }
    case MessageKind::kTrustEvidence: {
      TrustEvidence m;
      DTCB_ASSIGN_OR_RETURN(m.session_id, r.GetFixed<crypto::Nonce>());
      DTCB_ASSIGN_OR_RETURN(Bytes quote, r.GetBytes());
      DTCB_ASSIGN_OR_RETURN(m.quote, attestation::Quote::Parse(quote));
      DTCB_ASSIGN_OR_RETURN(Bytes manifest, r.GetBytes());
      DTCB_ASSIGN_OR_RETURN(m.manifest, attestation::Manifest::Parse(manifest));
      DTCB_ASSIGN_OR_RETURN(Bytes chain, r.GetBytes());
      DTCB_ASSIGN_OR_RETURN(m.chain, dice::PublicChain::Parse(chain));
      return m;
    }
    case MessageKind::kTransferRequest: {
      TransferRequest m;
      DTCB_ASSIGN_OR_RETURN(m.session_id, r.GetFixed<crypto::Nonce>());
      DTCB_ASSIGN_OR_RETURN(m.txid1_public, r.GetFixed<crypto::Digest>());
      DTCB_ASSIGN_OR_RETURN(m.dest_owner, r.GetFixed<crypto::PublicKey>());
      DTCB_ASSIGN_OR_RETURN(m.value, r.GetU64());
      DTCB_ASSIGN_OR_RETURN(m.source_chain, r.GetString());
      DTCB_ASSIGN_OR_RETURN(m.dest_chain, r.GetString());
      return m;
    }
    case MessageKind::kRegisteredAssertion:
    case MessageKind::kInvalidatedAssertion: {
      AssertionMessage m;
      DTCB_ASSIGN_OR_RETURN(m.assertion, ReadAssertion(r));
      const AssertionKind expected = kind == MessageKind::kRegisteredAssertion
                                         ? AssertionKind::kRegistered
                                         : AssertionKind::kInvalidated;
      if (m.assertion.kind != expected) {
        return absl::InvalidArgumentError(
            "assertion kind does not match message kind");
      }
      DTCB_ASSIGN_OR_RETURN(uint64_t count, r.GetU64());
      if (count > kMaxCosignatures) {
        return absl::InvalidArgumentError("too many co-signatures");
      }
      for (uint64_t i = 0; i < count; ++i) {
        CoSignature c;
        DTCB_ASSIGN_OR_RETURN(c.signer, r.GetFixed<crypto::PublicKey>());
        DTCB_ASSIGN_OR_RETURN(c.signature, r.GetFixed<crypto::Signature>());
        m.cosignatures.push_back(c);
      }
      return m;
    }
    case MessageKind::kError: {
      ErrorMessage m;
      DTCB_ASSIGN_OR_RETURN(m.session_id, r.GetFixed<crypto::Nonce>());
      DTCB_ASSIGN_OR_RETURN(m.reason, r.GetString());
      return m;
    }
  }
  return absl::InvalidArgumentError("unknown message kind");
}

}  // namespace

std::string_view KindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kTrustChallenge:
      return "TrustChallenge";
    case MessageKind::kTrustEvidence:
      return "TrustEvidence";
    case MessageKind::kTransferRequest:
      return "TransferRequest";
    case MessageKind::kRegisteredAssertion:
      return "RegisteredAssertion";
    case MessageKind::kInvalidatedAssertion:
      return "InvalidatedAssertion";
    case MessageKind::kError:
      return "Error";
  }
  return "Unknown";
}

crypto::Digest MaskTxId(const crypto::Digest& private_id,
                        std::string_view chain_id, const crypto::Nonce& nonce) {
  CanonicalWriter w(crypto::Tag::kMaskedTxId);
  w.PutString(chain_id).Put(private_id).Put(nonce);
  return crypto::Hash(w.bytes());
}

Bytes SignedAssertion::SignedPayload() const {
  CanonicalWriter w(crypto::Tag::kAssertion);
  WriteAssertion(*this, w);
  return w.Take();
}

void SignedAssertion::SignWith(const crypto::KeyPair& key) {
  asserter = key.public_key;
  signature = crypto::Sign(key.secret_key, SignedPayload());
}

bool SignedAssertion::SignatureValid() const {
  return crypto::Verify(asserter, SignedPayload(), signature.view());
}

MessageKind KindOf(const Message& message) {
  return std::visit(
      Overloaded{
          [](const TrustChallenge&) { return MessageKind::kTrustChallenge; },
          [](const TrustEvidence&) { return MessageKind::kTrustEvidence; },
          [](const TransferRequest&) { return MessageKind::kTransferRequest; },
          [](const AssertionMessage& m) {
            return m.assertion.kind == AssertionKind::kRegistered
                       ? MessageKind::kRegisteredAssertion
                       : MessageKind::kInvalidatedAssertion;
          },
          [](const ErrorMessage&) { return MessageKind::kError; },
      },
      message);
}

const crypto::Nonce& SessionOf(const Message& message) {
  return std::visit(
      Overloaded{
          [](const TrustChallenge& m) -> const crypto::Nonce& {
            return m.session_id;
          },
          [](const TrustEvidence& m) -> const crypto::Nonce& {
            return m.session_id;
          },
          [](const TransferRequest& m) -> const crypto::Nonce& {
            return m.session_id;
          },
          [](const AssertionMessage& m) -> const crypto::Nonce& {
            return m.assertion.session_nonce;
          },
          [](const ErrorMessage& m) -> const crypto::Nonce& {
            return m.session_id;
          },
      },
      message);
}

Bytes Encode(const Envelope& envelope) {
  CanonicalWriter w;
  w.PutRawByte(static_cast<uint8_t>(KindOf(envelope.message)));
  w.PutString(envelope.from).PutString(envelope.to);
  WriteBody(envelope.message, w);
  return w.Take();
}

absl::StatusOr<Envelope> Decode(ByteView bytes) {
  CanonicalReader r(bytes);
  DTCB_ASSIGN_OR_RETURN(uint8_t raw_kind, r.RawByte());
  if (raw_kind < static_cast<uint8_t>(MessageKind::kTrustChallenge) ||
      raw_kind > static_cast<uint8_t>(MessageKind::kError)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown message kind ", raw_kind));
  }
  Envelope envelope;
  DTCB_ASSIGN_OR_RETURN(envelope.from, r.GetString());
  DTCB_ASSIGN_OR_RETURN(envelope.to, r.GetString());
  DTCB_ASSIGN_OR_RETURN(envelope.message,
                        ReadBody(static_cast<MessageKind>(raw_kind), r));
  DTCB_RETURN_IF_ERROR(r.Finish());
  return envelope;
}

}  // namespace dtcb::gateway
