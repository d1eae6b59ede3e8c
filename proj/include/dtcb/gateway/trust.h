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

#ifndef DTCB_GATEWAY_TRUST_H_
#define DTCB_GATEWAY_TRUST_H_

// Mutual trust establishment between two gateways. Four messages:
//
//   I -> R  TrustChallenge   session id, nonce_I, I's membership credential
//   R -> I  TrustChallenge   nonce_R, R's credential (proof bound to nonce_I)
//   I -> R  TrustEvidence    quote over nonce_R, manifest, public chain
//   R -> I  TrustEvidence    quote over nonce_I, manifest, public chain
//
// Membership is checked on the challenges, so a non-member never gets to see
// the other side's manifest.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/attestation/manifest.h"
#include "dtcb/attestation/membership.h"
#include "dtcb/attestation/quote.h"
#include "dtcb/attestation/registers.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/gateway/messages.h"
#include "dtcb/gateway/quorum.h"
#include "dtcb/verdict.h"

namespace dtcb::gateway {

struct GatewayCredentials {
  std::string node_id;
  dice::DeviceIdentity identity;
  attestation::Registers registers;
  attestation::Capabilities caps;
  std::optional<attestation::Manifest> manifest;
  std::optional<attestation::MembershipCredential> membership;
  std::optional<crypto::KeyPair> pseudonym;

  // Topmost AliasID; the key assertions and evidence are signed with.
  std::optional<crypto::KeyPair> signing_key() const {
    return identity.top_alias();
  }
};

// `bound_nonce` is what the possession proof signs: the sender's own
// challenge for the initiator, the initiator's challenge for the responder.
TrustChallenge MakeChallenge(const GatewayCredentials& self,
                             const crypto::Nonce& session_id,
                             const crypto::Nonce& challenge,
                             const crypto::Nonce& bound_nonce);

Verdict CheckChallenge(const TrustChallenge& challenge,
                       const PeeringPolicy& policy,
                       const crypto::Nonce& bound_nonce);

absl::StatusOr<TrustEvidence> MakeEvidence(const GatewayCredentials& self,
                                           const crypto::Nonce& session_id,
                                           const crypto::Nonce& peer_challenge);

// `age_ticks` is the time since `my_challenge` was issued. `peer_svns` holds
// the highest layer SVNs previously accepted from this peer.
Verdict CheckEvidence(const TrustEvidence& evidence,
                      const crypto::Nonce& my_challenge,
                      const PeeringPolicy& policy, uint64_t age_ticks,
                      const dice::SvnRecord& peer_svns);

struct TrustSession {
  crypto::Nonce session_id;
  crypto::PublicKey initiator_key;
  crypto::PublicKey responder_key;
};

struct TrustOutcome {
  std::optional<TrustSession> session;
  std::string rejection;
  std::vector<Envelope> transcript;
  size_t initiator_sent = 0;
  size_t responder_sent = 0;
};

struct TrustNonces {
  crypto::Nonce session_id;
  crypto::Nonce initiator_challenge;
  crypto::Nonce responder_challenge;
};

// Runs the exchange above synchronously. Any failed check ends it with an
// Error message and a rejection reason; no session is returned then.
TrustOutcome EstablishTrust(const GatewayCredentials& initiator,
                            const GatewayCredentials& responder,
                            const PeeringPolicy& policy,
                            const TrustNonces& nonces);

}  // namespace dtcb::gateway

#endif  // DTCB_GATEWAY_TRUST_H_
