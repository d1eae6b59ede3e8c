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

#include "dtcb/gateway/trust.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace dtcb::gateway {
namespace {

Bytes PossessionBinding(const crypto::Nonce& session_id,
                        const crypto::Nonce& bound_nonce) {
  Bytes out(session_id.view().begin(), session_id.view().end());
  out.insert(out.end(), bound_nonce.view().begin(), bound_nonce.view().end());
  return out;
}

Envelope Wrap(const GatewayCredentials& from, const GatewayCredentials& to,
              Message message) {
  return Envelope{from.node_id, to.node_id, std::move(message)};
}

}  // namespace

TrustChallenge MakeChallenge(const GatewayCredentials& self,
                             const crypto::Nonce& session_id,
                             const crypto::Nonce& challenge,
                             const crypto::Nonce& bound_nonce) {
  TrustChallenge out;
  out.session_id = session_id;
  out.challenge = challenge;
  if (self.membership.has_value() && self.pseudonym.has_value()) {
    out.credential = self.membership;
    out.possession_proof = attestation::ProvePseudonym(
        *self.pseudonym, PossessionBinding(session_id, bound_nonce));
  }
  return out;
}

Verdict CheckChallenge(const TrustChallenge& challenge,
                       const PeeringPolicy& policy,
                       const crypto::Nonce& bound_nonce) {
  if (!challenge.credential.has_value()) {
    return Verdict::Reject("membership: no credential");
  }
  const auto& cred = *challenge.credential;
  if (cred.group_id != policy.group_id) {
    return Verdict::Reject("membership: wrong group");
  }
  if (!attestation::VerifyMembership(cred, policy.dtcb.group_authority_key)) {
    return Verdict::Reject("membership: bad authority signature");
  }
  if (!attestation::VerifyPseudonymProof(
          cred.member_pseudonym,
          PossessionBinding(challenge.session_id, bound_nonce),
          challenge.possession_proof.view())) {
    return Verdict::Reject("membership: bad possession proof");
  }
  return Verdict::Accept();
}

absl::StatusOr<TrustEvidence> MakeEvidence(const GatewayCredentials& self,
                                           const crypto::Nonce& session_id,
                                           const crypto::Nonce& peer_challenge) {
  if (!self.manifest.has_value()) {
    return absl::FailedPreconditionError("evidence: no manifest");
  }
  auto quote = attestation::CreateQuote(self.identity, self.registers,
                                        peer_challenge, self.caps);
  if (!quote.ok()) return quote.status();
  TrustEvidence out;
  out.session_id = session_id;
  out.quote = std::move(*quote);
  out.manifest = *self.manifest;
  out.chain = self.identity.public_chain();
  return out;
}

Verdict CheckEvidence(const TrustEvidence& evidence,
                      const crypto::Nonce& my_challenge,
                      const PeeringPolicy& policy, uint64_t age_ticks,
                      const dice::SvnRecord& peer_svns) {
  if (evidence.chain.alias_ids.empty()) {
    return Verdict::Reject("evidence: chain has no alias layer");
  }
  const crypto::PublicKey& key = evidence.chain.top_key();
  if (evidence.manifest.node_id != key) {
    return Verdict::Reject("evidence: manifest signer is not the chain's alias");
  }
  if (Verdict v = attestation::VerifyQuote(evidence.quote, key, my_challenge,
                                           policy.dtcb, age_ticks);
      !v) {
    return Verdict::Reject(absl::StrCat("quote: ", v.reason()));
  }
  if (evidence.quote.chain_digest != evidence.chain.Digest()) {
    return Verdict::Reject("quote: chain digest mismatch");
  }
  if (Verdict v = attestation::VerifyManifest(evidence.manifest, key); !v) {
    return Verdict::Reject(absl::StrCat("manifest: ", v.reason()));
  }
  attestation::PolicyResult policy_result =
      attestation::EvaluatePolicy(evidence.manifest, policy.dtcb);
  if (!policy_result.compliant) {
    return Verdict::Reject(absl::StrCat(
        "noncompliant: ", absl::StrJoin(policy_result.reasons, "; ")));
  }
  dice::SvnRecord scratch = peer_svns;
  for (const auto& m : evidence.chain.measurements) {
    if (!dice::CheckSvn(scratch, m)) {
      return Verdict::Reject(
          absl::StrCat("svn regression layer ", m.layer_index));
    }
  }
  return Verdict::Accept();
}

TrustOutcome EstablishTrust(const GatewayCredentials& initiator,
                            const GatewayCredentials& responder,
                            const PeeringPolicy& policy,
                            const TrustNonces& nonces) {
  TrustOutcome out;
  auto send = [&](bool from_initiator, Message m) {
    if (from_initiator) {
      out.transcript.push_back(Wrap(initiator, responder, std::move(m)));
      ++out.initiator_sent;
    } else {
      out.transcript.push_back(Wrap(responder, initiator, std::move(m)));
      ++out.responder_sent;
    }
  };
  auto reject = [&](bool by_initiator, std::string reason) {
    send(by_initiator, ErrorMessage{nonces.session_id, reason});
    out.rejection = std::move(reason);
    return out;
  };
  const dice::SvnRecord fresh;

  // 1. Initiator challenge.
  TrustChallenge c1 =
      MakeChallenge(initiator, nonces.session_id, nonces.initiator_challenge,
                    nonces.initiator_challenge);
  send(true, c1);
  if (Verdict v = CheckChallenge(c1, policy, c1.challenge); !v) {
    return reject(false, v.reason());
  }

  // 2. Responder challenge.
  TrustChallenge c2 =
      MakeChallenge(responder, nonces.session_id, nonces.responder_challenge,
                    nonces.initiator_challenge);
  send(false, c2);
  if (Verdict v = CheckChallenge(c2, policy, nonces.initiator_challenge); !v) {
    return reject(true, v.reason());
  }

  // 3. Initiator evidence.
  auto e1 = MakeEvidence(initiator, nonces.session_id, c2.challenge);
  if (!e1.ok()) return reject(true, std::string(e1.status().message()));
  send(true, *e1);
  if (Verdict v = CheckEvidence(*e1, nonces.responder_challenge, policy, 0,
                                fresh);
      !v) {
    return reject(false, v.reason());
  }

  // 4. Responder evidence.
  auto e2 = MakeEvidence(responder, nonces.session_id, c1.challenge);
  if (!e2.ok()) return reject(false, std::string(e2.status().message()));
  send(false, *e2);
  if (Verdict v = CheckEvidence(*e2, nonces.initiator_challenge, policy, 0,
                                fresh);
      !v) {
    return reject(true, v.reason());
  }

  out.session = TrustSession{nonces.session_id, e1->chain.top_key(),
                             e2->chain.top_key()};
  return out;
}

}  // namespace dtcb::gateway
