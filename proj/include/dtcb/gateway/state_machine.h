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

#ifndef DTCB_GATEWAY_STATE_MACHINE_H_
#define DTCB_GATEWAY_STATE_MACHINE_H_

// The cross-chain transfer as two mirrored per-session state machines.
//
// Source (G1, chain of the asset)        Destination (G2)
//   Idle                                   Idle
//   TrustEstablishing   <-- challenges/evidence -->   TrustEstablishing
//   AwaitRegistration   (own TransferOut not yet confirmed)
//   AwaitRegistrationAssertion  -- TransferRequest --> RegistrationSubmitted
//                                                      AwaitLocalConfirm
//                       <-- Registered assertion --   RegistrationAssertionSent
//   InvalidationSubmitted                              AwaitInvalidationAssertion
//   AwaitInvalidationConfirm
//   FinalAssertionSent  -- Invalidated assertion -->   UnlockSubmitted
//   Done                                               Done
//
// Aborted (source) and RolledBack (destination) are the timeout exits. A
// destination whose trust exchange fails returns to Idle and forgets the
// session.
//
// Step() is a pure function of (environment, state, input, context); the
// GatewayNode wrapper owns the session table.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/gateway/messages.h"
#include "dtcb/gateway/quorum.h"
#include "dtcb/gateway/trust.h"
#include "dtcb/ledger/ledger.h"

namespace dtcb::gateway {

using ledger::Tick;

enum class Role { kSource, kDestination };

enum class Phase {
  kIdle,
  kTrustEstablishing,
  // Source only.
  kAwaitRegistration,
  kAwaitRegistrationAssertion,
  kInvalidationSubmitted,
  kAwaitInvalidationConfirm,
  kFinalAssertionSent,
  kAborted,
  // Destination only.
  kRegistrationSubmitted,
  kAwaitLocalConfirm,
  kRegistrationAssertionSent,
  kAwaitInvalidationAssertion,
  kUnlockSubmitted,
  kRolledBack,
  // Both.
  kDone,
};

std::string_view RoleName(Role role);
std::string_view PhaseName(Phase phase);
bool IsTerminal(Phase phase);

using Edge = std::pair<Phase, Phase>;
// The complete set of transitions a session of `role` may take.
const std::set<Edge>& AllowedEdges(Role role);
bool IsAllowedEdge(Role role, Phase from, Phase to);

struct GatewayTimings {
  // Lock and abort grace; the default is ten block intervals of the own chain.
  Tick grace_ticks = 100;
  // How long either side waits for the trust exchange and, on the
  // destination, for the TransferRequest that follows it.
  Tick trust_timeout_ticks = 200;
  Tick retransmit_ticks = 10;
  // Upper bound on one-way message delay. Response deadlines and the
  // destination's lock window cover a full round trip on top of grace.
  Tick max_delay_ticks = 0;
};

struct GatewayEnv {
  GatewayCredentials creds;
  PeeringPolicy policy;
  ledger::ChainParams chain;
  GatewayTimings timings;
  // chain id -> node id of that chain's delegate gateway.
  std::map<std::string, std::string> peer_gateways;
  // chain id -> confirmation latency in ticks.
  std::map<std::string, Tick> confirmation_latency;
  // chain id -> gateways allowed to co-sign that chain's assertions.
  std::map<std::string, std::vector<crypto::PublicKey>> authorized_signers;
};

struct TransferContext {
  crypto::Digest asset;          // private id on the gateway's own chain
  crypto::Digest transfer_tx;    // source: the user's TransferOut
  crypto::Digest txid1;          // public id of the outgoing asset
  crypto::Digest txid2;          // public id of the incoming asset
  crypto::PublicKey dest_owner;
  uint64_t value = 0;
  std::string source_chain;
  std::string dest_chain;
};

struct GatewayState {
  Role role = Role::kSource;
  Phase phase = Phase::kIdle;
  std::string peer;
  crypto::Nonce session_id;

  // Trust exchange.
  crypto::Nonce my_challenge;
  crypto::Nonce peer_challenge;
  Tick challenge_sent_at = 0;
  bool evidence_sent = false;
  std::optional<crypto::PublicKey> peer_key;

  TransferContext ctx;
  // Source: TransferOut outcome once applied.
  std::optional<bool> transfer_applied;
  bool transfer_confirmed = false;
  // Source: an abort happened before the TransferOut applied; unlock once it
  // does.
  bool unlock_owed = false;
  bool request_sent = false;
  // Own Register (destination) or Invalidate (source) is confirmed; the
  // assertion is sent, or retried while the quorum is short.
  bool own_tx_confirmed = false;

  // Abort deadline (source) or lock deadline (destination).
  std::optional<Tick> deadline;
  std::optional<AssertionMessage> last_assertion;
  Tick retransmit_at = 0;
  Tick final_until = 0;
};

struct TransferStart {
  crypto::Digest transfer_tx;
  crypto::Digest asset;
  std::string dest_chain;
  crypto::PublicKey dest_owner;
  uint64_t value = 0;
};

struct MessageInput {
  Envelope envelope;
};

struct BlockInput {
  std::vector<ledger::TxOutcome> applied;
  std::vector<ledger::TxOutcome> confirmed;
};

struct TimerInput {};

using Input = std::variant<TransferStart, MessageInput, BlockInput, TimerInput>;

struct StepContext {
  Tick now = 0;
  std::function<crypto::Nonce()> draw_nonce;
  dice::SvnRecord peer_svns;
  // Gateways of the own chain available for co-signing right now.
  std::vector<QuorumSigner> cosigners;
};

struct Transition {
  GatewayState state;
  std::vector<Edge> path;
  std::vector<Envelope> outbound;
  std::vector<ledger::TxBody> submissions;
  std::vector<std::string> notes;
  std::optional<Tick> wake_at;
  bool trust_established = false;
  // Peer chain whose layer SVNs were just accepted.
  std::optional<dice::PublicChain> accepted_peer_chain;
  // Destination session dropped after a failed trust exchange.
  bool discard = false;
};

// Fresh session state. `session_id` keys the session on both sides.
GatewayState NewSession(Role role, const crypto::Nonce& session_id);

Transition Step(const GatewayEnv& env, const GatewayState& state,
                const Input& input, StepContext& ctx);

// A session is finished when it is terminal and owes no ledger cleanup.
bool IsSettled(const GatewayState& state);

struct SessionStep {
  crypto::Nonce session_id;
  Transition transition;
};

// One gateway node: session table, tombstones of discarded sessions, and the
// highest layer SVNs accepted from each peer.
class GatewayNode {
 public:
  explicit GatewayNode(GatewayEnv env) : env_(std::move(env)) {}

  const GatewayEnv& env() const { return env_; }
  GatewayEnv& mutable_env() { return env_; }
  const std::string& node_id() const { return env_.creds.node_id; }

  std::vector<SessionStep> Handle(const Input& input, StepContext& ctx);
  // Timer for one session.
  std::vector<SessionStep> Wake(const crypto::Nonce& session_id,
                                StepContext& ctx);

  const std::map<crypto::Nonce, GatewayState>& sessions() const {
    return sessions_;
  }
  const dice::SvnRecord& peer_svns(const std::string& peer) const;
  bool Settled() const;

  // Notes for inputs that matched no session.
  std::vector<std::string> TakeNotes() { return std::exchange(notes_, {}); }

 private:
  SessionStep Apply(const crypto::Nonce& session_id, const GatewayState& state,
                    const Input& input, StepContext& ctx);

  GatewayEnv env_;
  std::map<crypto::Nonce, GatewayState> sessions_;
  std::set<crypto::Nonce> tombstones_;
  std::map<std::string, dice::SvnRecord> peer_svns_;
  std::vector<std::string> notes_;
};

}  // namespace dtcb::gateway

#endif  // DTCB_GATEWAY_STATE_MACHINE_H_
