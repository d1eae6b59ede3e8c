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

#include "dtcb/gateway/state_machine.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "dtcb/verdict.h"

namespace dtcb::gateway {
namespace {

using ledger::TxOutcome;

std::string Str(std::string_view v) { return std::string(v); }

// Accumulates a Transition; Go() records every phase change.
class Builder {
 public:
  Builder(const GatewayEnv& env, const GatewayState& state, StepContext& ctx)
      : env_(env), ctx_(ctx) {
    t_.state = state;
  }

  GatewayState& s() { return t_.state; }
  Transition& t() { return t_; }
  const GatewayEnv& env() const { return env_; }
  StepContext& ctx() { return ctx_; }
  Tick now() const { return ctx_.now; }

  void Go(Phase to) {
    t_.path.emplace_back(t_.state.phase, to);
    t_.state.phase = to;
  }
  void Send(Message m) {
    t_.outbound.push_back(
        Envelope{env_.creds.node_id, t_.state.peer, std::move(m)});
  }
  void Submit(ledger::TxBody body) { t_.submissions.push_back(std::move(body)); }
  void Note(std::string note) { t_.notes.push_back(std::move(note)); }
  void Unexpected(const Message& m) {
    Note(absl::StrCat("unexpected message: ", Str(KindName(KindOf(m))), " in ",
                      Str(PhaseName(t_.state.phase))));
  }

 private:
  const GatewayEnv& env_;
  StepContext& ctx_;
  Transition t_;
};

Tick LatencyOf(const GatewayEnv& env, const std::string& chain) {
  auto it = env.confirmation_latency.find(chain);
  return it == env.confirmation_latency.end() ? 0 : it->second;
}

const std::vector<crypto::PublicKey>& AuthorizedFor(const GatewayEnv& env,
                                                    const std::string& chain) {
  static const std::vector<crypto::PublicKey> kNone;
  auto it = env.authorized_signers.find(chain);
  return it == env.authorized_signers.end() ? kNone : it->second;
}

bool Matches(const TxOutcome& o, const crypto::Digest& asset) {
  return o.tx.AssetId() == asset;
}

template <typename Kind>
bool Is(const TxOutcome& o) {
  return std::holds_alternative<Kind>(o.tx.body);
}

std::optional<AssertionMessage> BuildAssertion(Builder& b, AssertionKind kind) {
  const GatewayState& s = b.s();
  auto key = b.env().creds.signing_key();
  if (!key.has_value()) {
    b.Note("assertion: no signing key");
    return std::nullopt;
  }
  AssertionMessage m;
  m.assertion.kind = kind;
  m.assertion.txid1_public = s.ctx.txid1;
  m.assertion.txid2_public = s.ctx.txid2;
  m.assertion.session_nonce = s.session_id;
  m.assertion.SignWith(*key);
  if (b.env().policy.IsSensitive(s.ctx.value)) {
    auto sigs = QuorumApprove(b.ctx().cosigners, m.assertion.SignedPayload(),
                              b.env().policy,
                              AuthorizedFor(b.env(), b.env().chain.chain_id));
    if (!sigs.ok()) {
      b.Note(absl::StrCat("quorum: ", std::string(sigs.status().message())));
      return std::nullopt;
    }
    m.cosignatures = std::move(*sigs);
  }
  return m;
}

Verdict CheckAssertion(const GatewayEnv& env, const GatewayState& s,
                       const AssertionMessage& m, AssertionKind kind) {
  const SignedAssertion& a = m.assertion;
  if (a.kind != kind) return Verdict::Reject("wrong assertion kind");
  if (!s.peer_key.has_value() || a.asserter != *s.peer_key) {
    return Verdict::Reject("unexpected asserter");
  }
  if (!a.SignatureValid()) return Verdict::Reject("bad signature");
  if (a.session_nonce != s.session_id) {
    return Verdict::Reject("session mismatch");
  }
  if (a.txid1_public != s.ctx.txid1) return Verdict::Reject("txid1 mismatch");
  if (kind == AssertionKind::kInvalidated &&
      a.txid2_public != s.ctx.txid2) {
    return Verdict::Reject("txid2 mismatch");
  }
  if (env.policy.IsSensitive(s.ctx.value)) {
    const std::string& peer_chain =
        s.role == Role::kSource ? s.ctx.dest_chain : s.ctx.source_chain;
    if (!VerifyQuorum(a.SignedPayload(), m.cosignatures,
                      AuthorizedFor(env, peer_chain), env.policy.quorum_m)) {
      return Verdict::Reject("quorum not met");
    }
  }
  return Verdict::Accept();
}

// ---------------------------------------------------------------------------
// Source

void SourceAbort(Builder& b, const std::string& reason, bool tell_peer) {
  GatewayState& s = b.s();
  b.Note(absl::StrCat("abort: ", reason));
  if (tell_peer && !s.peer.empty()) {
    b.Send(ErrorMessage{s.session_id, reason});
  }
  if (s.transfer_applied == true) {
    b.Submit(ledger::Unlock{s.ctx.asset});
  } else if (!s.transfer_applied.has_value()) {
    s.unlock_owed = true;
  }
  s.deadline.reset();
  b.Go(Phase::kAborted);
}

void SendTransferRequest(Builder& b) {
  GatewayState& s = b.s();
  TransferRequest r;
  r.session_id = s.session_id;
  r.txid1_public = s.ctx.txid1;
  r.dest_owner = s.ctx.dest_owner;
  r.value = s.ctx.value;
  r.source_chain = s.ctx.source_chain;
  r.dest_chain = s.ctx.dest_chain;
  b.Send(std::move(r));
  s.request_sent = true;
  s.deadline = b.now() + 2 * b.env().timings.max_delay_ticks +
               LatencyOf(b.env(), s.ctx.dest_chain) +
               b.env().timings.grace_ticks;
  b.Go(Phase::kAwaitRegistrationAssertion);
}

void SourceSendFinal(Builder& b) {
  GatewayState& s = b.s();
  auto m = BuildAssertion(b, AssertionKind::kInvalidated);
  if (!m.has_value()) {
    s.retransmit_at = b.now() + b.env().timings.retransmit_ticks;
    return;
  }
  b.Send(*m);
  s.last_assertion = std::move(m);
  s.retransmit_at = b.now() + b.env().timings.retransmit_ticks;
  s.final_until = b.now() + b.env().timings.grace_ticks;
  b.Go(Phase::kFinalAssertionSent);
}

void SourceStart(Builder& b, const TransferStart& in) {
  GatewayState& s = b.s();
  if (s.phase != Phase::kIdle) {
    b.Note("transfer already started");
    return;
  }
  s.ctx.asset = in.asset;
  s.ctx.transfer_tx = in.transfer_tx;
  s.ctx.dest_owner = in.dest_owner;
  s.ctx.value = in.value;
  s.ctx.source_chain = b.env().chain.chain_id;
  s.ctx.dest_chain = in.dest_chain;
  s.ctx.txid1 = MaskTxId(in.asset, s.ctx.source_chain, b.ctx().draw_nonce());
  s.my_challenge = b.ctx().draw_nonce();
  s.challenge_sent_at = b.now();
  b.Go(Phase::kTrustEstablishing);

  auto peer = b.env().peer_gateways.find(in.dest_chain);
  if (peer == b.env().peer_gateways.end()) {
    SourceAbort(b, absl::StrCat("no gateway for chain ", in.dest_chain),
                false);
    return;
  }
  s.peer = peer->second;
  b.Send(MakeChallenge(b.env().creds, s.session_id, s.my_challenge,
                       s.my_challenge));
  s.deadline = b.now() + b.env().timings.trust_timeout_ticks;
}

void SourceMessage(Builder& b, const Envelope& env) {
  GatewayState& s = b.s();
  const Message& m = env.message;
  if (env.from != s.peer) {
    b.Note(absl::StrCat("unexpected message: sender ", env.from));
    return;
  }
  if (const auto* e = std::get_if<ErrorMessage>(&m)) {
    if (s.phase == Phase::kTrustEstablishing ||
        s.phase == Phase::kAwaitRegistration ||
        s.phase == Phase::kAwaitRegistrationAssertion) {
      SourceAbort(b, absl::StrCat("peer error: ", e->reason), false);
    } else {
      b.Unexpected(m);
    }
    return;
  }
  if (const auto* c = std::get_if<TrustChallenge>(&m)) {
    if (s.phase != Phase::kTrustEstablishing || s.evidence_sent) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v = CheckChallenge(*c, b.env().policy, s.my_challenge); !v) {
      SourceAbort(b, absl::StrCat("trust: ", v.reason()), true);
      return;
    }
    s.peer_challenge = c->challenge;
    auto ev = MakeEvidence(b.env().creds, s.session_id, c->challenge);
    if (!ev.ok()) {
      SourceAbort(b, absl::StrCat("trust: ", std::string(ev.status().message())), true);
      return;
    }
    b.Send(std::move(*ev));
    s.evidence_sent = true;
    return;
  }
  if (const auto* ev = std::get_if<TrustEvidence>(&m)) {
    if (s.phase != Phase::kTrustEstablishing || !s.evidence_sent ||
        s.peer_key.has_value()) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v = CheckEvidence(*ev, s.my_challenge, b.env().policy,
                                  b.now() - s.challenge_sent_at,
                                  b.ctx().peer_svns);
        !v) {
      SourceAbort(b, absl::StrCat("trust: ", v.reason()), true);
      return;
    }
    s.peer_key = ev->chain.top_key();
    b.t().trust_established = true;
    b.t().accepted_peer_chain = ev->chain;
    if (s.transfer_applied == false) {
      SourceAbort(b, "transfer rejected by ledger", true);
    } else if (s.transfer_confirmed) {
      SendTransferRequest(b);
    } else {
      s.deadline.reset();
      b.Go(Phase::kAwaitRegistration);
    }
    return;
  }
  if (const auto* a = std::get_if<AssertionMessage>(&m)) {
    if (s.phase != Phase::kAwaitRegistrationAssertion) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v =
            CheckAssertion(b.env(), s, *a, AssertionKind::kRegistered);
        !v) {
      b.Note(absl::StrCat("assertion rejected: ", v.reason()));
      return;
    }
    s.ctx.txid2 = a->assertion.txid2_public;
    b.Submit(ledger::Invalidate{s.ctx.asset, s.ctx.txid1, s.ctx.txid2,
                                s.ctx.dest_chain});
    s.deadline.reset();
    b.Go(Phase::kInvalidationSubmitted);
    return;
  }
  b.Unexpected(m);
}

void SourceBlock(Builder& b, const BlockInput& in) {
  GatewayState& s = b.s();
  for (const TxOutcome& o : in.applied) {
    if (o.tx_id == s.ctx.transfer_tx) {
      s.transfer_applied = o.ok;
      if (o.ok && s.unlock_owed) {
        b.Submit(ledger::Unlock{s.ctx.asset});
        s.unlock_owed = false;
      }
      if (!o.ok && !IsTerminal(s.phase) &&
          s.phase != Phase::kTrustEstablishing) {
        SourceAbort(b, absl::StrCat("transfer rejected: ", o.failure), true);
      }
    } else if (Is<ledger::Invalidate>(o) && Matches(o, s.ctx.asset) &&
               s.phase == Phase::kInvalidationSubmitted) {
      if (o.ok) {
        b.Go(Phase::kAwaitInvalidationConfirm);
      } else {
        SourceAbort(b, absl::StrCat("invalidate failed: ", o.failure), true);
      }
    }
  }
  for (const TxOutcome& o : in.confirmed) {
    if (!o.ok) continue;
    if (o.tx_id == s.ctx.transfer_tx) {
      s.transfer_confirmed = true;
      if (s.phase == Phase::kAwaitRegistration) SendTransferRequest(b);
    } else if (Is<ledger::Invalidate>(o) && Matches(o, s.ctx.asset) &&
               s.phase == Phase::kAwaitInvalidationConfirm &&
               !s.own_tx_confirmed) {
      s.own_tx_confirmed = true;
      SourceSendFinal(b);
    }
  }
}

void SourceTimer(Builder& b) {
  GatewayState& s = b.s();
  const Tick now = b.now();
  switch (s.phase) {
    case Phase::kTrustEstablishing:
      if (s.deadline && now >= *s.deadline) {
        SourceAbort(b, "trust timeout", true);
      }
      break;
    case Phase::kAwaitRegistrationAssertion:
      if (s.deadline && now >= *s.deadline) {
        SourceAbort(b, "registration deadline expired", true);
      }
      break;
    case Phase::kAwaitInvalidationConfirm:
      if (s.own_tx_confirmed && now >= s.retransmit_at) SourceSendFinal(b);
      break;
    case Phase::kFinalAssertionSent:
      if (now >= s.final_until) {
        b.Go(Phase::kDone);
      } else if (now >= s.retransmit_at && s.last_assertion) {
        b.Send(*s.last_assertion);
        s.retransmit_at = now + b.env().timings.retransmit_ticks;
      }
      break;
    default:
      break;
  }
}

// ---------------------------------------------------------------------------
// Destination

void DestinationDrop(Builder& b, const std::string& reason, bool tell_peer) {
  b.Note(absl::StrCat("session dropped: ", reason));
  if (tell_peer) b.Send(ErrorMessage{b.s().session_id, reason});
  if (b.s().phase != Phase::kIdle) b.Go(Phase::kIdle);
  b.t().discard = true;
}

void DestinationRollBack(Builder& b, const std::string& reason) {
  GatewayState& s = b.s();
  b.Note(absl::StrCat("roll back: ", reason));
  b.Submit(ledger::Rollback{s.ctx.asset});
  b.Send(ErrorMessage{s.session_id, reason});
  b.Go(Phase::kRolledBack);
}

void DestinationSendRegistered(Builder& b) {
  GatewayState& s = b.s();
  auto m = BuildAssertion(b, AssertionKind::kRegistered);
  s.retransmit_at = b.now() + b.env().timings.retransmit_ticks;
  if (!m.has_value()) return;
  b.Send(*m);
  s.last_assertion = std::move(m);
  b.Go(Phase::kRegistrationAssertionSent);
}

Verdict CheckRequest(const GatewayEnv& env, const GatewayState& s,
                     const TransferRequest& r) {
  if (r.dest_chain != env.chain.chain_id) {
    return Verdict::Reject("request: wrong destination chain");
  }
  auto it = env.peer_gateways.find(r.source_chain);
  if (it == env.peer_gateways.end() || it->second != s.peer) {
    return Verdict::Reject("request: sender is not the source chain's gateway");
  }
  if (r.source_chain == r.dest_chain) {
    return Verdict::Reject("request: source and destination coincide");
  }
  return Verdict::Accept();
}

void DestinationMessage(Builder& b, const Envelope& env) {
  GatewayState& s = b.s();
  const Message& m = env.message;
  if (s.phase == Phase::kIdle) {
    const auto* c = std::get_if<TrustChallenge>(&m);
    if (c == nullptr) {
      b.Unexpected(m);
      return;
    }
    s.peer = env.from;
    if (Verdict v = CheckChallenge(*c, b.env().policy, c->challenge); !v) {
      DestinationDrop(b, absl::StrCat("trust: ", v.reason()), true);
      return;
    }
    s.peer_challenge = c->challenge;
    s.my_challenge = b.ctx().draw_nonce();
    s.challenge_sent_at = b.now();
    b.Send(MakeChallenge(b.env().creds, s.session_id, s.my_challenge,
                         c->challenge));
    s.deadline = b.now() + b.env().timings.trust_timeout_ticks;
    b.Go(Phase::kTrustEstablishing);
    return;
  }
  if (env.from != s.peer) {
    b.Note(absl::StrCat("unexpected message: sender ", env.from));
    return;
  }
  if (const auto* e = std::get_if<ErrorMessage>(&m)) {
    if (s.phase == Phase::kTrustEstablishing) {
      DestinationDrop(b, absl::StrCat("peer error: ", e->reason), false);
    } else {
      b.Note(absl::StrCat("peer error ignored: ", e->reason));
    }
    return;
  }
  if (const auto* ev = std::get_if<TrustEvidence>(&m)) {
    if (s.phase != Phase::kTrustEstablishing || s.peer_key.has_value()) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v = CheckEvidence(*ev, s.my_challenge, b.env().policy,
                                  b.now() - s.challenge_sent_at,
                                  b.ctx().peer_svns);
        !v) {
      DestinationDrop(b, absl::StrCat("trust: ", v.reason()), true);
      return;
    }
    auto mine = MakeEvidence(b.env().creds, s.session_id, s.peer_challenge);
    if (!mine.ok()) {
      DestinationDrop(b, absl::StrCat("trust: ", std::string(mine.status().message())),
                      true);
      return;
    }
    s.peer_key = ev->chain.top_key();
    b.Send(std::move(*mine));
    s.evidence_sent = true;
    s.deadline = b.now() + b.env().timings.trust_timeout_ticks;
    b.t().trust_established = true;
    b.t().accepted_peer_chain = ev->chain;
    return;
  }
  if (const auto* r = std::get_if<TransferRequest>(&m)) {
    if (s.phase != Phase::kTrustEstablishing || !s.peer_key.has_value()) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v = CheckRequest(b.env(), s, *r); !v) {
      DestinationDrop(b, v.reason(), true);
      return;
    }
    s.ctx.txid1 = r->txid1_public;
    s.ctx.dest_owner = r->dest_owner;
    s.ctx.value = r->value;
    s.ctx.source_chain = r->source_chain;
    s.ctx.dest_chain = r->dest_chain;
    crypto::Nonce fresh = b.ctx().draw_nonce();
    s.ctx.asset = crypto::Digest(fresh.array());
    s.ctx.txid2 = MaskTxId(s.ctx.asset, s.ctx.dest_chain, b.ctx().draw_nonce());
    ledger::Register reg;
    reg.private_id = s.ctx.asset;
    reg.masked_id = s.ctx.txid2;
    reg.owner = r->dest_owner;
    reg.value = r->value;
    reg.lock_holder = b.env().creds.node_id;
    reg.grace_ticks = 2 * b.env().timings.max_delay_ticks +
                      LatencyOf(b.env(), r->source_chain) +
                      b.env().timings.grace_ticks;
    reg.origin = ledger::Origin{r->source_chain, r->txid1_public};
    b.Submit(std::move(reg));
    s.deadline.reset();
    b.Go(Phase::kRegistrationSubmitted);
    return;
  }
  if (const auto* a = std::get_if<AssertionMessage>(&m)) {
    if (s.phase != Phase::kRegistrationAssertionSent &&
        s.phase != Phase::kAwaitInvalidationAssertion) {
      b.Unexpected(m);
      return;
    }
    if (Verdict v =
            CheckAssertion(b.env(), s, *a, AssertionKind::kInvalidated);
        !v) {
      b.Note(absl::StrCat("assertion rejected: ", v.reason()));
      return;
    }
    b.Submit(ledger::Unlock{s.ctx.asset});
    b.Go(Phase::kUnlockSubmitted);
    return;
  }
  b.Unexpected(m);
}

void DestinationBlock(Builder& b, const BlockInput& in) {
  GatewayState& s = b.s();
  for (const TxOutcome& o : in.applied) {
    if (!Matches(o, s.ctx.asset)) continue;
    if (Is<ledger::Register>(o) && s.phase == Phase::kRegistrationSubmitted) {
      if (o.ok) {
        s.deadline = o.lock_deadline;
        b.Go(Phase::kAwaitLocalConfirm);
      } else {
        b.Note(absl::StrCat("register failed: ", o.failure));
        b.Send(ErrorMessage{s.session_id, "register failed"});
        b.Go(Phase::kRolledBack);
      }
    } else if (Is<ledger::Unlock>(o) && s.phase == Phase::kUnlockSubmitted) {
      if (o.ok) {
        b.Go(Phase::kDone);
      } else {
        b.Note(absl::StrCat("unlock failed: ", o.failure));
      }
    }
  }
  for (const TxOutcome& o : in.confirmed) {
    if (o.ok && Is<ledger::Register>(o) && Matches(o, s.ctx.asset) &&
        s.phase == Phase::kAwaitLocalConfirm && !s.own_tx_confirmed) {
      s.own_tx_confirmed = true;
      DestinationSendRegistered(b);
    }
  }
}

void DestinationTimer(Builder& b) {
  GatewayState& s = b.s();
  const Tick now = b.now();
  const bool expired = s.deadline.has_value() && now >= *s.deadline;
  switch (s.phase) {
    case Phase::kTrustEstablishing:
      if (expired) DestinationDrop(b, "trust timeout", true);
      break;
    case Phase::kAwaitLocalConfirm:
      if (expired) {
        DestinationRollBack(b, "lock deadline expired");
      } else if (s.own_tx_confirmed && now >= s.retransmit_at) {
        DestinationSendRegistered(b);
      }
      break;
    case Phase::kRegistrationAssertionSent:
    case Phase::kAwaitInvalidationAssertion:
      if (expired) {
        DestinationRollBack(b, "lock deadline expired");
      } else if (now >= s.retransmit_at && s.last_assertion) {
        b.Send(*s.last_assertion);
        s.retransmit_at = now + b.env().timings.retransmit_ticks;
        if (s.phase == Phase::kRegistrationAssertionSent) {
          b.Go(Phase::kAwaitInvalidationAssertion);
        }
      }
      break;
    default:
      break;
  }
}

std::optional<Tick> NextWake(const GatewayState& s, Tick now) {
  if (IsTerminal(s.phase) || s.phase == Phase::kIdle) return std::nullopt;
  std::optional<Tick> best;
  auto consider = [&](Tick t) {
    if (t > now && (!best || t < *best)) best = t;
  };
  if (s.deadline) consider(*s.deadline);
  const bool retransmitting =
      s.last_assertion.has_value() ||
      (s.own_tx_confirmed && (s.phase == Phase::kAwaitInvalidationConfirm ||
                              s.phase == Phase::kAwaitLocalConfirm));
  if (retransmitting) consider(s.retransmit_at);
  if (s.phase == Phase::kFinalAssertionSent) consider(s.final_until);
  return best;
}

}  // namespace

std::string_view RoleName(Role role) {
  return role == Role::kSource ? "Source" : "Destination";
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kIdle:
      return "Idle";
    case Phase::kTrustEstablishing:
      return "TrustEstablishing";
    case Phase::kAwaitRegistration:
      return "AwaitRegistration";
    case Phase::kAwaitRegistrationAssertion:
      return "AwaitRegistrationAssertion";
    case Phase::kInvalidationSubmitted:
      return "InvalidationSubmitted";
    case Phase::kAwaitInvalidationConfirm:
      return "AwaitInvalidationConfirm";
    case Phase::kFinalAssertionSent:
      return "FinalAssertionSent";
    case Phase::kAborted:
      return "Aborted";
    case Phase::kRegistrationSubmitted:
      return "RegistrationSubmitted";
    case Phase::kAwaitLocalConfirm:
      return "AwaitLocalConfirm";
    case Phase::kRegistrationAssertionSent:
      return "RegistrationAssertionSent";
    case Phase::kAwaitInvalidationAssertion:
      return "AwaitInvalidationAssertion";
    case Phase::kUnlockSubmitted:
      return "UnlockSubmitted";
    case Phase::kRolledBack:
      return "RolledBack";
    case Phase::kDone:
      return "Done";
  }
  return "Unknown";
}

bool IsTerminal(Phase phase) {
  return phase == Phase::kDone || phase == Phase::kAborted ||
         phase == Phase::kRolledBack;
}

const std::set<Edge>& AllowedEdges(Role role) {
  using P = Phase;
  static const std::set<Edge> kSource = {
      {P::kIdle, P::kTrustEstablishing},
      {P::kTrustEstablishing, P::kAwaitRegistration},
      {P::kTrustEstablishing, P::kAwaitRegistrationAssertion},
      {P::kTrustEstablishing, P::kAborted},
      {P::kAwaitRegistration, P::kAwaitRegistrationAssertion},
      {P::kAwaitRegistration, P::kAborted},
      {P::kAwaitRegistrationAssertion, P::kInvalidationSubmitted},
      {P::kAwaitRegistrationAssertion, P::kAborted},
      {P::kInvalidationSubmitted, P::kAwaitInvalidationConfirm},
      {P::kInvalidationSubmitted, P::kAborted},
      {P::kAwaitInvalidationConfirm, P::kFinalAssertionSent},
      {P::kFinalAssertionSent, P::kDone},
  };
  static const std::set<Edge> kDestination = {
      {P::kIdle, P::kTrustEstablishing},
      {P::kTrustEstablishing, P::kIdle},
      {P::kTrustEstablishing, P::kRegistrationSubmitted},
      {P::kRegistrationSubmitted, P::kAwaitLocalConfirm},
      {P::kRegistrationSubmitted, P::kRolledBack},
      {P::kAwaitLocalConfirm, P::kRegistrationAssertionSent},
      {P::kAwaitLocalConfirm, P::kRolledBack},
      {P::kRegistrationAssertionSent, P::kAwaitInvalidationAssertion},
      {P::kRegistrationAssertionSent, P::kUnlockSubmitted},
      {P::kRegistrationAssertionSent, P::kRolledBack},
      {P::kAwaitInvalidationAssertion, P::kUnlockSubmitted},
      {P::kAwaitInvalidationAssertion, P::kRolledBack},
      {P::kUnlockSubmitted, P::kDone},
  };
  return role == Role::kSource ? kSource : kDestination;
}

bool IsAllowedEdge(Role role, Phase from, Phase to) {
  return AllowedEdges(role).contains({from, to});
}

GatewayState NewSession(Role role, const crypto::Nonce& session_id) {
  GatewayState s;
  s.role = role;
  s.session_id = session_id;
  return s;
}

Transition Step(const GatewayEnv& env, const GatewayState& state,
                const Input& input, StepContext& ctx) {
  Builder b(env, state, ctx);
  const bool source = state.role == Role::kSource;
  if (const auto* start = std::get_if<TransferStart>(&input)) {
    if (source) {
      SourceStart(b, *start);
    } else {
      b.Note("destination cannot start a transfer");
    }
  } else if (const auto* msg = std::get_if<MessageInput>(&input)) {
    if (IsTerminal(state.phase)) {
      b.Unexpected(msg->envelope.message);
    } else if (source) {
      SourceMessage(b, msg->envelope);
    } else {
      DestinationMessage(b, msg->envelope);
    }
  } else if (const auto* block = std::get_if<BlockInput>(&input)) {
    if (source) {
      SourceBlock(b, *block);
    } else if (!IsTerminal(state.phase)) {
      DestinationBlock(b, *block);
    }
  } else if (!IsTerminal(state.phase)) {
    if (source) {
      SourceTimer(b);
    } else {
      DestinationTimer(b);
    }
  }
  b.t().wake_at = NextWake(b.s(), ctx.now);
  return std::move(b.t());
}

bool IsSettled(const GatewayState& state) {
  return IsTerminal(state.phase) && !state.unlock_owed;
}

// ---------------------------------------------------------------------------
// GatewayNode

const dice::SvnRecord& GatewayNode::peer_svns(const std::string& peer) const {
  static const dice::SvnRecord kEmpty;
  auto it = peer_svns_.find(peer);
  return it == peer_svns_.end() ? kEmpty : it->second;
}

bool GatewayNode::Settled() const {
  return std::all_of(sessions_.begin(), sessions_.end(),
                     [](const auto& kv) { return IsSettled(kv.second); });
}

SessionStep GatewayNode::Apply(const crypto::Nonce& session_id,
                               const GatewayState& state, const Input& input,
                               StepContext& ctx) {
  std::string peer = state.peer;
  if (const auto* msg = std::get_if<MessageInput>(&input); peer.empty() && msg) {
    peer = msg->envelope.from;
  }
  ctx.peer_svns = peer_svns(peer);
  Transition t = Step(env_, state, input, ctx);
  if (t.accepted_peer_chain.has_value()) {
    dice::SvnRecord& record = peer_svns_[t.state.peer];
    for (const auto& m : t.accepted_peer_chain->measurements) {
      dice::CheckSvn(record, m);
    }
  }
  if (t.discard) {
    sessions_.erase(session_id);
    tombstones_.insert(session_id);
  } else {
    sessions_[session_id] = t.state;
  }
  return SessionStep{session_id, std::move(t)};
}

std::vector<SessionStep> GatewayNode::Handle(const Input& input,
                                             StepContext& ctx) {
  std::vector<SessionStep> out;
  if (std::holds_alternative<TransferStart>(input)) {
    crypto::Nonce sid = ctx.draw_nonce();
    out.push_back(Apply(sid, NewSession(Role::kSource, sid), input, ctx));
  } else if (const auto* msg = std::get_if<MessageInput>(&input)) {
    const Envelope& e = msg->envelope;
    if (e.to != node_id()) {
      notes_.push_back(absl::StrCat("misaddressed message for ", e.to));
      return out;
    }
    const crypto::Nonce& sid = SessionOf(e.message);
    if (auto it = sessions_.find(sid); it != sessions_.end()) {
      GatewayState state = it->second;
      out.push_back(Apply(sid, state, input, ctx));
    } else if (tombstones_.contains(sid)) {
      notes_.push_back(absl::StrCat("unexpected message: ",
                                    Str(KindName(KindOf(e.message))),
                                    " for a closed session"));
    } else if (std::holds_alternative<TrustChallenge>(e.message)) {
      out.push_back(
          Apply(sid, NewSession(Role::kDestination, sid), input, ctx));
    } else {
      notes_.push_back(absl::StrCat("unexpected message: ",
                                    Str(KindName(KindOf(e.message))),
                                    " for an unknown session"));
    }
  } else if (std::holds_alternative<BlockInput>(input)) {
    std::vector<crypto::Nonce> live;
    for (const auto& [sid, state] : sessions_) {
      if (!IsSettled(state)) live.push_back(sid);
    }
    for (const auto& sid : live) {
      GatewayState state = sessions_.at(sid);
      out.push_back(Apply(sid, state, input, ctx));
    }
  }
  return out;
}

std::vector<SessionStep> GatewayNode::Wake(const crypto::Nonce& session_id,
                                           StepContext& ctx) {
  std::vector<SessionStep> out;
  auto it = sessions_.find(session_id);
  if (it == sessions_.end() || IsSettled(it->second)) return out;
  GatewayState state = it->second;
  out.push_back(Apply(session_id, state, TimerInput{}, ctx));
  return out;
}

}  // namespace dtcb::gateway
