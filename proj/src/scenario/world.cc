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

#include "dtcb/scenario/world.h"

#include <algorithm>
#include <atomic>
#include <thread>

#include "absl/strings/str_cat.h"
#include "dtcb/attestation/manifest.h"
#include "dtcb/attestation/registers.h"
#include "json.hpp"

namespace dtcb::scenario {
namespace {

using gateway::Phase;
using gateway::Role;
using ledger::AssetRecord;
using ledger::LedgerTx;

constexpr char kExclusivity[] = "exclusivity";
constexpr char kNoLoss[] = "no_loss";
constexpr char kRedirect[] = "redirect";
constexpr char kTrustGate[] = "trust_gate";
constexpr char kPhaseAudit[] = "phase_audit";
constexpr char kConfinement[] = "private_id_confinement";
constexpr char kLedgerTransitions[] = "ledger_transitions";

std::string Short(const crypto::Digest& d) { return d.hex().substr(0, 8); }

std::string Str(std::string_view v) { return std::string(v); }
std::string Str(absl::string_view v) { return std::string(v); }

bool AllowedLedgerTransition(const std::string& from, const std::string& to) {
  static const std::set<std::pair<std::string, std::string>> kAllowed = {
      {"Absent", "Active"},      {"Active", "Locked"},
      {"Absent", "Locked"},      {"Locked", "Active"},
      {"Locked", "Invalidated"}, {"Active", "Invalidated"},
      {"Locked", "Absent"},
  };
  return kAllowed.contains({from, to});
}

}  // namespace

// ---------------------------------------------------------------------------
// RunReport

bool RunReport::Passed() const {
  return script_failures.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(),
                     [](const InvariantVerdict& v) { return v.pass; });
}

const InvariantVerdict* RunReport::Verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::string RunReport::ToJson() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["final_tick"] = final_tick;
  j["quiescent"] = quiescent;
  j["passed"] = Passed();
  j["chains"] = nlohmann::ordered_json::array();
  for (const auto& c : chains) {
    nlohmann::ordered_json cj;
    cj["chain_id"] = c.chain_id;
    cj["height"] = c.height;
    cj["assets"] = nlohmann::ordered_json::array();
    for (const auto& a : c.assets) {
      nlohmann::ordered_json aj;
      aj["label"] = a.label;
      aj["state"] = a.state;
      aj["owner"] = a.owner;
      aj["value"] = a.value;
      if (!a.public_id.empty()) aj["public_id"] = a.public_id;
      if (!a.redirect_chain.empty()) {
        aj["redirect"] = {{"chain", a.redirect_chain}, {"id", a.redirect_id}};
      }
      cj["assets"].push_back(std::move(aj));
    }
    j["chains"].push_back(std::move(cj));
  }
  j["transfers"] = nlohmann::ordered_json::array();
  for (const auto& t : transfers) {
    j["transfers"].push_back({{"source", t.source_node},
                              {"destination", t.dest_node},
                              {"source_phase", t.source_phase},
                              {"destination_phase", t.dest_phase},
                              {"txid1", t.txid1},
                              {"txid2", t.txid2}});
  }
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json vj;
    vj["name"] = v.name;
    vj["pass"] = v.pass;
    if (v.first_violation) vj["first_violation_tick"] = *v.first_violation;
    if (!v.detail.empty()) vj["detail"] = v.detail;
    j["verdicts"].push_back(std::move(vj));
  }
  j["hazards"] = hazards;
  j["script_failures"] = script_failures;
  j["counters"] = counters;
  j["event_log_digest"] = log_digest;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Construction

World::World(const ScenarioConfig& config)
    : config_(config), rng_(config.seed) {}

absl::StatusOr<std::unique_ptr<World>> World::Build(
    const ScenarioConfig& config) {
  if (auto s = ValidateConfig(config); !s.ok()) return s;
  std::unique_ptr<World> w(new World(config));
  World& world = *w;

  for (const auto& u : config.users) {
    world.users_[u.name] = crypto::KeypairFromSeed(u.seed);
  }
  const crypto::KeyPair authority =
      crypto::KeypairFromSeed(world.rng_.Fill<crypto::Seed>());

  Tick max_delay = config.default_link.delay_max;
  for (const auto& l : config.links) {
    max_delay = std::max(max_delay, l.params.delay_max);
  }
  Tick max_latency = 0;
  std::map<std::string, Tick> latency;
  std::map<std::string, std::string> delegates;
  for (const auto& c : config.chains) {
    latency[c.chain_id] = c.confirmation_depth * c.block_interval;
    max_latency = std::max(max_latency, latency[c.chain_id] + c.block_interval);
    if (!c.delegate.empty()) delegates[c.chain_id] = c.delegate;
  }

  for (const auto& c : config.chains) {
    const Tick grace = config.policy.grace_blocks * c.block_interval;
    ledger::ChainParams params;
    params.chain_id = c.chain_id;
    params.block_interval = c.block_interval;
    params.confirmation_depth = c.confirmation_depth;
    params.gateway_id = c.delegate;
    params.outbound_lock_ticks = 4 * max_delay + max_latency + 2 * grace;
    auto ledger = std::make_unique<ledger::Ledger>(params);
    for (const auto& a : c.assets) {
      crypto::Digest id = world.rng_.Fill<crypto::Digest>();
      if (auto s = ledger->AddGenesisAsset(id, world.users_.at(a.owner).public_key,
                                           a.value, 0);
          !s.ok()) {
        return s;
      }
      world.asset_ids_[{c.chain_id, a.label}] = id;
      world.labels_[id] = a.label;
    }
    world.ledgers_[c.chain_id] = std::move(ledger);
  }

  attestation::DtcbPolicy dtcb;
  dtcb.required_components = config.policy.required_components;
  dtcb.max_quote_age_ticks = config.policy.max_quote_age_ticks;
  dtcb.group_authority_key = authority.public_key;
  gateway::PeeringPolicy policy;
  policy.dtcb = dtcb;
  policy.group_id = config.group;
  policy.quorum_m = config.policy.quorum_m;
  policy.quorum_n = config.policy.quorum_n;
  policy.sensitive_threshold = config.policy.sensitive_threshold;
  if (auto s = policy.Validate(); !s.ok()) return s;

  std::map<std::string, gateway::GatewayCredentials> creds;
  std::map<std::string, std::vector<crypto::PublicKey>> authorized;
  for (const auto& n : config.nodes) {
    auto identity = dice::BuildChain(n.uds, n.layers);
    if (!identity.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "node ", n.node_id, ": ", Str(identity.status().message())));
    }
    gateway::GatewayCredentials cred;
    cred.node_id = n.node_id;
    cred.caps = n.caps;
    for (const auto& m : n.layers) {
      if (auto s = cred.registers.Extend(m.layer_index, m.code_digest);
          !s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("node ", n.node_id, ": ", Str(s.message())));
      }
    }
    if (!n.components.empty()) {
      auto manifest = attestation::CreateManifest(*identity, n.components);
      if (!manifest.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "node ", n.node_id, ": ", Str(manifest.status().message())));
      }
      cred.manifest = std::move(*manifest);
    }
    if (n.member) {
      crypto::KeyPair pseudonym =
          crypto::KeypairFromSeed(world.rng_.Fill<crypto::Seed>());
      auto membership = attestation::IssueMembership(
          authority, pseudonym.public_key, config.group,
          identity->device_id().public_key);
      if (!membership.ok()) return membership.status();
      cred.membership = std::move(*membership);
      cred.pseudonym = pseudonym;
    }
    cred.identity = std::move(*identity);

    NodeState node;
    node.node_id = n.node_id;
    node.chain_id = n.chain_id;
    node.gateway = n.gateway;
    if (auto alias = cred.signing_key()) {
      node.alias = *alias;
      if (n.gateway) authorized[n.chain_id].push_back(alias->public_key);
    } else if (n.gateway) {
      return absl::InvalidArgumentError(absl::StrCat(
          "gateway ", n.node_id, " needs at least one alias layer"));
    }
    creds[n.node_id] = std::move(cred);
    world.nodes_[n.node_id] = std::move(node);
  }

  for (const auto& c : config.chains) {
    if (c.delegate.empty()) continue;
    gateway::GatewayEnv env;
    env.creds = creds.at(c.delegate);
    env.policy = policy;
    env.chain = world.ledgers_.at(c.chain_id)->params();
    env.timings.grace_ticks = config.policy.grace_blocks * c.block_interval;
    env.timings.trust_timeout_ticks =
        4 * max_delay + max_latency + env.timings.grace_ticks;
    env.timings.retransmit_ticks = c.block_interval;
    env.timings.max_delay_ticks = max_delay;
    env.peer_gateways = delegates;
    env.confirmation_latency = latency;
    env.authorized_signers = authorized;
    world.nodes_.at(c.delegate).machine =
        std::make_unique<gateway::GatewayNode>(std::move(env));
  }

  world.network_.SetDefault(config.default_link);
  for (const auto& l : config.links) {
    world.network_.SetLink(l.from, l.to, l.params);
  }
  for (const auto& c : config.chains) {
    world.LogTransitions(c.chain_id);
    world.Push(c.block_interval, BlockDue{c.chain_id});
  }
  for (size_t i = 0; i < config.script.size(); ++i) {
    world.Push(config.script[i].tick, Script{i});
  }
  for (const auto& v : {kExclusivity, kNoLoss, kRedirect, kTrustGate,
                        kPhaseAudit, kConfinement, kLedgerTransitions}) {
    world.verdicts_[v].name = v;
  }
  return w;
}

const gateway::GatewayNode* World::gateway(const std::string& node_id) const {
  auto it = nodes_.find(node_id);
  return it == nodes_.end() ? nullptr : it->second.machine.get();
}

// ---------------------------------------------------------------------------
// Event loop

void World::Push(Tick tick, Event event) {
  if (!std::holds_alternative<BlockDue>(event)) ++pending_non_block_;
  queue_.Push(tick, std::move(event));
}

RunReport World::Run(std::optional<Tick> tick_limit, bool stop_when_quiescent) {
  const Tick limit = tick_limit.value_or(config_.tick_limit);
  bool quiescent = false;
  while (auto next = queue_.NextTick()) {
    if (*next > limit) break;
    now_ = *next;
    for (auto& entry : queue_.PopNextTick()) {
      if (!std::holds_alternative<BlockDue>(entry.payload)) {
        --pending_non_block_;
      }
      Dispatch(entry.payload);
    }
    AuditTick();
    if (Quiescent()) {
      quiescent = true;
      if (stop_when_quiescent) break;
    } else {
      quiescent = false;
    }
  }
  RunReport report = BuildReport();
  report.quiescent = quiescent;
  return report;
}

void World::Dispatch(const Event& event) {
  if (const auto* b = std::get_if<BlockDue>(&event)) {
    OnBlock(b->chain);
  } else if (const auto* d = std::get_if<Deliver>(&event)) {
    OnDeliver(*d);
  } else if (const auto* t = std::get_if<Timer>(&event)) {
    OnTimer(*t);
  } else if (const auto* s = std::get_if<Script>(&event)) {
    OnScript(s->index);
  } else if (const auto* r = std::get_if<Recover>(&event)) {
    OnRecover(r->node);
  }
}

bool World::Quiescent() const {
  if (script_fired_ < config_.script.size() || pending_non_block_ > 0) {
    return false;
  }
  for (const auto& [id, l] : ledgers_) {
    if (!l->pending().empty()) return false;
  }
  for (const auto& [id, n] : nodes_) {
    if (n.machine && !n.machine->Settled()) return false;
  }
  return true;
}

std::string World::LabelOf(const crypto::Digest& private_id) const {
  auto it = labels_.find(private_id);
  return it == labels_.end() ? "?" : it->second;
}

std::string World::TxSummary(const LedgerTx& tx) const {
  if (const auto* reg = std::get_if<ledger::Register>(&tx.body)) {
    return absl::StrCat("Register in:", Short(reg->masked_id));
  }
  return absl::StrCat(Str(tx.KindName()), " ", LabelOf(tx.AssetId()));
}

std::string World::OwnerName(const crypto::PublicKey& key) const {
  for (const auto& [name, kp] : users_) {
    if (kp.public_key == key) return name;
  }
  return key.hex();
}

void World::OnBlock(const std::string& chain) {
  ledger::Ledger& l = *ledgers_.at(chain);
  const ledger::Block& block = l.ProduceBlock(now_);
  ++counters_["blocks"];
  log_.Add(now_, chain, "block", block.Serialize(),
           absl::StrCat("height=", block.height,
                        " txs=", block.outcomes.size()));
  for (const auto& o : block.outcomes) {
    std::string summary = TxSummary(o.tx);
    if (!o.ok) absl::StrAppend(&summary, ": ", o.failure);
    log_.Add(now_, chain, o.ok ? "tx_applied" : "tx_failed", o.tx.Serialize(),
             summary, o.tx.submitter);
  }
  for (const auto& o : l.NewlyConfirmed()) {
    log_.Add(now_, chain, "tx_confirmed", o.tx.Serialize(), TxSummary(o.tx),
             o.tx.submitter);
  }
  LogTransitions(chain);
  Push(now_ + l.params().block_interval, BlockDue{chain});
  for (auto& [id, node] : nodes_) {
    if (node.machine && node.chain_id == chain && !node.crashed) {
      FeedBlocks(node);
    }
  }
}

void World::LogTransitions(const std::string& chain) {
  const auto& transitions = ledgers_.at(chain)->transitions();
  size_t& done = transitions_logged_[chain];
  for (; done < transitions.size(); ++done) {
    const auto& t = transitions[done];
    const std::string summary =
        absl::StrCat(LabelOf(t.asset), " ", t.from, " -> ", t.to);
    log_.Add(t.tick, chain, "asset", AsBytes(summary), summary);
    if (!AllowedLedgerTransition(t.from, t.to)) {
      Violation(kLedgerTransitions, summary);
    }
  }
}

void World::FeedBlocks(NodeState& node) {
  const ledger::Ledger& l = *ledgers_.at(node.chain_id);
  const uint64_t depth = l.params().confirmation_depth;
  gateway::BlockInput in;
  for (uint64_t h = node.seen_height + 1; h <= l.height(); ++h) {
    const auto& applied = l.blocks()[h - 1].outcomes;
    in.applied.insert(in.applied.end(), applied.begin(), applied.end());
    if (h >= 1 + depth) {
      const auto& confirmed = l.blocks()[h - 1 - depth].outcomes;
      in.confirmed.insert(in.confirmed.end(), confirmed.begin(),
                          confirmed.end());
    }
  }
  node.seen_height = l.height();
  gateway::StepContext ctx = MakeContext(node);
  Process(node, node.machine->Handle(in, ctx));
}

gateway::StepContext World::MakeContext(const NodeState& node) {
  gateway::StepContext ctx;
  ctx.now = now_;
  ctx.draw_nonce = [this] { return rng_.Fill<crypto::Nonce>(); };
  for (const auto& [id, other] : nodes_) {
    if (other.gateway && other.chain_id == node.chain_id) {
      ctx.cosigners.push_back(gateway::QuorumSigner{other.alias, !other.crashed});
    }
  }
  return ctx;
}

void World::OnDeliver(const Deliver& d) {
  auto it = nodes_.find(d.to);
  const std::string chain =
      nodes_.contains(d.from) ? nodes_.at(d.from).chain_id : "-";
  const std::string route = absl::StrCat(d.from, "->", d.to);
  if (it == nodes_.end() || !it->second.machine) {
    log_.Add(now_, chain, "drop", d.wire, absl::StrCat(route, ": no gateway"));
    return;
  }
  NodeState& node = it->second;
  if (node.crashed) {
    ++counters_["messages_lost_to_crash"];
    log_.Add(now_, chain, "drop", d.wire,
             absl::StrCat(route, ": recipient down"));
    return;
  }
  auto envelope = gateway::Decode(d.wire);
  if (envelope.ok() && envelope->from != d.from) {
    envelope = absl::InvalidArgumentError("sender mismatch");
  }
  if (!envelope.ok()) {
    ++counters_["messages_malformed"];
    log_.Add(now_, chain, "malformed", d.wire,
             absl::StrCat(route, ": ", Str(envelope.status().message())),
             d.to);
    return;
  }
  ++counters_["messages_delivered"];
  log_.Add(now_, chain, "deliver", d.wire,
           absl::StrCat(route, " ",
                        Str(gateway::KindName(gateway::KindOf(envelope->message)))),
           d.to, gateway::SessionOf(envelope->message));
  gateway::StepContext ctx = MakeContext(node);
  Process(node, node.machine->Handle(gateway::MessageInput{*envelope}, ctx));
}

void World::OnTimer(const Timer& t) {
  timers_.erase({t.node, t.session, now_});
  NodeState& node = nodes_.at(t.node);
  if (node.crashed || !node.machine) return;
  gateway::StepContext ctx = MakeContext(node);
  Process(node, node.machine->Wake(t.session, ctx));
}

void World::ScriptFailure(const ScriptAction& action, const std::string& why) {
  std::string msg = absl::StrCat("script line ", action.line, " at tick ",
                                 action.tick, ": ", why);
  log_.Add(now_, "-", "script_failed", AsBytes(msg), msg);
  script_failures_.push_back(std::move(msg));
}

void World::OnScript(size_t index) {
  ++script_fired_;
  const ScriptAction& a = config_.script[index];
  switch (a.kind) {
    case ScriptAction::Kind::kTransfer: {
      auto id = asset_ids_.find({a.chain, a.asset});
      if (id == asset_ids_.end()) {
        ScriptFailure(a, absl::StrCat("unknown asset ", a.asset, " on ",
                                      a.chain));
        return;
      }
      ledger::Ledger& l = *ledgers_.at(a.chain);
      const AssetRecord* record = l.FindAsset(id->second);
      const std::string& delegate = l.params().gateway_id;
      auto g = nodes_.find(delegate);
      if (g == nodes_.end() || !g->second.machine) {
        ScriptFailure(a, absl::StrCat("no delegate gateway on ", a.chain));
        return;
      }
      if (g->second.crashed) {
        ScriptFailure(a, absl::StrCat("delegate ", delegate, " is down"));
        return;
      }
      const crypto::PublicKey& owner = users_.at(a.to_owner).public_key;
      LedgerTx tx;
      tx.body = ledger::TransferOut{id->second, a.to_chain, owner};
      tx.submitter = record ? OwnerName(record->owner) : "?";
      auto tx_id = l.Submit(tx);
      if (!tx_id.ok()) {
        ScriptFailure(a, Str(tx_id.status().message()));
        return;
      }
      log_.Add(now_, a.chain, "submit", l.pending().back().Serialize(),
               TxSummary(tx),
               tx.submitter);
      ++counters_["transfers_started"];
      gateway::TransferStart start;
      start.transfer_tx = *tx_id;
      start.asset = id->second;
      start.dest_chain = a.to_chain;
      start.dest_owner = owner;
      start.value = record ? record->value : 0;
      NodeState& node = g->second;
      gateway::StepContext ctx = MakeContext(node);
      auto steps = node.machine->Handle(start, ctx);
      if (!steps.empty()) {
        transfers_.push_back(TransferTrack{delegate, steps.front().session_id,
                                           a.chain, a.to_chain, id->second,
                                           owner});
      }
      Process(node, std::move(steps));
      return;
    }
    case ScriptAction::Kind::kCrash: {
      NodeState& node = nodes_.at(a.node);
      node.crashed = true;
      const std::string msg = absl::StrCat(a.node, " crashed");
      log_.Add(now_, node.chain_id, "crash", AsBytes(msg), msg, a.node);
      if (a.duration) {
        Push(now_ + std::max<Tick>(1, *a.duration), Recover{a.node});
      }
      return;
    }
    case ScriptAction::Kind::kCorruptNextMessage: {
      NodeState& node = nodes_.at(a.node);
      node.corrupt_next = true;
      const std::string msg =
          absl::StrCat(a.node, " will corrupt its next message");
      log_.Add(now_, node.chain_id, "inject", AsBytes(msg), msg, a.node);
      return;
    }
    case ScriptAction::Kind::kSetLink: {
      network_.SetLink(a.link->from, a.link->to, a.link->params);
      const std::string msg = absl::StrCat(
          "link ", a.link->from, "->", a.link->to, " delay [",
          a.link->params.delay_min, ", ", a.link->params.delay_max,
          "] drop ", a.link->params.drop_probability);
      log_.Add(now_, "-", "inject", AsBytes(msg), msg);
      return;
    }
  }
}

void World::OnRecover(const std::string& id) {
  NodeState& node = nodes_.at(id);
  node.crashed = false;
  const std::string msg = absl::StrCat(id, " recovered");
  log_.Add(now_, node.chain_id, "recover", AsBytes(msg), msg, id);
  if (!node.machine) return;
  FeedBlocks(node);
  std::vector<crypto::Nonce> sessions;
  for (const auto& [sid, state] : node.machine->sessions()) {
    if (!gateway::IsSettled(state)) sessions.push_back(sid);
  }
  for (const auto& sid : sessions) {
    gateway::StepContext ctx = MakeContext(node);
    Process(node, node.machine->Wake(sid, ctx));
  }
}

void World::Process(NodeState& node, std::vector<gateway::SessionStep> steps) {
  for (auto& note : node.machine->TakeNotes()) {
    log_.Add(now_, node.chain_id, "note", AsBytes(note), note, node.node_id);
  }
  for (auto& step : steps) {
    gateway::Transition& t = step.transition;
    const Role role = t.state.role;
    for (const auto& [from, to] : t.path) {
      const std::string summary =
          absl::StrCat(Str(gateway::RoleName(role)), " ",
                       Str(gateway::PhaseName(from)), " -> ",
                       Str(gateway::PhaseName(to)));
      log_.Add(now_, node.chain_id, "phase", AsBytes(summary), summary,
               node.node_id, step.session_id);
      if (!gateway::IsAllowedEdge(role, from, to)) {
        Violation(kPhaseAudit, absl::StrCat(node.node_id, ": ", summary));
      }
    }
    if (t.trust_established) {
      const std::string summary =
          absl::StrCat("peer ", t.state.peer, " alias ",
                       t.state.peer_key ? t.state.peer_key->hex().substr(0, 16)
                                        : "");
      log_.Add(now_, node.chain_id, "trust_established", AsBytes(summary),
               summary, node.node_id, step.session_id);
    }
    for (const auto& note : t.notes) {
      log_.Add(now_, node.chain_id, "note", AsBytes(note), note, node.node_id,
               step.session_id);
    }
    for (auto& body : t.submissions) {
      LedgerTx tx;
      tx.body = std::move(body);
      tx.submitter = node.node_id;
      if (const auto* reg = std::get_if<ledger::Register>(&tx.body)) {
        labels_[reg->private_id] = absl::StrCat("in:", Short(reg->masked_id));
        ++counters_[absl::StrCat("register_submissions_", node.chain_id)];
      }
      ledger::Ledger& l = *ledgers_.at(node.chain_id);
      const std::string summary = TxSummary(tx);
      auto id = l.Submit(tx);
      log_.Add(now_, node.chain_id, id.ok() ? "submit" : "submit_rejected",
               id.ok() ? l.pending().back().Serialize() : tx.Serialize(),
               id.ok() ? summary
                       : absl::StrCat(summary, ": ", Str(id.status().message())),
               node.node_id, step.session_id);
    }
    for (const auto& envelope : t.outbound) {
      SendWire(node, envelope, step.session_id);
    }
    if (t.wake_at &&
        timers_.insert({node.node_id, step.session_id, *t.wake_at}).second) {
      Push(*t.wake_at, Timer{node.node_id, step.session_id});
    }
  }
}

void World::SendWire(NodeState& from, const gateway::Envelope& envelope,
                     const std::optional<crypto::Nonce>& session) {
  Bytes wire = gateway::Encode(envelope);
  wires_.push_back(wire);
  const std::string route = absl::StrCat(envelope.from, "->", envelope.to);
  const std::string kind =
      Str(gateway::KindName(gateway::KindOf(envelope.message)));
  if (from.corrupt_next) {
    from.corrupt_next = false;
    const uint64_t bit = rng_.Uniform(0, wire.size() * 8 - 1);
    wire[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    wires_.push_back(wire);
    const std::string msg =
        absl::StrCat(route, " ", kind, ": flipped bit ", bit);
    log_.Add(now_, from.chain_id, "corrupt", wire, msg, from.node_id, session);
  }
  ++counters_["messages_sent"];
  log_.Add(now_, from.chain_id, "send", wire, absl::StrCat(route, " ", kind),
           from.node_id, session);
  const auto delays = network_.Sample(envelope.from, envelope.to, rng_);
  if (delays.empty()) {
    ++counters_["messages_dropped"];
    log_.Add(now_, from.chain_id, "drop", wire,
             absl::StrCat(route, " ", kind, ": lost"), from.node_id, session);
  }
  for (size_t i = 0; i < delays.size(); ++i) {
    if (i > 0) {
      ++counters_["messages_duplicated"];
      log_.Add(now_, from.chain_id, "duplicate", wire,
               absl::StrCat(route, " ", kind), from.node_id, session);
    }
    Push(now_ + delays[i], Deliver{envelope.from, envelope.to, wire});
  }
}

// ---------------------------------------------------------------------------
// Audits

void World::Violation(const std::string& name, std::string detail,
                      std::optional<Tick> at) {
  InvariantVerdict& v = verdicts_[name];
  v.name = name;
  if (v.pass) {
    v.pass = false;
    v.first_violation = at.value_or(now_);
    v.detail = std::move(detail);
  }
}

void World::AuditTick() {
  // Public id published by a source gateway -> the asset it masks.
  std::map<std::pair<std::string, crypto::Digest>,
           std::pair<std::string, crypto::Digest>>
      published;
  for (const auto& [id, node] : nodes_) {
    if (!node.machine) continue;
    for (const auto& [sid, s] : node.machine->sessions()) {
      if (s.role == Role::kSource && s.phase != Phase::kIdle) {
        published[{s.ctx.source_chain, s.ctx.txid1}] = {s.ctx.source_chain,
                                                        s.ctx.asset};
      }
    }
  }
  // Follows inbound origins back to the first chain the asset lived on.
  auto root_of = [&](std::string chain, crypto::Digest asset) {
    for (int hops = 0; hops < 64; ++hops) {
      const AssetRecord* r = ledgers_.at(chain)->FindAsset(asset);
      if (r == nullptr || !r->origin) break;
      auto it = published.find({r->origin->chain, r->origin->public_id});
      if (it == published.end() || !ledgers_.contains(it->second.first)) break;
      chain = it->second.first;
      asset = it->second.second;
    }
    return std::pair{chain, asset};
  };
  std::map<std::pair<std::string, crypto::Digest>, std::vector<std::string>>
      active;
  for (const auto& [chain, l] : ledgers_) {
    for (const auto& [id, record] : l->assets()) {
      if (std::holds_alternative<ledger::ActiveState>(record.state)) {
        active[root_of(chain, id)].push_back(chain);
      }
    }
  }
  for (const auto& [root, chains] : active) {
    if (chains.size() > 1) {
      Violation(kExclusivity,
                absl::StrCat("asset ", LabelOf(root.second), " active on ",
                             chains.size(), " chains"));
    }
  }

  // Invalidated here, but nothing left to redirect to on the remote chain.
  for (const auto& [chain, l] : ledgers_) {
    for (const auto& [id, record] : l->assets()) {
      const auto* inv = std::get_if<ledger::InvalidatedState>(&record.state);
      if (inv == nullptr || hazard_assets_.contains(id)) continue;
      auto remote = ledgers_.find(inv->remote_chain);
      if (remote == ledgers_.end()) continue;
      if (remote->second->Query(inv->remote_public_id,
                                ledger::Visibility::kOutside)
              .kind == ledger::AssetStatus::Kind::kNotFound) {
        hazard_assets_[id].first = now_;
        hazard_assets_[id].second = absl::StrCat(
            "tick ", now_, ": ", LabelOf(id), " invalidated on ", chain,
            " but absent on ", inv->remote_chain,
            " (destination rolled back before the invalidation assertion "
            "arrived)");
      }
    }
  }
}

RunReport World::BuildReport() {
  RunReport report;
  report.seed = config_.seed;
  report.final_tick = now_;

  // Trust gate: every Register submission follows a trust_established event
  // of the same node and session.
  {
    std::set<std::pair<std::string, crypto::Nonce>> trusted;
    for (const auto& e : log_.events()) {
      if (!e.session) continue;
      if (e.kind == "trust_established") trusted.insert({e.node, *e.session});
      if (e.kind == "submit" && e.summary.rfind("Register", 0) == 0 &&
          !trusted.contains({e.node, *e.session})) {
        InvariantVerdict& v = verdicts_[kTrustGate];
        if (v.pass) {
          v.pass = false;
          v.first_violation = e.tick;
          v.detail = absl::StrCat(e.node, " registered without trust");
        }
      }
    }
  }

  // Private-id confinement over every wire message sent.
  {
    std::set<crypto::Digest> private_ids;
    for (const auto& [chain, l] : ledgers_) {
      for (const auto& t : l->transitions()) private_ids.insert(t.asset);
    }
    for (const auto& [id, node] : nodes_) {
      if (!node.machine) continue;
      for (const auto& [sid, s] : node.machine->sessions()) {
        if (s.role == Role::kDestination &&
            s.phase != Phase::kTrustEstablishing) {
          private_ids.insert(s.ctx.asset);
        }
      }
    }
    for (const auto& wire : wires_) {
      for (const auto& id : private_ids) {
        if (ContainsSubsequence(wire, id.view())) {
          Violation(kConfinement,
                    absl::StrCat("private id of ", LabelOf(id),
                                 " found in a wire message"));
        }
      }
    }
  }

  // Per-transfer outcome: completion -> redirect, otherwise -> no loss.
  for (const auto& track : transfers_) {
    TransferReport tr;
    tr.source_node = track.source_node;
    const gateway::GatewayState* src = nullptr;
    if (const auto* g = gateway(track.source_node)) {
      auto it = g->sessions().find(track.session);
      if (it != g->sessions().end()) src = &it->second;
    }
    const gateway::GatewayState* dst = nullptr;
    const ledger::Ledger& dest_ledger = *ledgers_.at(track.dest_chain);
    tr.dest_node = dest_ledger.params().gateway_id;
    if (const auto* g = gateway(tr.dest_node)) {
      auto it = g->sessions().find(track.session);
      if (it != g->sessions().end()) dst = &it->second;
    }
    if (src != nullptr) {
      tr.source_phase = Str(gateway::PhaseName(src->phase));
      tr.txid1 = src->ctx.txid1.hex();
    }
    if (dst != nullptr) {
      tr.dest_phase = Str(gateway::PhaseName(dst->phase));
      tr.txid2 = dst->ctx.txid2.hex();
    }
    const bool completed = src && dst && src->phase == Phase::kDone &&
                           dst->phase == Phase::kDone;
    const ledger::Ledger& source_ledger = *ledgers_.at(track.source_chain);
    if (completed) {
      auto redirect = source_ledger.Query(src->ctx.txid1,
                                          ledger::Visibility::kOutside);
      auto arrived =
          dest_ledger.Query(dst->ctx.txid2, ledger::Visibility::kOutside);
      const AssetRecord* landed = dest_ledger.FindAsset(dst->ctx.asset);
      const bool ok =
          redirect.kind == ledger::AssetStatus::Kind::kRedirect &&
          redirect.chain == track.dest_chain &&
          redirect.remote_public_id == dst->ctx.txid2 &&
          arrived.kind == ledger::AssetStatus::Kind::kActive &&
          landed != nullptr && landed->owner == track.dest_owner;
      if (!ok) {
        Violation(kRedirect, absl::StrCat("transfer of ",
                                          LabelOf(track.asset),
                                          " completed without a redirect"));
      }
    } else {
      const AssetRecord* home = source_ledger.FindAsset(track.asset);
      const bool home_active =
          home && std::holds_alternative<ledger::ActiveState>(home->state);
      bool arrived = false;
      if (src != nullptr) {
        for (const auto& [id, record] : dest_ledger.assets()) {
          if (record.origin && record.origin->chain == track.source_chain &&
              record.origin->public_id == src->ctx.txid1) {
            arrived = true;
          }
        }
      }
      if (!home_active || arrived) {
        std::optional<Tick> at;
        if (auto h = hazard_assets_.find(track.asset);
            h != hazard_assets_.end()) {
          at = h->second.first;
        }
        Violation(kNoLoss,
                  absl::StrCat("incomplete transfer of ", LabelOf(track.asset),
                               ": ", home_active ? "Active" : "not Active",
                               " on ", track.source_chain, ", ",
                               arrived ? "present" : "absent", " on ",
                               track.dest_chain),
                  at);
      }
    }
    report.transfers.push_back(std::move(tr));
  }

  for (const auto& [chain, l] : ledgers_) {
    ChainReport cr;
    cr.chain_id = chain;
    cr.height = l->height();
    for (const auto& [id, record] : l->assets()) {
      AssetLine line;
      line.label = LabelOf(id);
      line.state = Str(ledger::StateName(record.state));
      line.owner = OwnerName(record.owner);
      line.value = record.value;
      if (record.public_id) line.public_id = record.public_id->hex();
      if (const auto* inv = std::get_if<ledger::InvalidatedState>(&record.state)) {
        line.redirect_chain = inv->remote_chain;
        line.redirect_id = inv->remote_public_id.hex();
      }
      cr.assets.push_back(std::move(line));
    }
    std::sort(cr.assets.begin(), cr.assets.end(),
              [](const AssetLine& a, const AssetLine& b) {
                return a.label < b.label;
              });
    report.chains.push_back(std::move(cr));
  }

  for (const auto& name : {kExclusivity, kNoLoss, kRedirect, kTrustGate,
                           kPhaseAudit, kConfinement, kLedgerTransitions}) {
    report.verdicts.push_back(verdicts_.at(name));
  }
  for (const auto& [id, h] : hazard_assets_) report.hazards.push_back(h.second);
  std::sort(report.hazards.begin(), report.hazards.end());
  report.script_failures = script_failures_;
  report.counters = counters_;
  report.counters["hazards"] = report.hazards.size();
  report.log_digest = log_.Digest().hex();
  return report;
}

// ---------------------------------------------------------------------------

absl::StatusOr<RunReport> RunScenario(const ScenarioConfig& config,
                                      std::optional<Tick> tick_limit) {
  auto world = World::Build(config);
  if (!world.ok()) return world.status();
  return (*world)->Run(tick_limit);
}

std::vector<absl::StatusOr<RunReport>> RunBatch(
    const std::vector<ScenarioConfig>& configs, size_t threads) {
  std::vector<absl::StatusOr<RunReport>> out(
      configs.size(), absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < configs.size(); i = next++) {
      out[i] = RunScenario(configs[i]);
    }
  };
  std::vector<std::thread> pool;
  const size_t n = std::max<size_t>(1, std::min(threads, configs.size()));
  for (size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace dtcb::scenario
