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

#ifndef DTCB_SCENARIO_WORLD_H_
#define DTCB_SCENARIO_WORLD_H_

// The simulated world: ledgers, gateway nodes, a lossy network and the
// scripted fault injections, driven by one seeded event queue. Auditors run
// alongside and end up in the RunReport.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/attestation/membership.h"
#include "dtcb/gateway/state_machine.h"
#include "dtcb/ledger/ledger.h"
#include "dtcb/ledger/scheduler.h"
#include "dtcb/scenario/config.h"

namespace dtcb::scenario {

struct InvariantVerdict {
  std::string name;
  bool pass = true;
  std::optional<Tick> first_violation;
  std::string detail;
};

struct AssetLine {
  std::string label;
  std::string state;
  std::string owner;  // user name, or key hex if unknown
  uint64_t value = 0;
  std::string public_id;  // hex, empty when never published
  std::string redirect_chain;
  std::string redirect_id;
};

struct ChainReport {
  std::string chain_id;
  uint64_t height = 0;
  std::vector<AssetLine> assets;
};

struct TransferReport {
  std::string source_node;
  std::string dest_node;
  std::string source_phase;
  std::string dest_phase;  // empty when the destination never opened one
  std::string txid1;
  std::string txid2;
};

struct RunReport {
  uint64_t seed = 0;
  Tick final_tick = 0;
  bool quiescent = false;
  std::vector<ChainReport> chains;
  std::vector<TransferReport> transfers;
  std::vector<InvariantVerdict> verdicts;
  std::vector<std::string> hazards;
  std::vector<std::string> script_failures;
  std::map<std::string, uint64_t> counters;
  std::string log_digest;

  bool Passed() const;
  const InvariantVerdict* Verdict(const std::string& name) const;
  std::string ToJson() const;
};

class World {
 public:
  static absl::StatusOr<std::unique_ptr<World>> Build(
      const ScenarioConfig& config);

  // Runs until quiescence or `tick_limit` (the config's limit by default).
  // With `stop_when_quiescent` false the run always goes to the limit.
  RunReport Run(std::optional<Tick> tick_limit = std::nullopt,
                bool stop_when_quiescent = true);

  const ledger::EventLog& log() const { return log_; }
  const ledger::Ledger& ledger(const std::string& chain_id) const {
    return *ledgers_.at(chain_id);
  }
  const gateway::GatewayNode* gateway(const std::string& node_id) const;
  const crypto::PublicKey& user_key(const std::string& name) const {
    return users_.at(name).public_key;
  }
  // Private id of a genesis asset.
  const crypto::Digest& asset_id(const std::string& chain,
                                 const std::string& label) const {
    return asset_ids_.at({chain, label});
  }
  Tick now() const { return now_; }

 private:
  struct BlockDue {
    std::string chain;
  };
  struct Deliver {
    std::string from;
    std::string to;
    Bytes wire;
  };
  struct Timer {
    std::string node;
    crypto::Nonce session;
  };
  struct Script {
    size_t index;
  };
  struct Recover {
    std::string node;
  };
  using Event = std::variant<BlockDue, Deliver, Timer, Script, Recover>;

  struct TransferTrack {
    std::string source_node;
    crypto::Nonce session;
    std::string source_chain;
    std::string dest_chain;
    crypto::Digest asset;
    crypto::PublicKey dest_owner;
  };

  struct NodeState {
    std::string node_id;
    std::string chain_id;
    bool gateway = false;
    bool crashed = false;
    bool corrupt_next = false;
    uint64_t seen_height = 0;
    crypto::KeyPair alias;
    std::unique_ptr<gateway::GatewayNode> machine;  // delegates only
  };

  explicit World(const ScenarioConfig& config);

  void Push(Tick tick, Event event);
  void Dispatch(const Event& event);
  void OnBlock(const std::string& chain);
  void OnDeliver(const Deliver& d);
  void OnTimer(const Timer& t);
  void OnScript(size_t index);
  void OnRecover(const std::string& node);

  gateway::StepContext MakeContext(const NodeState& node);
  void Process(NodeState& node, std::vector<gateway::SessionStep> steps);
  void SendWire(NodeState& from, const gateway::Envelope& envelope,
                const std::optional<crypto::Nonce>& session);
  void FeedBlocks(NodeState& node);
  void LogTransitions(const std::string& chain);
  void ScriptFailure(const ScriptAction& action, const std::string& why);

  bool Quiescent() const;
  void AuditTick();
  RunReport BuildReport();
  std::string OwnerName(const crypto::PublicKey& key) const;
  std::string LabelOf(const crypto::Digest& private_id) const;
  std::string TxSummary(const ledger::LedgerTx& tx) const;
  void Violation(const std::string& name, std::string detail,
                 std::optional<Tick> at = std::nullopt);

  ScenarioConfig config_;
  ledger::DeterministicRng rng_;
  ledger::NetworkModel network_;
  ledger::EventLog log_;
  ledger::EventQueue<Event> queue_;
  Tick now_ = 0;
  size_t pending_non_block_ = 0;
  size_t script_fired_ = 0;

  std::map<std::string, std::unique_ptr<ledger::Ledger>> ledgers_;
  std::map<std::string, size_t> transitions_logged_;
  std::map<std::string, NodeState> nodes_;
  std::map<std::string, crypto::KeyPair> users_;
  std::map<std::pair<std::string, std::string>, crypto::Digest> asset_ids_;
  std::set<std::tuple<std::string, crypto::Nonce, Tick>> timers_;
  std::map<crypto::Digest, std::string> labels_;
  std::vector<TransferTrack> transfers_;

  // Audit state.
  std::vector<Bytes> wires_;
  std::set<std::pair<std::string, crypto::Nonce>> trusted_;
  std::map<std::string, InvariantVerdict> verdicts_;
  std::map<crypto::Digest, std::pair<Tick, std::string>> hazard_assets_;
  std::vector<std::string> script_failures_;
  std::map<std::string, uint64_t> counters_;
};

absl::StatusOr<RunReport> RunScenario(
    const ScenarioConfig& config,
    std::optional<Tick> tick_limit = std::nullopt);

// Runs independent scenarios on `threads` worker threads; reports come back
// in input order.
std::vector<absl::StatusOr<RunReport>> RunBatch(
    const std::vector<ScenarioConfig>& configs, size_t threads);

}  // namespace dtcb::scenario

#endif  // DTCB_SCENARIO_WORLD_H_
