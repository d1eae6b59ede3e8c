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

#ifndef DTCB_LEDGER_LEDGER_H_
#define DTCB_LEDGER_LEDGER_H_

// A simulated blockchain autonomous system: an append-only chain of blocks
// produced every `block_interval` ticks, a pending queue, and the asset
// records the cross-chain transfer protocol moves around.
//
// Asset lifecycle:
//   Absent -> Active                       genesis
//   Active -> Locked (outbound)            TransferOut
//   Absent -> Locked (inbound)             Register
//   Locked -> Active                       Unlock
//   Locked | Active -> Invalidated         Invalidate (terminal)
//   Locked (inbound, deadline passed) -> Absent   Rollback

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::ledger {

using Tick = uint64_t;

struct ActiveState {
  friend bool operator==(const ActiveState&, const ActiveState&) = default;
};

enum class LockKind { kOutbound, kInbound };

struct LockedState {
  std::string holder;
  Tick deadline = 0;
  LockKind kind = LockKind::kOutbound;
  // Outbound locks only: where the asset is headed.
  std::string dest_chain;
  crypto::PublicKey dest_owner;

  friend bool operator==(const LockedState&, const LockedState&) = default;
};

struct InvalidatedState {
  crypto::Digest local_public_id;
  crypto::Digest remote_public_id;
  std::string remote_chain;

  friend bool operator==(const InvalidatedState&,
                         const InvalidatedState&) = default;
};

using AssetState = std::variant<ActiveState, LockedState, InvalidatedState>;

std::string_view StateName(const AssetState& state);

// Where an inbound asset came from: the source chain and the public id the
// source gateway published for it.
struct Origin {
  std::string chain;
  crypto::Digest public_id;

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct AssetRecord {
  crypto::Digest private_tx_id;
  crypto::PublicKey owner;
  uint64_t value = 0;
  AssetState state;
  std::optional<crypto::Digest> public_id;
  std::optional<Origin> origin;
};

struct TransferOut {
  crypto::Digest asset;
  std::string dest_chain;
  crypto::PublicKey dest_owner;
};

struct Register {
  crypto::Digest private_id;
  crypto::Digest masked_id;
  crypto::PublicKey owner;
  uint64_t value = 0;
  std::string lock_holder;
  // Lock deadline = apply tick + confirmation latency + grace.
  Tick grace_ticks = 0;
  Origin origin;
};

struct Invalidate {
  crypto::Digest asset;
  crypto::Digest txid1_public;
  crypto::Digest txid2_public;
  std::string remote_chain;
};

struct Unlock {
  crypto::Digest asset;
};

struct Rollback {
  crypto::Digest asset;
};

using TxBody = std::variant<TransferOut, Register, Invalidate, Unlock, Rollback>;

struct LedgerTx {
  TxBody body;
  std::string submitter;
  // Assigned by Ledger::Submit; makes otherwise identical transactions
  // distinguishable.
  uint64_t sequence = 0;

  std::string_view KindName() const;
  // The asset the transaction is about (private id).
  const crypto::Digest& AssetId() const;
  Bytes Serialize() const;
  crypto::Digest Id() const { return crypto::Hash(Serialize()); }
};

struct TxOutcome {
  LedgerTx tx;
  crypto::Digest tx_id;
  bool ok = false;
  std::string failure;
  // Set when the transaction left the asset Locked.
  std::optional<Tick> lock_deadline;
};

struct Block {
  uint64_t height = 0;
  Tick tick = 0;
  crypto::Digest prev_digest;
  std::vector<TxOutcome> outcomes;

  Bytes Serialize() const;
  crypto::Digest Digest() const { return crypto::Hash(Serialize()); }
};

struct AssetStatus {
  enum class Kind { kActive, kLocked, kRedirect, kNotFound };
  Kind kind = Kind::kNotFound;
  std::string chain;
  crypto::Digest remote_public_id;
};

// Private ids are only resolvable from inside the chain's trust domain.
enum class Visibility { kInside, kOutside };

struct AssetTransition {
  Tick tick = 0;
  crypto::Digest asset;
  std::string from;  // StateName or "Absent"
  std::string to;
};

struct ChainParams {
  std::string chain_id;
  Tick block_interval = 10;
  uint64_t confirmation_depth = 0;
  // Delegate gateway that holds outbound locks.
  std::string gateway_id;
  Tick outbound_lock_ticks = 0;
};

class Ledger {
 public:
  explicit Ledger(ChainParams params);

  const ChainParams& params() const { return params_; }
  const std::string& chain_id() const { return params_.chain_id; }

  absl::Status AddGenesisAsset(const crypto::Digest& private_id,
                               const crypto::PublicKey& owner, uint64_t value,
                               Tick now = 0);

  // Queues `tx`. Rejects transactions that reference an asset this ledger has
  // never seen; every other precondition is checked when the block applies.
  absl::StatusOr<crypto::Digest> Submit(LedgerTx tx);

  // Applies all pending transactions in submission order and appends the
  // block. Failed transactions are recorded in the block, never dropped.
  const Block& ProduceBlock(Tick now);

  // Single state transition. Only block production calls this outside of
  // tests.
  TxOutcome Apply(const LedgerTx& tx, Tick now);

  AssetStatus Query(const crypto::Digest& id, Visibility visibility) const;

  const AssetRecord* FindAsset(const crypto::Digest& private_id) const;
  const std::map<crypto::Digest, AssetRecord>& assets() const {
    return assets_;
  }

  uint64_t height() const { return blocks_.size(); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::deque<LedgerTx>& pending() const { return pending_; }
  const std::vector<AssetTransition>& transitions() const {
    return transitions_;
  }

  // Block height (1-based) a transaction was included in.
  std::optional<uint64_t> InclusionHeight(const crypto::Digest& tx_id) const;
  bool IsConfirmed(const crypto::Digest& tx_id) const;
  // Outcomes that became confirmed with the most recent block.
  std::vector<TxOutcome> NewlyConfirmed() const;

  // Ticks from inclusion to confirmation.
  Tick ConfirmationLatency() const {
    return params_.confirmation_depth * params_.block_interval;
  }

 private:
  void RecordTransition(Tick now, const crypto::Digest& asset,
                        std::string from, std::string to);

  ChainParams params_;
  std::vector<Block> blocks_;
  std::deque<LedgerTx> pending_;
  std::map<crypto::Digest, AssetRecord> assets_;
  // Every private id ever created here, including rolled-back ones.
  std::set<crypto::Digest> known_ids_;
  std::map<crypto::Digest, crypto::Digest> public_index_;
  std::map<crypto::Digest, uint64_t> inclusion_;
  std::vector<AssetTransition> transitions_;
  uint64_t next_sequence_ = 0;
};

}  // namespace dtcb::ledger

#endif  // DTCB_LEDGER_LEDGER_H_
