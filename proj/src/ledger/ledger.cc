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

#include "dtcb/ledger/ledger.h"

#include <utility>

#include "absl/strings/str_cat.h"
#include "dtcb/crypto/canonical.h"

namespace dtcb::ledger {
namespace {

using crypto::CanonicalWriter;
using crypto::Digest;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

constexpr char kAbsent[] = "Absent";

void WriteBody(const TxBody& body, CanonicalWriter& w) {
  std::visit(
      Overloaded{
          [&](const TransferOut& t) {
            w.PutRawByte(1).Put(t.asset).PutString(t.dest_chain).Put(
                t.dest_owner);
          },
          [&](const Register& t) {
            w.PutRawByte(2)
                .Put(t.private_id)
                .Put(t.masked_id)
                .Put(t.owner)
                .PutU64(t.value)
                .PutString(t.lock_holder)
                .PutU64(t.grace_ticks)
                .PutString(t.origin.chain)
                .Put(t.origin.public_id);
          },
          [&](const Invalidate& t) {
            w.PutRawByte(3)
                .Put(t.asset)
                .Put(t.txid1_public)
                .Put(t.txid2_public)
                .PutString(t.remote_chain);
          },
          [&](const Unlock& t) { w.PutRawByte(4).Put(t.asset); },
          [&](const Rollback& t) { w.PutRawByte(5).Put(t.asset); },
      },
      body);
}

TxOutcome Fail(TxOutcome outcome, std::string reason) {
  outcome.ok = false;
  outcome.failure = std::move(reason);
  return outcome;
}

}  // namespace

std::string_view StateName(const AssetState& state) {
  return std::visit(Overloaded{
                        [](const ActiveState&) { return "Active"; },
                        [](const LockedState&) { return "Locked"; },
                        [](const InvalidatedState&) { return "Invalidated"; },
                    },
                    state);
}

std::string_view LedgerTx::KindName() const {
  return std::visit(Overloaded{
                        [](const TransferOut&) { return "TransferOut"; },
                        [](const Register&) { return "Register"; },
                        [](const Invalidate&) { return "Invalidate"; },
                        [](const Unlock&) { return "Unlock"; },
                        [](const Rollback&) { return "Rollback"; },
                    },
                    body);
}

const Digest& LedgerTx::AssetId() const {
  return std::visit(
      Overloaded{
          [](const TransferOut& t) -> const Digest& { return t.asset; },
          [](const Register& t) -> const Digest& { return t.private_id; },
          [](const Invalidate& t) -> const Digest& { return t.asset; },
          [](const Unlock& t) -> const Digest& { return t.asset; },
          [](const Rollback& t) -> const Digest& { return t.asset; },
      },
      body);
}

Bytes LedgerTx::Serialize() const {
  CanonicalWriter w(crypto::Tag::kLedgerTx);
  w.PutU64(sequence).PutString(submitter);
  WriteBody(body, w);
  return w.Take();
}

Bytes Block::Serialize() const {
  CanonicalWriter w(crypto::Tag::kBlock);
  w.PutU64(height).PutU64(tick).Put(prev_digest).PutU64(outcomes.size());
  for (const auto& o : outcomes) {
    w.Put(o.tx_id).PutBool(o.ok).PutString(o.failure);
  }
  return w.Take();
}

Ledger::Ledger(ChainParams params) : params_(std::move(params)) {}

void Ledger::RecordTransition(Tick now, const Digest& asset, std::string from,
                              std::string to) {
  transitions_.push_back(
      AssetTransition{now, asset, std::move(from), std::move(to)});
}

absl::Status Ledger::AddGenesisAsset(const Digest& private_id,
                                     const crypto::PublicKey& owner,
                                     uint64_t value, Tick now) {
  if (known_ids_.contains(private_id)) {
    return absl::AlreadyExistsError("genesis asset id already in use");
  }
  AssetRecord record;
  record.private_tx_id = private_id;
  record.owner = owner;
  record.value = value;
  record.state = ActiveState{};
  assets_.emplace(private_id, std::move(record));
  known_ids_.insert(private_id);
  RecordTransition(now, private_id, kAbsent, "Active");
  return absl::OkStatus();
}

absl::StatusOr<Digest> Ledger::Submit(LedgerTx tx) {
  if (!std::holds_alternative<Register>(tx.body) &&
      !known_ids_.contains(tx.AssetId())) {
    return absl::NotFoundError(
        absl::StrCat(std::string(tx.KindName()), ": unknown asset on ", params_.chain_id));
  }
  tx.sequence = next_sequence_++;
  Digest id = tx.Id();
  pending_.push_back(std::move(tx));
  return id;
}

TxOutcome Ledger::Apply(const LedgerTx& tx, Tick now) {
  TxOutcome outcome;
  outcome.tx = tx;
  outcome.tx_id = tx.Id();

  if (const auto* reg = std::get_if<Register>(&tx.body)) {
    if (known_ids_.contains(reg->private_id) ||
        public_index_.contains(reg->masked_id)) {
      return Fail(std::move(outcome), "asset id already in use");
    }
    AssetRecord record;
    record.private_tx_id = reg->private_id;
    record.owner = reg->owner;
    record.value = reg->value;
    LockedState lock;
    lock.holder = reg->lock_holder;
    lock.kind = LockKind::kInbound;
    lock.deadline = now + ConfirmationLatency() + reg->grace_ticks;
    record.state = lock;
    record.public_id = reg->masked_id;
    record.origin = reg->origin;
    assets_.emplace(reg->private_id, std::move(record));
    known_ids_.insert(reg->private_id);
    public_index_[reg->masked_id] = reg->private_id;
    RecordTransition(now, reg->private_id, kAbsent, "Locked");
    outcome.ok = true;
    outcome.lock_deadline = lock.deadline;
    return outcome;
  }

  auto it = assets_.find(tx.AssetId());
  if (it == assets_.end()) {
    return Fail(std::move(outcome), "asset not present");
  }
  AssetRecord& record = it->second;
  const std::string before(StateName(record.state));

  if (const auto* out = std::get_if<TransferOut>(&tx.body)) {
    if (!std::holds_alternative<ActiveState>(record.state)) {
      return Fail(std::move(outcome), "asset not Active");
    }
    LockedState lock;
    lock.holder = params_.gateway_id;
    lock.kind = LockKind::kOutbound;
    lock.deadline = now + params_.outbound_lock_ticks;
    lock.dest_chain = out->dest_chain;
    lock.dest_owner = out->dest_owner;
    record.state = lock;
    outcome.lock_deadline = lock.deadline;
  } else if (const auto* inv = std::get_if<Invalidate>(&tx.body)) {
    if (std::holds_alternative<InvalidatedState>(record.state)) {
      return Fail(std::move(outcome), "asset already Invalidated");
    }
    if (public_index_.contains(inv->txid1_public)) {
      return Fail(std::move(outcome), "public id already in use");
    }
    record.state = InvalidatedState{inv->txid1_public, inv->txid2_public,
                                    inv->remote_chain};
    record.public_id = inv->txid1_public;
    public_index_[inv->txid1_public] = record.private_tx_id;
  } else if (std::holds_alternative<Unlock>(tx.body)) {
    if (!std::holds_alternative<LockedState>(record.state)) {
      return Fail(std::move(outcome), "asset not Locked");
    }
    record.state = ActiveState{};
  } else if (std::holds_alternative<Rollback>(tx.body)) {
    const auto* lock = std::get_if<LockedState>(&record.state);
    if (lock == nullptr || lock->kind != LockKind::kInbound) {
      return Fail(std::move(outcome), "asset not under an inbound lock");
    }
    if (now < lock->deadline) {
      return Fail(std::move(outcome), "lock deadline not reached");
    }
    Digest id = record.private_tx_id;
    assets_.erase(it);
    RecordTransition(now, id, before, kAbsent);
    outcome.ok = true;
    return outcome;
  }

  RecordTransition(now, record.private_tx_id, before,
                   std::string(StateName(record.state)));
  outcome.ok = true;
  return outcome;
}

const Block& Ledger::ProduceBlock(Tick now) {
  Block block;
  block.height = blocks_.size() + 1;
  block.tick = now;
  if (!blocks_.empty()) block.prev_digest = blocks_.back().Digest();
  while (!pending_.empty()) {
    LedgerTx tx = std::move(pending_.front());
    pending_.pop_front();
    TxOutcome outcome = Apply(tx, now);
    inclusion_[outcome.tx_id] = block.height;
    block.outcomes.push_back(std::move(outcome));
  }
  blocks_.push_back(std::move(block));
  return blocks_.back();
}

AssetStatus Ledger::Query(const Digest& id, Visibility visibility) const {
  AssetStatus status;
  const AssetRecord* record = nullptr;
  if (auto pub = public_index_.find(id); pub != public_index_.end()) {
    record = FindAsset(pub->second);
  } else if (visibility == Visibility::kInside) {
    record = FindAsset(id);
  }
  if (record == nullptr) return status;
  status.chain = params_.chain_id;
  if (const auto* inv = std::get_if<InvalidatedState>(&record->state)) {
    status.kind = AssetStatus::Kind::kRedirect;
    status.chain = inv->remote_chain;
    status.remote_public_id = inv->remote_public_id;
  } else if (std::holds_alternative<LockedState>(record->state)) {
    status.kind = AssetStatus::Kind::kLocked;
  } else {
    status.kind = AssetStatus::Kind::kActive;
  }
  return status;
}

const AssetRecord* Ledger::FindAsset(const Digest& private_id) const {
  auto it = assets_.find(private_id);
  return it == assets_.end() ? nullptr : &it->second;
}

std::optional<uint64_t> Ledger::InclusionHeight(const Digest& tx_id) const {
  auto it = inclusion_.find(tx_id);
  if (it == inclusion_.end()) return std::nullopt;
  return it->second;
}

bool Ledger::IsConfirmed(const Digest& tx_id) const {
  auto h = InclusionHeight(tx_id);
  return h.has_value() && height() - *h >= params_.confirmation_depth;
}

std::vector<TxOutcome> Ledger::NewlyConfirmed() const {
  if (height() < 1 + params_.confirmation_depth) return {};
  return blocks_[height() - 1 - params_.confirmation_depth].outcomes;
}

}  // namespace dtcb::ledger
