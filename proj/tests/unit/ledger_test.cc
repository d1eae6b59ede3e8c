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

#include <gtest/gtest.h>

#include "dtcb/gateway/messages.h"
#include "dtcb/ledger/ledger.h"
#include "dtcb/ledger/scheduler.h"
#include "fixtures.h"

namespace dtcb::ledger {
namespace {

using testing::Filled;
using testing::SeedFilled;

class LedgerTest : public ::testing::Test {
 protected:
  LedgerTest() : ledger_(Params()) {
    owner_ = crypto::KeypairFromSeed(SeedFilled(1)).public_key;
    other_ = crypto::KeypairFromSeed(SeedFilled(2)).public_key;
    EXPECT_TRUE(ledger_.AddGenesisAsset(kAsset, owner_, 50).ok());
  }

  static ChainParams Params() {
    ChainParams p;
    p.chain_id = "BC1";
    p.block_interval = 10;
    p.confirmation_depth = 2;
    p.gateway_id = "G1";
    p.outbound_lock_ticks = 300;
    return p;
  }

  TxOutcome ApplyOne(TxBody body, Tick now) {
    LedgerTx tx;
    tx.body = std::move(body);
    tx.submitter = "test";
    return ledger_.Apply(tx, now);
  }

  const AssetState& StateOf(const crypto::Digest& id) {
    return ledger_.FindAsset(id)->state;
  }

  inline static const crypto::Digest kAsset = Filled(0xaa);
  Ledger ledger_;
  crypto::PublicKey owner_, other_;
};

TEST_F(LedgerTest, GenesisIsActiveAndUnique) {
  EXPECT_TRUE(std::holds_alternative<ActiveState>(StateOf(kAsset)));
  EXPECT_FALSE(ledger_.AddGenesisAsset(kAsset, owner_, 1).ok());
  ASSERT_EQ(ledger_.transitions().size(), 1u);
  EXPECT_EQ(ledger_.transitions()[0].from, "Absent");
  EXPECT_EQ(ledger_.transitions()[0].to, "Active");
}

TEST_F(LedgerTest, TransferOutLocksForTheDelegate) {
  auto o = ApplyOne(TransferOut{kAsset, "BC2", other_}, 100);
  ASSERT_TRUE(o.ok);
  const auto& lock = std::get<LockedState>(StateOf(kAsset));
  EXPECT_EQ(lock.holder, "G1");
  EXPECT_EQ(lock.kind, LockKind::kOutbound);
  EXPECT_EQ(lock.deadline, 400u);
  EXPECT_EQ(lock.dest_chain, "BC2");
  EXPECT_EQ(o.lock_deadline, 400u);
  EXPECT_FALSE(ApplyOne(TransferOut{kAsset, "BC2", other_}, 101).ok);
}

TEST_F(LedgerTest, UnlockOnlyFromLocked) {
  EXPECT_EQ(ApplyOne(Unlock{kAsset}, 1).failure, "asset not Locked");
  ASSERT_TRUE(ApplyOne(TransferOut{kAsset, "BC2", other_}, 1).ok);
  ASSERT_TRUE(ApplyOne(Unlock{kAsset}, 2).ok);
  EXPECT_TRUE(std::holds_alternative<ActiveState>(StateOf(kAsset)));
}

TEST_F(LedgerTest, InvalidateIsTerminalAndRedirects) {
  ASSERT_TRUE(ApplyOne(TransferOut{kAsset, "BC2", other_}, 1).ok);
  const auto txid1 = Filled(0x01), txid2 = Filled(0x02);
  ASSERT_TRUE(ApplyOne(Invalidate{kAsset, txid1, txid2, "BC2"}, 2).ok);
  const auto& inv = std::get<InvalidatedState>(StateOf(kAsset));
  EXPECT_EQ(inv.remote_chain, "BC2");
  EXPECT_EQ(inv.remote_public_id, txid2);

  auto q = ledger_.Query(txid1, Visibility::kOutside);
  EXPECT_EQ(q.kind, AssetStatus::Kind::kRedirect);
  EXPECT_EQ(q.chain, "BC2");
  EXPECT_EQ(q.remote_public_id, txid2);

  for (TxBody b : std::vector<TxBody>{Unlock{kAsset}, TransferOut{kAsset, "BC2", other_},
                                      Invalidate{kAsset, Filled(3), txid2, "BC2"},
                                      Rollback{kAsset}}) {
    EXPECT_FALSE(ApplyOne(b, 3).ok);
  }
  EXPECT_TRUE(std::holds_alternative<InvalidatedState>(StateOf(kAsset)));
}

TEST_F(LedgerTest, PrivateIdsResolveOnlyInside) {
  EXPECT_EQ(ledger_.Query(kAsset, Visibility::kInside).kind, AssetStatus::Kind::kActive);
  EXPECT_EQ(ledger_.Query(kAsset, Visibility::kOutside).kind, AssetStatus::Kind::kNotFound);
}

TEST_F(LedgerTest, RegisterCreatesInboundLockThenRollback) {
  Register r;
  r.private_id = Filled(0x50);
  r.masked_id = Filled(0x51);
  r.owner = other_;
  r.value = 50;
  r.lock_holder = "G1";
  r.grace_ticks = 30;
  r.origin = {"BC2", Filled(0x52)};
  auto o = ApplyOne(r, 100);
  ASSERT_TRUE(o.ok);
  // deadline = apply + confirmation latency (2 blocks * 10) + grace
  EXPECT_EQ(o.lock_deadline, 150u);
  EXPECT_EQ(ledger_.Query(r.masked_id, Visibility::kOutside).kind, AssetStatus::Kind::kLocked);
  EXPECT_EQ(ledger_.FindAsset(r.private_id)->origin->chain, "BC2");

  EXPECT_EQ(ApplyOne(Rollback{r.private_id}, 149).failure, "lock deadline not reached");
  ASSERT_TRUE(ApplyOne(Rollback{r.private_id}, 150).ok);
  EXPECT_EQ(ledger_.FindAsset(r.private_id), nullptr);
  EXPECT_EQ(ledger_.Query(r.masked_id, Visibility::kOutside).kind, AssetStatus::Kind::kNotFound);
  EXPECT_EQ(ledger_.transitions().back().to, "Absent");

  // Ids are never reused, even after a rollback.
  EXPECT_EQ(ApplyOne(r, 200).failure, "asset id already in use");
}

TEST_F(LedgerTest, RollbackNeedsInboundLock) {
  ASSERT_TRUE(ApplyOne(TransferOut{kAsset, "BC2", other_}, 1).ok);
  EXPECT_FALSE(ApplyOne(Rollback{kAsset}, 10000).ok);
}

TEST_F(LedgerTest, SubmitRejectsUnknownAssets) {
  LedgerTx tx;
  tx.body = Unlock{Filled(0x77)};
  EXPECT_FALSE(ledger_.Submit(tx).ok());
}

TEST_F(LedgerTest, BlocksChainAndConfirm) {
  LedgerTx tx;
  tx.body = TransferOut{kAsset, "BC2", other_};
  tx.submitter = "U1";
  auto id = ledger_.Submit(tx);
  ASSERT_TRUE(id.ok());
  const Block& b1 = ledger_.ProduceBlock(10);
  ASSERT_EQ(b1.outcomes.size(), 1u);
  EXPECT_TRUE(b1.outcomes[0].ok);
  EXPECT_EQ(ledger_.InclusionHeight(*id), 1u);
  EXPECT_FALSE(ledger_.IsConfirmed(*id));
  EXPECT_TRUE(ledger_.NewlyConfirmed().empty());

  const crypto::Digest d1 = ledger_.blocks()[0].Digest();
  ledger_.ProduceBlock(20);
  EXPECT_EQ(ledger_.blocks()[1].prev_digest, d1);
  EXPECT_FALSE(ledger_.IsConfirmed(*id));
  ledger_.ProduceBlock(30);
  EXPECT_TRUE(ledger_.IsConfirmed(*id));
  ASSERT_EQ(ledger_.NewlyConfirmed().size(), 1u);
  EXPECT_EQ(ledger_.NewlyConfirmed()[0].tx_id, *id);
}

TEST_F(LedgerTest, FailedTransactionsStayInTheBlock) {
  LedgerTx tx;
  tx.body = Unlock{kAsset};
  ASSERT_TRUE(ledger_.Submit(tx).ok());
  const Block& b = ledger_.ProduceBlock(10);
  ASSERT_EQ(b.outcomes.size(), 1u);
  EXPECT_FALSE(b.outcomes[0].ok);
  EXPECT_EQ(b.outcomes[0].failure, "asset not Locked");
}

TEST_F(LedgerTest, IdenticalTransactionsGetDistinctIds) {
  LedgerTx tx;
  tx.body = Unlock{kAsset};
  EXPECT_NE(ledger_.Submit(tx).value(), ledger_.Submit(tx).value());
}

TEST(MaskTxIdTest, MatchesOracleAndHidesPrivateId) {
  // H(08 | len "BC1" | len 22..22 | len 33..33), computed with Python hashlib.
  const auto masked = gateway::MaskTxId(Filled(0x22), "BC1", testing::NonceFilled(0x33));
  EXPECT_EQ(masked.hex(),
            "884d7d82e962c9bca58a290da30082598524d1458798466c45ce774b3d134903");
  EXPECT_NE(masked, Filled(0x22));
  EXPECT_NE(masked, gateway::MaskTxId(Filled(0x22), "BC1", testing::NonceFilled(0x34)));
  EXPECT_NE(masked, gateway::MaskTxId(Filled(0x22), "BC2", testing::NonceFilled(0x33)));
}

TEST(EventQueueTest, TickOrderThenSubmissionOrder) {
  EventQueue<int> q;
  q.Push(5, 1);
  q.Push(3, 2);
  q.Push(5, 3);
  q.Push(3, 4);
  EXPECT_EQ(q.NextTick(), 3u);
  auto first = q.PopNextTick();
  ASSERT_EQ(first.size(), 2u);
  EXPECT_EQ(first[0].payload, 2);
  EXPECT_EQ(first[1].payload, 4);
  auto second = q.PopNextTick();
  ASSERT_EQ(second.size(), 2u);
  EXPECT_EQ(second[0].payload, 1);
  EXPECT_EQ(second[1].payload, 3);
  EXPECT_TRUE(q.empty());
  EXPECT_FALSE(q.NextTick().has_value());
}

TEST(NetworkModelTest, DropDelayDuplicate) {
  NetworkModel net;
  net.SetDefault({2, 5, 0.0, 0.0});
  net.SetLink("a", "b", {1, 1, 1.0, 0.0});
  net.SetLink("a", "c", {3, 3, 0.0, 1.0});
  DeterministicRng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto d = net.Sample("x", "y", rng);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_GE(d[0], 2u);
    EXPECT_LE(d[0], 5u);
    EXPECT_TRUE(net.Sample("a", "b", rng).empty());
    EXPECT_EQ(net.Sample("a", "c", rng), (std::vector<Tick>{3, 3}));
  }
  EXPECT_EQ(net.Link("b", "a").delay_max, 5u);
}

TEST(NetworkModelTest, DropRateRoughlyMatches) {
  NetworkModel net;
  net.SetDefault({1, 1, 0.3, 0.0});
  DeterministicRng rng(99);
  int dropped = 0;
  for (int i = 0; i < 10000; ++i) dropped += net.Sample("a", "b", rng).empty();
  EXPECT_NEAR(dropped / 10000.0, 0.3, 0.02);
}

TEST(EventLogTest, FormatAndDigest) {
  EventLog log;
  log.Add(7, "BC1", "block", AsBytes("x"), "height=1");
  ASSERT_EQ(log.events().size(), 1u);
  const std::string line = EventLog::FormatLine(log.events()[0]);
  EXPECT_EQ(line.rfind("7\tBC1\tblock\t", 0), 0u);
  EXPECT_NE(line.find("\theight=1"), std::string::npos);
  EXPECT_EQ(log.Render(), line + "\n");

  EventLog same;
  same.Add(7, "BC1", "block", AsBytes("x"), "height=1");
  EXPECT_EQ(log.Digest(), same.Digest());
  same.Add(8, "BC1", "block", AsBytes("y"), "height=2");
  EXPECT_NE(log.Digest(), same.Digest());
}

}  // namespace
}  // namespace dtcb::ledger
