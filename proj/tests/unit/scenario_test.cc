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

#include <string>

#include "dtcb/scenario/config.h"
#include "dtcb/scenario/world.h"
#include "fixtures.h"

namespace dtcb::scenario {
namespace {

std::string Path(const std::string& name) {
  return std::string(DTCB_SCENARIO_DIR) + "/" + name;
}

RunReport RunFile(const std::string& name) {
  auto config = LoadConfig(Path(name));
  EXPECT_TRUE(config.ok()) << config.status();
  auto report = RunScenario(*config);
  EXPECT_TRUE(report.ok()) << report.status();
  return *report;
}

const AssetLine* Find(const RunReport& r, const std::string& chain,
                      const std::string& label) {
  for (const auto& c : r.chains) {
    if (c.chain_id != chain) continue;
    for (const auto& a : c.assets) {
      if (a.label == label) return &a;
    }
  }
  return nullptr;
}

const ChainReport& Chain(const RunReport& r, const std::string& id) {
  for (const auto& c : r.chains) {
    if (c.chain_id == id) return c;
  }
  ADD_FAILURE() << "no chain " << id;
  return r.chains.front();
}

constexpr char kMinimal[] = R"({
  "seed": 1,
  "users": [{"name": "U1"}],
  "chains": [
    {"chain_id": "BC1", "delegate": "G1"},
    {"chain_id": "BC1", "delegate": "G1"}
  ]
})";

TEST(ConfigTest, ErrorsCarryTheLine) {
  auto c = ParseConfig(kMinimal);
  ASSERT_FALSE(c.ok());
  EXPECT_EQ(std::string(c.status().message()),
            "line 6: duplicate chain_id \"BC1\"");

  auto broken = ParseConfig("{\n  \"seed\": 1,\n  \"users\": [\n");
  ASSERT_FALSE(broken.ok());
  EXPECT_NE(std::string(broken.status().message()).find("malformed JSON"),
            std::string::npos);

  auto bad_hex = ParseConfig(R"({"seed": 1,
    "users": [{"name": "U1", "seed": "zz"}]})");
  ASSERT_FALSE(bad_hex.ok());
  EXPECT_EQ(std::string(bad_hex.status().message()).rfind("line 2:", 0), 0u)
      << bad_hex.status();
}

TEST(ConfigTest, BundledScenariosParse) {
  for (const char* name : {"s1_happy_path.json", "s2_noncompliant_peer.json",
                           "s3_message_loss.json", "hazard_delayed_assertion.json"}) {
    auto c = LoadConfig(Path(name));
    ASSERT_TRUE(c.ok()) << name << ": " << c.status();
    EXPECT_TRUE(ValidateConfig(*c).ok());
  }
  EXPECT_FALSE(LoadConfig(Path("does_not_exist.json")).ok());
}

TEST(ConfigTest, ValidateCatchesEditedConfigs) {
  ScenarioConfig c = testing::TwoChainConfig(1);
  EXPECT_TRUE(ValidateConfig(c).ok());
  c.chains[1].delegate = "G9";
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = testing::TwoChainConfig(1);
  c.script[0].to_owner = "nobody";
  EXPECT_FALSE(ValidateConfig(c).ok());
  c = testing::TwoChainConfig(1);
  c.nodes[0].layers.erase(c.nodes[0].layers.begin() + 1);
  EXPECT_FALSE(World::Build(c).ok());
}

TEST(ConfigTest, MeasurementsBothShapes) {
  auto a = ParseMeasurements(
      R"([{"layer_index": 0, "code_digest": ")" + std::string(64, '0') + "\"}]");
  ASSERT_TRUE(a.ok()) << a.status();
  auto b = ParseMeasurements(R"({"layers": [{"layer_index": 0, "code_digest": ")" +
                             std::string(64, '0') + "\"}]}");
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_EQ(a->size(), 1u);
  EXPECT_EQ(b->size(), 1u);
  EXPECT_FALSE(ParseMeasurements(R"([{"layer_index": 0, "code_digest": "00"}])").ok());
}

TEST(ScenarioTest, HappyPathMovesTheAsset) {
  RunReport r = RunFile("s1_happy_path.json");
  EXPECT_TRUE(r.Passed());
  EXPECT_TRUE(r.quiescent);
  EXPECT_TRUE(r.hazards.empty());

  const AssetLine* a1 = Find(r, "BC1", "A1");
  ASSERT_NE(a1, nullptr);
  EXPECT_EQ(a1->state, "Invalidated");
  EXPECT_EQ(a1->redirect_chain, "BC2");

  const ChainReport& bc2 = Chain(r, "BC2");
  ASSERT_EQ(bc2.assets.size(), 1u);
  EXPECT_EQ(bc2.assets[0].state, "Active");
  EXPECT_EQ(bc2.assets[0].owner, "U2");
  EXPECT_EQ(bc2.assets[0].value, 100u);
  EXPECT_EQ(a1->redirect_id, bc2.assets[0].public_id);

  ASSERT_EQ(r.transfers.size(), 1u);
  EXPECT_EQ(r.transfers[0].source_phase, "Done");
  EXPECT_EQ(r.transfers[0].dest_phase, "Done");
}

TEST(ScenarioTest, ReplayIsBitIdentical) {
  RunReport a = RunFile("s1_happy_path.json");
  RunReport b = RunFile("s1_happy_path.json");
  EXPECT_EQ(a.log_digest, b.log_digest);
  EXPECT_EQ(a.ToJson(), b.ToJson());

  auto config = LoadConfig(Path("s1_happy_path.json"));
  ASSERT_TRUE(config.ok());
  config->seed += 1;
  auto c = RunScenario(*config);
  ASSERT_TRUE(c.ok());
  EXPECT_NE(c->log_digest, a.log_digest);
}

TEST(ScenarioTest, FixtureMatchesTheBundledFile) {
  auto r = RunScenario(testing::TwoChainConfig(20260101));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->log_digest, RunFile("s1_happy_path.json").log_digest);
}

TEST(ScenarioTest, NoncompliantPeerNeverRegisters) {
  RunReport r = RunFile("s2_noncompliant_peer.json");
  EXPECT_TRUE(r.Passed());
  EXPECT_EQ(r.counters["register_submissions_BC2"], 0u);
  EXPECT_TRUE(Chain(r, "BC2").assets.empty());
  const AssetLine* a1 = Find(r, "BC1", "A1");
  ASSERT_NE(a1, nullptr);
  EXPECT_EQ(a1->state, "Active");
  EXPECT_EQ(a1->owner, "U1");
}

TEST(ScenarioTest, LostRepliesAbortAndUnlock) {
  RunReport r = RunFile("s3_message_loss.json");
  EXPECT_TRUE(r.Passed());
  EXPECT_GT(r.counters["messages_dropped"], 0u);
  EXPECT_TRUE(Chain(r, "BC2").assets.empty());
  const AssetLine* a1 = Find(r, "BC1", "A1");
  ASSERT_NE(a1, nullptr);
  EXPECT_EQ(a1->state, "Active");
  ASSERT_EQ(r.transfers.size(), 1u);
  EXPECT_EQ(r.transfers[0].source_phase, "Aborted");
}

TEST(ScenarioTest, DelayedAssertionIsReportedAsHazard) {
  RunReport r = RunFile("hazard_delayed_assertion.json");
  EXPECT_FALSE(r.Passed());
  EXPECT_FALSE(r.hazards.empty());
  ASSERT_NE(r.Verdict("exclusivity"), nullptr);
  EXPECT_TRUE(r.Verdict("exclusivity")->pass);
  ASSERT_NE(r.Verdict("no_loss"), nullptr);
  EXPECT_FALSE(r.Verdict("no_loss")->pass);
  EXPECT_TRUE(r.Verdict("trust_gate")->pass);
}

TEST(ScenarioTest, PermanentCrashOfThePeerIsSafe) {
  ScenarioConfig c = testing::TwoChainConfig(9);
  ScriptAction crash;
  crash.tick = 0;
  crash.kind = ScriptAction::Kind::kCrash;
  crash.node = "G2";
  c.script.insert(c.script.begin(), crash);
  auto r = RunScenario(c);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->Verdict("exclusivity")->pass);
  EXPECT_TRUE(r->Verdict("trust_gate")->pass);
  EXPECT_TRUE(Chain(*r, "BC2").assets.empty());
  EXPECT_EQ(Find(*r, "BC1", "A1")->state, "Active");
}

TEST(ScenarioTest, ReportAndLogCarryNoSecrets) {
  ScenarioConfig c = testing::TwoChainConfig(20260101);
  auto world = World::Build(c);
  ASSERT_TRUE(world.ok());
  RunReport r = (*world)->Run();
  const std::string json = r.ToJson();
  const std::string log = (*world)->log().Render();
  for (const auto& n : c.nodes) {
    EXPECT_EQ(json.find(n.uds.hex()), std::string::npos);
    EXPECT_EQ(log.find(n.uds.hex()), std::string::npos);
  }
  for (const auto& u : c.users) {
    EXPECT_EQ(json.find(u.seed.hex()), std::string::npos);
    EXPECT_EQ(log.find(u.seed.hex()), std::string::npos);
  }
  EXPECT_EQ(json.find("uds"), std::string::npos);
}

TEST(ScenarioTest, BatchKeepsInputOrder) {
  std::vector<ScenarioConfig> configs;
  for (uint64_t s = 1; s <= 6; ++s) configs.push_back(testing::TwoChainConfig(s));
  auto batch = RunBatch(configs, 3);
  ASSERT_EQ(batch.size(), configs.size());
  for (size_t i = 0; i < configs.size(); ++i) {
    ASSERT_TRUE(batch[i].ok());
    EXPECT_EQ(batch[i]->seed, configs[i].seed);
    EXPECT_EQ(batch[i]->log_digest, RunScenario(configs[i])->log_digest);
  }
}

}  // namespace
}  // namespace dtcb::scenario
