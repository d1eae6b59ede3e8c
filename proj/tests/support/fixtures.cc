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

#include "fixtures.h"

#include <stdexcept>

namespace dtcb::testing {

crypto::Digest Filled(uint8_t b) {
  std::array<uint8_t, 32> a;
  a.fill(b);
  return crypto::Digest(a);
}

crypto::Seed SeedFilled(uint8_t b) { return crypto::SeedFromDigest(Filled(b)); }

crypto::Nonce NonceFilled(uint8_t b) { return crypto::Nonce(Filled(b).array()); }

std::vector<dice::LayerMeasurement> StandardLayers(uint8_t tag,
                                                   uint64_t os_svn) {
  return {
      {0, Filled(tag), "boot-rom", 1},
      {1, Filled(tag + 1), "firmware", 2},
      {2, Filled(tag + 2), "gateway-os", os_svn},
  };
}

std::vector<dice::LayerMeasurement> RandomLayers(ledger::DeterministicRng& rng,
                                                 size_t count) {
  std::vector<dice::LayerMeasurement> out;
  for (size_t i = 0; i < count; ++i) {
    out.push_back({i, rng.Fill<crypto::Digest>(),
                   "product-" + std::to_string(rng.Uniform(0, 999)),
                   rng.Uniform(0, 1000)});
  }
  return out;
}

std::vector<attestation::ManifestEntry> StandardComponents(
    uint8_t tag, uint64_t firmware_svn) {
  return {
      {"firmware", "2.1.0", firmware_svn, Filled(tag + 1)},
      {"gateway-os", "5.4.2", 3, Filled(tag + 2)},
      {"interop-agent", "1.0.0", 1, Filled(tag + 3)},
  };
}

Group StandardGroup() {
  Group g;
  g.authority = crypto::KeypairFromSeed(SeedFilled(0xa0));
  g.policy.dtcb.required_components = {{"firmware", 2, std::nullopt},
                                       {"gateway-os", 3, std::nullopt}};
  g.policy.dtcb.max_quote_age_ticks = 200;
  g.policy.dtcb.group_authority_key = g.authority.public_key;
  g.policy.group_id = "interop-gateways";
  return g;
}

gateway::GatewayCredentials MakeGateway(
    const std::string& node_id, uint8_t tag, const Group& group,
    std::vector<attestation::ManifestEntry> components) {
  const auto layers = StandardLayers(tag);
  auto identity = dice::BuildChain(SeedFilled(tag ^ 0x5a), layers);
  if (!identity.ok()) throw std::runtime_error("fixture chain");
  gateway::GatewayCredentials c;
  c.node_id = node_id;
  for (const auto& m : layers) {
    if (!c.registers.Extend(m.layer_index, m.code_digest).ok()) {
      throw std::runtime_error("fixture registers");
    }
  }
  auto manifest = attestation::CreateManifest(*identity, std::move(components));
  if (!manifest.ok()) throw std::runtime_error("fixture manifest");
  c.manifest = *manifest;
  c.pseudonym = crypto::KeypairFromSeed(SeedFilled(tag ^ 0xc3));
  auto membership = attestation::IssueMembership(
      group.authority, c.pseudonym->public_key, group.policy.group_id,
      identity->device_id().public_key);
  if (!membership.ok()) throw std::runtime_error("fixture membership");
  c.membership = *membership;
  c.identity = std::move(*identity);
  return c;
}

gateway::GatewayCredentials MakeGateway(const std::string& node_id,
                                        uint8_t tag, const Group& group) {
  return MakeGateway(node_id, tag, group, StandardComponents(tag));
}

scenario::ScenarioConfig TwoChainConfig(uint64_t seed) {
  scenario::ScenarioConfig c;
  c.seed = seed;
  c.tick_limit = 5000;
  c.group = "interop-gateways";
  for (const char* name : {"U1", "U2"}) {
    c.users.push_back({name, crypto::SeedFromDigest(crypto::Hash(
                                 AsBytes(std::string("user:") + name)))});
  }
  c.chains.push_back({"BC1", 10, 2, "G1", {{"A1", "U1", 100}}});
  c.chains.push_back({"BC2", 10, 2, "G2", {}});
  scenario::NodeConfig g1;
  g1.node_id = "G1";
  g1.chain_id = "BC1";
  g1.uds = SeedFilled(0xa1);
  g1.gateway = true;
  g1.layers = StandardLayers(0x10);
  g1.components = StandardComponents(0x10);
  scenario::NodeConfig g2 = g1;
  g2.node_id = "G2";
  g2.chain_id = "BC2";
  g2.uds = SeedFilled(0xb2);
  g2.layers = StandardLayers(0x20);
  g2.components = StandardComponents(0x20);
  c.nodes = {g1, g2};
  c.policy.required_components = {{"firmware", 2, std::nullopt},
                                  {"gateway-os", 3, std::nullopt},
                                  {"interop-agent", 1, std::nullopt}};
  c.policy.max_quote_age_ticks = 200;
  c.policy.grace_blocks = 5;
  c.default_link = {1, 4, 0.0, 0.0};
  scenario::ScriptAction t;
  t.tick = 5;
  t.kind = scenario::ScriptAction::Kind::kTransfer;
  t.chain = "BC1";
  t.asset = "A1";
  t.to_chain = "BC2";
  t.to_owner = "U2";
  c.script.push_back(t);
  return c;
}

}  // namespace dtcb::testing
