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

#ifndef DTCB_TESTS_SUPPORT_FIXTURES_H_
#define DTCB_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dtcb/attestation/manifest.h"
#include "dtcb/attestation/registers.h"
#include "dtcb/dice/identity.h"
#include "dtcb/gateway/quorum.h"
#include "dtcb/gateway/trust.h"
#include "dtcb/ledger/scheduler.h"
#include "dtcb/scenario/config.h"

namespace dtcb::testing {

crypto::Digest Filled(uint8_t b);
crypto::Seed SeedFilled(uint8_t b);
crypto::Nonce NonceFilled(uint8_t b);

// Three-layer chain (boot-rom, firmware, gateway-os) whose digests are
// derived from `tag`.
std::vector<dice::LayerMeasurement> StandardLayers(uint8_t tag,
                                                   uint64_t os_svn = 3);

std::vector<dice::LayerMeasurement> RandomLayers(ledger::DeterministicRng& rng,
                                                 size_t count);

// Components matching StandardPolicy's requirements.
std::vector<attestation::ManifestEntry> StandardComponents(
    uint8_t tag, uint64_t firmware_svn = 2);

struct Group {
  crypto::KeyPair authority;
  gateway::PeeringPolicy policy;
};

// Requires firmware >= 2, gateway-os >= 3; quote age window 200.
Group StandardGroup();

// A gateway enrolled in `group`, with registers extended from its layers.
gateway::GatewayCredentials MakeGateway(
    const std::string& node_id, uint8_t tag, const Group& group,
    std::vector<attestation::ManifestEntry> components);
gateway::GatewayCredentials MakeGateway(const std::string& node_id,
                                        uint8_t tag, const Group& group);

// Two chains BC1 -> BC2 with delegates G1 / G2, users U1 / U2 and asset A1
// owned by U1, transferred to U2 at tick 5. Same content as the bundled
// happy-path scenario.
scenario::ScenarioConfig TwoChainConfig(uint64_t seed);

}  // namespace dtcb::testing

#endif  // DTCB_TESTS_SUPPORT_FIXTURES_H_
