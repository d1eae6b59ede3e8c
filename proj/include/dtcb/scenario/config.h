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

#ifndef DTCB_SCENARIO_CONFIG_H_
#define DTCB_SCENARIO_CONFIG_H_

// Declarative scenario files (JSON). All byte fields are hex. Errors carry
// the line of the offending value: "line 12: duplicate chain_id \"BC1\"".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/attestation/manifest.h"
#include "dtcb/attestation/policy.h"
#include "dtcb/attestation/quote.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/ledger/scheduler.h"

namespace dtcb::scenario {

using ledger::Tick;

inline constexpr Tick kDefaultTickLimit = 100000;

struct AssetConfig {
  std::string label;
  std::string owner;  // user name
  uint64_t value = 0;
};

struct ChainConfig {
  std::string chain_id;
  Tick block_interval = 10;
  uint64_t confirmation_depth = 0;
  // Gateway node holding the chain's delegated authority.
  std::string delegate;
  std::vector<AssetConfig> assets;
};

struct UserConfig {
  std::string name;
  crypto::Seed seed;
};

struct NodeConfig {
  std::string node_id;
  std::string chain_id;
  crypto::Seed uds;
  bool gateway = false;
  bool member = true;
  attestation::Capabilities caps;
  std::vector<dice::LayerMeasurement> layers;
  std::vector<attestation::ManifestEntry> components;
};

struct PolicyConfig {
  std::vector<attestation::RequiredComponent> required_components;
  uint64_t max_quote_age_ticks = 1000;
  size_t quorum_m = 1;
  size_t quorum_n = 1;
  uint64_t sensitive_threshold = UINT64_MAX;
  uint64_t grace_blocks = 10;
};

struct LinkConfig {
  std::string from;
  std::string to;
  ledger::LinkParams params;
};

struct ScriptAction {
  enum class Kind { kTransfer, kCrash, kCorruptNextMessage, kSetLink };
  Tick tick = 0;
  Kind kind = Kind::kTransfer;
  // Transfer.
  std::string chain;
  std::string asset;
  std::string to_chain;
  std::string to_owner;
  // Crash / corrupt: the node. Crash without a duration is permanent.
  std::string node;
  std::optional<Tick> duration;
  // SetLink.
  std::optional<LinkConfig> link;
  // Line in the source file, for diagnostics.
  int line = 0;
};

struct ScenarioConfig {
  uint64_t seed = 0;
  Tick tick_limit = kDefaultTickLimit;
  std::string group = "gateways";
  std::vector<UserConfig> users;
  std::vector<ChainConfig> chains;
  std::vector<NodeConfig> nodes;
  PolicyConfig policy;
  ledger::LinkParams default_link;
  std::vector<LinkConfig> links;
  std::vector<ScriptAction> script;
};

// Parses and validates.
absl::StatusOr<ScenarioConfig> ParseConfig(std::string_view text);
absl::StatusOr<ScenarioConfig> LoadConfig(const std::string& path);

// Structural checks that do not need line numbers; ParseConfig runs the
// line-aware equivalent. Useful after editing a parsed config in code.
absl::Status ValidateConfig(const ScenarioConfig& config);

// Layer list as used by scenario nodes and `sim derive`: either a JSON array
// of layer objects or an object with a "layers" array.
absl::StatusOr<std::vector<dice::LayerMeasurement>> ParseMeasurements(
    std::string_view text);

}  // namespace dtcb::scenario

#endif  // DTCB_SCENARIO_CONFIG_H_
