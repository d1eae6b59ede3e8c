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

#ifndef DTCB_DICE_IDENTITY_H_
#define DTCB_DICE_IDENTITY_H_

// Layered device identity.
//
//   Layer -1 (hardware):  UDS
//   Layer  0:             CDI        = HMAC(UDS, 0x01 | FMC)
//                         DeviceID   = Ed25519(seed = H(0x03 | CDI))
//                         secret[0]  = HMAC(CDI, 0x02 | measurement[0])
//   Layer  n >= 1:        secret[n]  = HMAC(secret[n-1], 0x02 | measurement[n])
//                         AliasID[n] = Ed25519(seed = H(0x04 | secret[n]))
//
// Each layer secret is the previous-context value inherited by the next
// layer, so it carries platform uniqueness (UDS), layer uniqueness (the
// measurement) and layer order.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/canonical.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/verdict.h"

namespace dtcb::dice {

inline constexpr size_t kMaxChainDepth = 16;

// What a layer is measured as: FMC for layer 0, FSD for layer 1, the current
// TCB context in general.
struct LayerMeasurement {
  uint64_t layer_index = 0;
  crypto::Digest code_digest;
  std::string product_id;
  uint64_t svn = 0;

  void AppendTo(crypto::CanonicalWriter& w) const;
  static absl::StatusOr<LayerMeasurement> ReadFrom(crypto::CanonicalReader& r);

  friend bool operator==(const LayerMeasurement&,
                         const LayerMeasurement&) = default;
};

crypto::Digest DeriveCdi(const crypto::Seed& uds, const crypto::Digest& fmc);

crypto::KeyPair DeriveDeviceId(const crypto::Digest& cdi);

// `expected_index` is the index the chain requires at this position; any
// other value in `measurement` is a chain gap.
absl::StatusOr<crypto::Digest> DeriveLayerSecret(
    const crypto::Digest& prev_secret, uint64_t expected_index,
    const LayerMeasurement& measurement);

crypto::KeyPair DeriveAliasId(const crypto::Digest& layer_secret);

// The part of a DeviceIdentity that may leave the device.
struct PublicChain {
  crypto::PublicKey device_id;
  std::vector<crypto::PublicKey> alias_ids;
  std::vector<LayerMeasurement> measurements;

  Bytes Serialize() const;
  static absl::StatusOr<PublicChain> Parse(ByteView bytes);
  crypto::Digest Digest() const { return crypto::Hash(Serialize()); }

  // Topmost alias key, or the DeviceID for a single-layer chain.
  const crypto::PublicKey& top_key() const {
    return alias_ids.empty() ? device_id : alias_ids.back();
  }

  friend bool operator==(const PublicChain&, const PublicChain&) = default;
};

class DeviceIdentity {
 public:
  const crypto::Seed& uds() const { return uds_; }
  const crypto::Digest& cdi() const { return cdi_; }
  const std::vector<crypto::Digest>& layer_secrets() const {
    return layer_secrets_;
  }
  const crypto::KeyPair& device_id() const { return device_id_; }
  // alias_ids()[k] belongs to layer k + 1.
  const std::vector<crypto::KeyPair>& alias_ids() const { return alias_ids_; }
  const std::vector<LayerMeasurement>& chain() const { return chain_; }

  // Topmost AliasID; nullopt for a chain with only layer 0.
  std::optional<crypto::KeyPair> top_alias() const {
    if (alias_ids_.empty()) return std::nullopt;
    return alias_ids_.back();
  }

  PublicChain public_chain() const;

 private:
  friend absl::StatusOr<DeviceIdentity> BuildChain(
      const crypto::Seed& uds, std::span<const LayerMeasurement> measurements);

  crypto::Seed uds_;
  crypto::Digest cdi_;
  std::vector<crypto::Digest> layer_secrets_;
  crypto::KeyPair device_id_;
  std::vector<crypto::KeyPair> alias_ids_;
  std::vector<LayerMeasurement> chain_;
};

// Measurements must be ordered by layer_index starting at 0 with no gaps or
// duplicates, and at most kMaxChainDepth long.
absl::StatusOr<DeviceIdentity> BuildChain(
    const crypto::Seed& uds, std::span<const LayerMeasurement> measurements);

// Highest SVN ever accepted per (layer, product).
class SvnRecord {
 public:
  std::optional<uint64_t> Get(uint64_t layer_index,
                              const std::string& product_id) const;
  void Raise(uint64_t layer_index, const std::string& product_id,
             uint64_t svn);

 private:
  std::map<std::pair<uint64_t, std::string>, uint64_t> highest_;
};

// Accepts iff measurement.svn >= the recorded value, and then raises the
// record. Rejections leave the record untouched.
Verdict CheckSvn(SvnRecord& record, const LayerMeasurement& measurement);

}  // namespace dtcb::dice

#endif  // DTCB_DICE_IDENTITY_H_
