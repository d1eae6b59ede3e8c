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

#ifndef DTCB_ATTESTATION_MANIFEST_H_
#define DTCB_ATTESTATION_MANIFEST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/dice/identity.h"
#include "dtcb/verdict.h"

namespace dtcb::attestation {

struct ManifestEntry {
  std::string component_name;
  std::string version;
  uint64_t svn = 0;
  crypto::Digest code_digest;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Signed inventory of a node's hardware, firmware and software. `node_id` is
// the signing AliasID public key; entries are strictly sorted by name.
struct Manifest {
  crypto::PublicKey node_id;
  std::vector<ManifestEntry> entries;
  crypto::Signature signature;

  // 0x06 | node_id | entries
  Bytes SignedPayload() const;
  Bytes Serialize() const;
  static absl::StatusOr<Manifest> Parse(ByteView bytes);
};

// Sorts `components` and signs with the identity's topmost AliasID. Fails on
// an empty list, a duplicate component name, or an identity without an alias
// layer.
absl::StatusOr<Manifest> CreateManifest(const dice::DeviceIdentity& identity,
                                        std::vector<ManifestEntry> components);

// Rejections: "unexpected signer", "non-canonical", "bad signature".
Verdict VerifyManifest(const Manifest& manifest,
                       const crypto::PublicKey& signer_key);

}  // namespace dtcb::attestation

#endif  // DTCB_ATTESTATION_MANIFEST_H_
