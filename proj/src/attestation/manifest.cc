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

#include "dtcb/attestation/manifest.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "dtcb/crypto/canonical.h"

namespace dtcb::attestation {
namespace {

using crypto::CanonicalReader;
using crypto::CanonicalWriter;

constexpr uint64_t kMaxEntries = 1024;

bool StrictlySorted(const std::vector<ManifestEntry>& entries) {
  return std::adjacent_find(entries.begin(), entries.end(),
                            [](const ManifestEntry& a, const ManifestEntry& b) {
                              return a.component_name >= b.component_name;
                            }) == entries.end();
}

void WriteBody(const Manifest& m, CanonicalWriter& w) {
  w.Put(m.node_id);
  w.PutU64(m.entries.size());
  for (const auto& e : m.entries) {
    w.PutString(e.component_name)
        .PutString(e.version)
        .PutU64(e.svn)
        .Put(e.code_digest);
  }
}

}  // namespace

Bytes Manifest::SignedPayload() const {
  CanonicalWriter w(crypto::Tag::kManifest);
  WriteBody(*this, w);
  return w.Take();
}

Bytes Manifest::Serialize() const {
  CanonicalWriter w(crypto::Tag::kManifest);
  WriteBody(*this, w);
  w.Put(signature);
  return w.Take();
}

absl::StatusOr<Manifest> Manifest::Parse(ByteView bytes) {
  CanonicalReader r(bytes);
  if (auto s = r.ExpectTag(crypto::Tag::kManifest); !s.ok()) return s;
  Manifest m;
  auto node = r.GetFixed<crypto::PublicKey>();
  if (!node.ok()) return node.status();
  m.node_id = *node;
  auto count = r.GetU64();
  if (!count.ok()) return count.status();
  if (*count > kMaxEntries) {
    return absl::InvalidArgumentError("manifest: too many entries");
  }
  for (uint64_t i = 0; i < *count; ++i) {
    ManifestEntry e;
    auto name = r.GetString();
    if (!name.ok()) return name.status();
    auto version = r.GetString();
    if (!version.ok()) return version.status();
    auto svn = r.GetU64();
    if (!svn.ok()) return svn.status();
    auto digest = r.GetFixed<crypto::Digest>();
    if (!digest.ok()) return digest.status();
    e.component_name = std::move(*name);
    e.version = std::move(*version);
    e.svn = *svn;
    e.code_digest = *digest;
    m.entries.push_back(std::move(e));
  }
  auto sig = r.GetFixed<crypto::Signature>();
  if (!sig.ok()) return sig.status();
  m.signature = *sig;
  if (auto s = r.Finish(); !s.ok()) return s;
  return m;
}

absl::StatusOr<Manifest> CreateManifest(const dice::DeviceIdentity& identity,
                                        std::vector<ManifestEntry> components) {
  if (components.empty()) {
    return absl::InvalidArgumentError("manifest: no components");
  }
  auto alias = identity.top_alias();
  if (!alias.has_value()) {
    return absl::FailedPreconditionError(
        "manifest: no signing key (chain has no alias layer)");
  }
  std::sort(components.begin(), components.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.component_name < b.component_name;
            });
  if (!StrictlySorted(components)) {
    return absl::InvalidArgumentError("manifest: duplicate component name");
  }
  Manifest m;
  m.node_id = alias->public_key;
  m.entries = std::move(components);
  m.signature = crypto::Sign(alias->secret_key, m.SignedPayload());
  return m;
}

Verdict VerifyManifest(const Manifest& manifest,
                       const crypto::PublicKey& signer_key) {
  if (manifest.node_id != signer_key) {
    return Verdict::Reject("unexpected signer");
  }
  if (manifest.entries.empty() || !StrictlySorted(manifest.entries)) {
    return Verdict::Reject("non-canonical");
  }
  if (!crypto::Verify(signer_key, manifest.SignedPayload(),
                      manifest.signature.view())) {
    return Verdict::Reject("bad signature");
  }
  return Verdict::Accept();
}

}  // namespace dtcb::attestation
