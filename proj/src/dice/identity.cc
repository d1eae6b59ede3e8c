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

#include "dtcb/dice/identity.h"

#include "absl/strings/str_cat.h"

namespace dtcb::dice {

using crypto::CanonicalReader;
using crypto::CanonicalWriter;
using crypto::Digest;
using crypto::KeyPair;
using crypto::Tag;

void LayerMeasurement::AppendTo(CanonicalWriter& w) const {
  w.PutU64(layer_index).Put(code_digest).PutString(product_id).PutU64(svn);
}

absl::StatusOr<LayerMeasurement> LayerMeasurement::ReadFrom(
    CanonicalReader& r) {
  LayerMeasurement m;
  auto index = r.GetU64();
  if (!index.ok()) return index.status();
  auto digest = r.GetFixed<Digest>();
  if (!digest.ok()) return digest.status();
  auto product = r.GetString();
  if (!product.ok()) return product.status();
  auto svn = r.GetU64();
  if (!svn.ok()) return svn.status();
  m.layer_index = *index;
  m.code_digest = *digest;
  m.product_id = std::move(*product);
  m.svn = *svn;
  return m;
}

Digest DeriveCdi(const crypto::Seed& uds, const Digest& fmc) {
  CanonicalWriter w(Tag::kCdi);
  w.Put(fmc);
  return crypto::KeyedOwf(uds, w.bytes());
}

KeyPair DeriveDeviceId(const Digest& cdi) {
  CanonicalWriter w(Tag::kDeviceIdSeed);
  w.Put(cdi);
  return crypto::KeypairFromSeed(crypto::SeedFromDigest(crypto::Hash(w.bytes())));
}

absl::StatusOr<Digest> DeriveLayerSecret(const Digest& prev_secret,
                                         uint64_t expected_index,
                                         const LayerMeasurement& measurement) {
  if (measurement.layer_index != expected_index) {
    return absl::FailedPreconditionError(
        absl::StrCat("chain gap: expected layer ", expected_index, ", got ",
                     measurement.layer_index));
  }
  CanonicalWriter w(Tag::kLayerSecret);
  measurement.AppendTo(w);
  return crypto::KeyedOwf(prev_secret, w.bytes());
}

KeyPair DeriveAliasId(const Digest& layer_secret) {
  CanonicalWriter w(Tag::kAliasIdSeed);
  w.Put(layer_secret);
  return crypto::KeypairFromSeed(crypto::SeedFromDigest(crypto::Hash(w.bytes())));
}

Bytes PublicChain::Serialize() const {
  CanonicalWriter w(Tag::kPublicChain);
  w.Put(device_id);
  w.PutU64(alias_ids.size());
  for (const auto& key : alias_ids) w.Put(key);
  w.PutU64(measurements.size());
  for (const auto& m : measurements) m.AppendTo(w);
  return w.Take();
}

absl::StatusOr<PublicChain> PublicChain::Parse(ByteView bytes) {
  CanonicalReader r(bytes);
  if (auto s = r.ExpectTag(Tag::kPublicChain); !s.ok()) return s;
  PublicChain chain;
  auto device = r.GetFixed<crypto::PublicKey>();
  if (!device.ok()) return device.status();
  chain.device_id = *device;
  auto alias_count = r.GetU64();
  if (!alias_count.ok()) return alias_count.status();
  if (*alias_count >= kMaxChainDepth) {
    return absl::InvalidArgumentError("public chain: too many aliases");
  }
  for (uint64_t i = 0; i < *alias_count; ++i) {
    auto key = r.GetFixed<crypto::PublicKey>();
    if (!key.ok()) return key.status();
    chain.alias_ids.push_back(*key);
  }
  auto count = r.GetU64();
  if (!count.ok()) return count.status();
  if (*count > kMaxChainDepth) {
    return absl::InvalidArgumentError("public chain: too many layers");
  }
  for (uint64_t i = 0; i < *count; ++i) {
    auto m = LayerMeasurement::ReadFrom(r);
    if (!m.ok()) return m.status();
    chain.measurements.push_back(std::move(*m));
  }
  if (auto s = r.Finish(); !s.ok()) return s;
  if (chain.measurements.size() != chain.alias_ids.size() + 1) {
    return absl::InvalidArgumentError(
        "public chain: alias count does not match layer count");
  }
  return chain;
}

PublicChain DeviceIdentity::public_chain() const {
  PublicChain out;
  out.device_id = device_id_.public_key;
  for (const auto& alias : alias_ids_) out.alias_ids.push_back(alias.public_key);
  out.measurements = chain_;
  return out;
}

absl::StatusOr<DeviceIdentity> BuildChain(
    const crypto::Seed& uds, std::span<const LayerMeasurement> measurements) {
  if (measurements.empty()) {
    return absl::InvalidArgumentError("chain structure: no layers");
  }
  if (measurements.size() > kMaxChainDepth) {
    return absl::InvalidArgumentError(absl::StrCat(
        "chain structure: ", measurements.size(), " layers exceeds the cap of ",
        kMaxChainDepth));
  }
  for (size_t i = 0; i < measurements.size(); ++i) {
    if (measurements[i].layer_index == i) continue;
    if (i > 0 && measurements[i].layer_index == measurements[i - 1].layer_index) {
      return absl::InvalidArgumentError(absl::StrCat(
          "chain structure: duplicate layer ", measurements[i].layer_index));
    }
    return absl::InvalidArgumentError(
        absl::StrCat("chain gap: expected layer ", i, ", got ",
                     measurements[i].layer_index));
  }

  DeviceIdentity id;
  id.uds_ = uds;
  id.cdi_ = DeriveCdi(uds, measurements[0].code_digest);
  id.device_id_ = DeriveDeviceId(id.cdi_);
  Digest prev = id.cdi_;
  for (size_t i = 0; i < measurements.size(); ++i) {
    auto secret = DeriveLayerSecret(prev, i, measurements[i]);
    if (!secret.ok()) return secret.status();
    id.layer_secrets_.push_back(*secret);
    if (i > 0) id.alias_ids_.push_back(DeriveAliasId(*secret));
    prev = *secret;
  }
  id.chain_.assign(measurements.begin(), measurements.end());
  return id;
}

std::optional<uint64_t> SvnRecord::Get(uint64_t layer_index,
                                       const std::string& product_id) const {
  auto it = highest_.find({layer_index, product_id});
  if (it == highest_.end()) return std::nullopt;
  return it->second;
}

void SvnRecord::Raise(uint64_t layer_index, const std::string& product_id,
                      uint64_t svn) {
  auto [it, inserted] = highest_.try_emplace({layer_index, product_id}, svn);
  if (!inserted && svn > it->second) it->second = svn;
}

Verdict CheckSvn(SvnRecord& record, const LayerMeasurement& measurement) {
  auto recorded = record.Get(measurement.layer_index, measurement.product_id);
  if (recorded.has_value() && measurement.svn < *recorded) {
    return Verdict::Reject("svn regression");
  }
  record.Raise(measurement.layer_index, measurement.product_id,
               measurement.svn);
  return Verdict::Accept();
}

}  // namespace dtcb::dice
