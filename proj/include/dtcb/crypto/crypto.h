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

#ifndef DTCB_CRYPTO_CRYPTO_H_
#define DTCB_CRYPTO_CRYPTO_H_

// The cryptographic substrate everything else is built on. The algorithm
// suite is pinned so that outputs are bit-exact across implementations:
//   hash            SHA-256
//   keyed one-way   HMAC-SHA-256
//   signatures      Ed25519, the 32-byte seed is the private key
//
// Every function here is pure and thread-safe.

#include <cstdint>

#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"

namespace dtcb::crypto {

struct DigestTag {};
struct SeedTag {};
struct PublicKeyTag {};
struct SignatureTag {};
struct NonceTag {};

using Digest = FixedBytes<32, DigestTag>;
using Seed = FixedBytes<32, SeedTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;
using Nonce = FixedBytes<32, NonceTag>;

// Domain-separation tags. Every hashed or signed payload starts with exactly
// one of these bytes.
enum class Tag : uint8_t {
  kCdi = 0x01,
  kLayerSecret = 0x02,
  kDeviceIdSeed = 0x03,
  kAliasIdSeed = 0x04,
  kQuote = 0x05,
  kManifest = 0x06,
  kAssertion = 0x07,
  kMaskedTxId = 0x08,
  kMembership = 0x09,
  // Simulator plumbing.
  kLedgerTx = 0x0a,
  kBlock = 0x0b,
  kLogEvent = 0x0c,
  kPublicChain = 0x0d,
};

// Ed25519 signing key. Holds the private seed; deliberately has no hex() or
// stream operator so it cannot end up in a log line by accident.
class SecretKey {
 public:
  SecretKey() = default;
  explicit SecretKey(const Seed& seed) : seed_(seed) {}
  static absl::StatusOr<SecretKey> FromBytes(ByteView bytes);

  ByteView view() const { return seed_.view(); }

  friend bool operator==(const SecretKey&, const SecretKey&) = default;

 private:
  Seed seed_;
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
};

Digest Hash(ByteView data);

// HMAC-SHA-256(key, data).
Digest KeyedOwf(const Seed& key, ByteView data);
Digest KeyedOwf(const Digest& key, ByteView data);
// Untyped form; the key must be exactly 32 bytes.
absl::StatusOr<Digest> KeyedOwf(ByteView key, ByteView data);

KeyPair KeypairFromSeed(const Seed& seed);
absl::StatusOr<KeyPair> KeypairFromSeed(ByteView seed);

Signature Sign(const SecretKey& secret_key, ByteView message);

// False for a malformed key, a signature of the wrong length, or any
// mismatch. Never throws.
bool Verify(const PublicKey& public_key, ByteView message, ByteView signature);
bool Verify(ByteView public_key, ByteView message, ByteView signature);

inline Seed SeedFromDigest(const Digest& d) { return Seed(d.array()); }

}  // namespace dtcb::crypto

#endif  // DTCB_CRYPTO_CRYPTO_H_
