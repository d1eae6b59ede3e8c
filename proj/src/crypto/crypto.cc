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

#include "dtcb/crypto/crypto.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <cstdio>
#include <cstdlib>
#include <memory>

namespace dtcb::crypto {
namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

// OpenSSL failing on well-formed inputs means the library is broken.
void Require(bool ok, const char* what) {
  if (!ok) {
    std::fprintf(stderr, "fatal: %s\n", what);
    std::abort();
  }
}

PkeyPtr PrivateKeyFromSeed(ByteView seed) {
  return PkeyPtr(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                              seed.data(), seed.size()));
}

Digest Hmac(ByteView key, ByteView data) {
  std::array<uint8_t, 32> out{};
  unsigned int out_len = 0;
  const uint8_t* result =
      HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           data.data(), data.size(), out.data(), &out_len);
  Require(result != nullptr && out_len == out.size(), "HMAC-SHA-256");
  return Digest(out);
}

}  // namespace

absl::StatusOr<SecretKey> SecretKey::FromBytes(ByteView bytes) {
  auto seed = Seed::FromBytes(bytes);
  if (!seed.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("secret key: ", seed.status().message()));
  }
  return SecretKey(*seed);
}

Digest Hash(ByteView data) {
  std::array<uint8_t, 32> out{};
  SHA256(data.data(), data.size(), out.data());
  return Digest(out);
}

Digest KeyedOwf(const Seed& key, ByteView data) {
  return Hmac(key.view(), data);
}

Digest KeyedOwf(const Digest& key, ByteView data) {
  return Hmac(key.view(), data);
}

absl::StatusOr<Digest> KeyedOwf(ByteView key, ByteView data) {
  if (key.size() != 32) {
    return absl::InvalidArgumentError(
        absl::StrCat("keyed_owf: key must be 32 bytes, got ", key.size()));
  }
  return Hmac(key, data);
}

KeyPair KeypairFromSeed(const Seed& seed) {
  PkeyPtr pkey = PrivateKeyFromSeed(seed.view());
  Require(pkey != nullptr, "Ed25519 key construction");
  std::array<uint8_t, 32> pub{};
  size_t len = pub.size();
  Require(EVP_PKEY_get_raw_public_key(pkey.get(), pub.data(), &len) == 1 &&
              len == pub.size(),
          "Ed25519 public key export");
  return KeyPair{PublicKey(pub), SecretKey(seed)};
}

absl::StatusOr<KeyPair> KeypairFromSeed(ByteView seed) {
  auto typed = Seed::FromBytes(seed);
  if (!typed.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("keypair_from_seed: ", typed.status().message()));
  }
  return KeypairFromSeed(*typed);
}

Signature Sign(const SecretKey& secret_key, ByteView message) {
  PkeyPtr pkey = PrivateKeyFromSeed(secret_key.view());
  Require(pkey != nullptr, "Ed25519 key construction");
  MdCtxPtr ctx(EVP_MD_CTX_new());
  Require(ctx != nullptr &&
              EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr,
                                 pkey.get()) == 1,
          "Ed25519 sign init");
  std::array<uint8_t, 64> sig{};
  size_t sig_len = sig.size();
  Require(EVP_DigestSign(ctx.get(), sig.data(), &sig_len, message.data(),
                         message.size()) == 1 &&
              sig_len == sig.size(),
          "Ed25519 sign");
  return Signature(sig);
}

bool Verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != PublicKey::kSize ||
      signature.size() != Signature::kSize) {
    return false;
  }
  PkeyPtr pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                           public_key.data(),
                                           public_key.size()));
  if (!pkey) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx) return false;
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) !=
      1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

bool Verify(const PublicKey& public_key, ByteView message,
            ByteView signature) {
  return Verify(public_key.view(), message, signature);
}

}  // namespace dtcb::crypto
