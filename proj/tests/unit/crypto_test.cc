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

#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/canonical.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/ledger/scheduler.h"

namespace dtcb::crypto {
namespace {

Bytes Hex(std::string_view h) { return FromHex(h).value(); }

TEST(Sha256Test, FipsVectors) {
  EXPECT_EQ(Hash({}).hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Hash(AsBytes("abc")).hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(
      Hash(AsBytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))
          .hex(),
      "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(KeyedOwfTest, RejectsWrongKeyLength) {
  EXPECT_FALSE(KeyedOwf(AsBytes("Jefe"), AsBytes("x")).ok());
  EXPECT_FALSE(KeyedOwf(Bytes(33, 1), AsBytes("x")).ok());
  EXPECT_TRUE(KeyedOwf(Bytes(32, 1), AsBytes("x")).ok());
}

TEST(KeyedOwfTest, MatchesHmacSha256Vector) {
  // HMAC-SHA-256 with key 0x0b * 32, message "Hi There"; computed with an
  // independent HMAC implementation (Python hmac module).
  const Seed key = Seed::FromBytes(Bytes(32, 0x0b)).value();
  EXPECT_EQ(KeyedOwf(key, AsBytes("Hi There")).hex(),
            "198a607eb44bfbc69903a0f1cf2bbdc5ba0aa3f3d9ae3c1c7a3b1696a0b68cf7");
}

TEST(KeyedOwfTest, TypedOverloadsAgree) {
  const Seed s = Seed::FromBytes(Bytes(32, 7)).value();
  const Digest d = Digest::FromBytes(Bytes(32, 7)).value();
  EXPECT_EQ(KeyedOwf(s, AsBytes("m")), KeyedOwf(d, AsBytes("m")));
  EXPECT_EQ(KeyedOwf(s, AsBytes("m")),
            KeyedOwf(ByteView(Bytes(32, 7)), AsBytes("m")).value());
}

TEST(Ed25519Test, Rfc8032TestOne) {
  const Seed seed = Seed::FromHexString(
      "9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60")
                        .value();
  const KeyPair kp = KeypairFromSeed(seed);
  EXPECT_EQ(kp.public_key.hex(),
            "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  const Signature sig = Sign(kp.secret_key, {});
  EXPECT_EQ(sig.hex(),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
            "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(Verify(kp.public_key, {}, sig.view()));
}

TEST(Ed25519Test, VerifyRejectsMismatches) {
  const KeyPair a = KeypairFromSeed(Seed::FromBytes(Bytes(32, 1)).value());
  const KeyPair b = KeypairFromSeed(Seed::FromBytes(Bytes(32, 2)).value());
  const Signature sig = Sign(a.secret_key, AsBytes("hello"));
  EXPECT_TRUE(Verify(a.public_key, AsBytes("hello"), sig.view()));
  EXPECT_FALSE(Verify(a.public_key, AsBytes("hellO"), sig.view()));
  EXPECT_FALSE(Verify(b.public_key, AsBytes("hello"), sig.view()));
  EXPECT_FALSE(Verify(a.public_key, AsBytes("hello"),
                      ByteView(sig.view()).first(63)));
  EXPECT_FALSE(Verify(ByteView(Bytes(31, 0)), AsBytes("hello"), sig.view()));
}

TEST(Ed25519Test, KeypairFromUntypedSeed) {
  EXPECT_FALSE(KeypairFromSeed(ByteView(Bytes(31, 0))).ok());
  auto kp = KeypairFromSeed(ByteView(Bytes(32, 9)));
  ASSERT_TRUE(kp.ok());
  EXPECT_EQ(kp->public_key,
            KeypairFromSeed(Seed::FromBytes(Bytes(32, 9)).value()).public_key);
}

TEST(BytesTest, HexRoundTripAndErrors) {
  EXPECT_EQ(ToHex(Hex("00ff10Ab")), "00ff10ab");
  EXPECT_FALSE(FromHex("abc").ok());
  EXPECT_FALSE(FromHex("zz").ok());
  EXPECT_FALSE(Digest::FromHexString("00").ok());
}

TEST(BytesTest, ContainsSubsequence) {
  const Bytes hay = {1, 2, 3, 4, 5};
  EXPECT_TRUE(ContainsSubsequence(hay, Bytes{3, 4}));
  EXPECT_FALSE(ContainsSubsequence(hay, Bytes{4, 3}));
  EXPECT_TRUE(ContainsSubsequence(hay, Bytes{}));
  EXPECT_FALSE(ContainsSubsequence(Bytes{1}, Bytes{1, 2}));
}

TEST(CanonicalTest, LayoutIsPinned) {
  CanonicalWriter w(Tag::kQuote);
  w.PutU64(258).PutString("ab").PutBool(true);
  EXPECT_EQ(ToHex(w.bytes()),
            "05"
            "0000000000000102"
            "000000026162"
            "0000000000000001");
}

TEST(CanonicalTest, ReaderRoundTripAndTruncation) {
  CanonicalWriter w(Tag::kManifest);
  w.PutU64(7).PutString("xyz").PutBool(false);
  const Bytes b = w.Take();
  CanonicalReader r(b);
  ASSERT_TRUE(r.ExpectTag(Tag::kManifest).ok());
  EXPECT_EQ(r.GetU64().value(), 7u);
  EXPECT_EQ(r.GetString().value(), "xyz");
  EXPECT_EQ(r.GetBool().value(), false);
  EXPECT_TRUE(r.Finish().ok());

  for (size_t cut = 0; cut < b.size(); ++cut) {
    CanonicalReader t(ByteView(b).first(cut));
    bool ok = t.ExpectTag(Tag::kManifest).ok() && t.GetU64().ok() &&
              t.GetString().ok() && t.GetBool().ok() && t.Finish().ok();
    EXPECT_FALSE(ok) << "cut " << cut;
  }
  CanonicalReader wrong(b);
  EXPECT_FALSE(wrong.ExpectTag(Tag::kQuote).ok());
}

TEST(CanonicalTest, BoolRejectsOtherValues) {
  CanonicalWriter w;
  w.PutU64(2);
  CanonicalReader r(w.bytes());
  EXPECT_FALSE(r.GetBool().ok());
}

TEST(CanonicalTest, TagsAreDistinct) {
  std::set<uint8_t> seen;
  for (Tag t : {Tag::kCdi, Tag::kLayerSecret, Tag::kDeviceIdSeed,
                Tag::kAliasIdSeed, Tag::kQuote, Tag::kManifest,
                Tag::kAssertion, Tag::kMaskedTxId, Tag::kMembership,
                Tag::kLedgerTx, Tag::kBlock, Tag::kLogEvent,
                Tag::kPublicChain}) {
    EXPECT_TRUE(seen.insert(static_cast<uint8_t>(t)).second);
  }
}

TEST(DeterministicRngTest, SameSeedSameStream) {
  ledger::DeterministicRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    (void)c;
  }
  EXPECT_NE(ledger::DeterministicRng(42).NextU64(),
            ledger::DeterministicRng(43).NextU64());
}

TEST(DeterministicRngTest, UniformStaysInRange) {
  ledger::DeterministicRng r(1);
  for (int i = 0; i < 10000; ++i) {
    const uint64_t v = r.Uniform(3, 9);
    EXPECT_GE(v, 3u);
    EXPECT_LE(v, 9u);
  }
  EXPECT_EQ(r.Uniform(5, 5), 5u);
}

}  // namespace
}  // namespace dtcb::crypto
