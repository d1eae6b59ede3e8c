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

#ifndef DTCB_CRYPTO_CANONICAL_H_
#define DTCB_CRYPTO_CANONICAL_H_

// Canonical byte layout shared by every hashed, signed or transmitted
// structure:
//   [1-byte tag] then fields in declaration order, where
//   byte strings / strings -> 4-byte big-endian length + raw bytes
//   integers               -> 8-byte big-endian
//   booleans               -> 8-byte big-endian 0 or 1

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::crypto {

class CanonicalWriter {
 public:
  CanonicalWriter() = default;
  explicit CanonicalWriter(Tag tag) { PutRawByte(static_cast<uint8_t>(tag)); }

  CanonicalWriter& PutRawByte(uint8_t b) {
    out_.push_back(b);
    return *this;
  }
  CanonicalWriter& PutBytes(ByteView bytes);
  CanonicalWriter& PutString(std::string_view s) { return PutBytes(AsBytes(s)); }
  CanonicalWriter& PutU64(uint64_t v);
  CanonicalWriter& PutBool(bool v) { return PutU64(v ? 1 : 0); }
  template <size_t N, typename T>
  CanonicalWriter& Put(const FixedBytes<N, T>& fixed) {
    return PutBytes(fixed.view());
  }

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Reads the layout above. Every accessor fails with InvalidArgument on
// truncation; Finish() fails if bytes are left over.
class CanonicalReader {
 public:
  explicit CanonicalReader(ByteView in) : in_(in) {}

  absl::StatusOr<uint8_t> RawByte();
  absl::Status ExpectTag(Tag tag);
  absl::StatusOr<Bytes> GetBytes();
  absl::StatusOr<std::string> GetString();
  absl::StatusOr<uint64_t> GetU64();
  absl::StatusOr<bool> GetBool();

  template <typename Fixed>
  absl::StatusOr<Fixed> GetFixed() {
    auto raw = GetBytes();
    if (!raw.ok()) return raw.status();
    return Fixed::FromBytes(*raw);
  }

  bool done() const { return pos_ == in_.size(); }
  absl::Status Finish() const;

 private:
  ByteView in_;
  size_t pos_ = 0;
};

}  // namespace dtcb::crypto

#endif  // DTCB_CRYPTO_CANONICAL_H_
