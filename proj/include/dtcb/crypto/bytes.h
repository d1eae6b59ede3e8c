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

#ifndef DTCB_CRYPTO_BYTES_H_
#define DTCB_CRYPTO_BYTES_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace dtcb {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

std::string ToHex(ByteView bytes);

// Strict lowercase/uppercase hex decoding; odd length or a non-hex character
// is an error.
absl::StatusOr<Bytes> FromHex(std::string_view hex);

// True iff `needle` occurs as a contiguous run inside `haystack`.
bool ContainsSubsequence(ByteView haystack, ByteView needle);

// Fixed-length byte string. `Tag` keeps Digest, Seed and PublicKey from being
// mixed up even though they share a width.
template <size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr size_t kSize = N;

  FixedBytes() { bytes_.fill(0); }
  explicit FixedBytes(const std::array<uint8_t, N>& bytes) : bytes_(bytes) {}

  static absl::StatusOr<FixedBytes> FromBytes(ByteView bytes) {
    if (bytes.size() != N) {
      return absl::InvalidArgumentError(absl::StrCat(
          "expected ", N, " bytes, got ", bytes.size()));
    }
    FixedBytes out;
    std::copy(bytes.begin(), bytes.end(), out.bytes_.begin());
    return out;
  }

  static absl::StatusOr<FixedBytes> FromHexString(std::string_view hex) {
    auto raw = FromHex(hex);
    if (!raw.ok()) return raw.status();
    return FromBytes(*raw);
  }

  ByteView view() const { return bytes_; }
  const std::array<uint8_t, N>& array() const { return bytes_; }
  std::array<uint8_t, N>& mutable_array() { return bytes_; }
  const uint8_t* data() const { return bytes_.data(); }
  std::string hex() const { return ToHex(bytes_); }

  friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

 private:
  std::array<uint8_t, N> bytes_;
};

}  // namespace dtcb

#endif  // DTCB_CRYPTO_BYTES_H_
