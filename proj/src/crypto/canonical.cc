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

#include "dtcb/crypto/canonical.h"

namespace dtcb::crypto {

CanonicalWriter& CanonicalWriter::PutBytes(ByteView bytes) {
  // Lengths above 4 GiB cannot occur in this simulator.
  const auto len = static_cast<uint32_t>(bytes.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(len >> shift));
  }
  out_.insert(out_.end(), bytes.begin(), bytes.end());
  return *this;
}

CanonicalWriter& CanonicalWriter::PutU64(uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
  return *this;
}

absl::StatusOr<uint8_t> CanonicalReader::RawByte() {
  if (pos_ >= in_.size()) {
    return absl::InvalidArgumentError("truncated input");
  }
  return in_[pos_++];
}

absl::Status CanonicalReader::ExpectTag(Tag tag) {
  auto b = RawByte();
  if (!b.ok()) return b.status();
  if (*b != static_cast<uint8_t>(tag)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unexpected tag 0x", ToHex(ByteView(&*b, 1))));
  }
  return absl::OkStatus();
}

absl::StatusOr<Bytes> CanonicalReader::GetBytes() {
  if (in_.size() - pos_ < 4) {
    return absl::InvalidArgumentError("truncated length prefix");
  }
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | in_[pos_ + i];
  pos_ += 4;
  if (in_.size() - pos_ < len) {
    return absl::InvalidArgumentError("truncated field");
  }
  Bytes out(in_.begin() + pos_, in_.begin() + pos_ + len);
  pos_ += len;
  return out;
}

absl::StatusOr<std::string> CanonicalReader::GetString() {
  auto raw = GetBytes();
  if (!raw.ok()) return raw.status();
  return std::string(raw->begin(), raw->end());
}

absl::StatusOr<uint64_t> CanonicalReader::GetU64() {
  if (in_.size() - pos_ < 8) {
    return absl::InvalidArgumentError("truncated integer");
  }
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 8;
  return v;
}

absl::StatusOr<bool> CanonicalReader::GetBool() {
  auto v = GetU64();
  if (!v.ok()) return v.status();
  if (*v > 1) return absl::InvalidArgumentError("non-canonical boolean");
  return *v == 1;
}

absl::Status CanonicalReader::Finish() const {
  if (!done()) {
    return absl::InvalidArgumentError(
        absl::StrCat(in_.size() - pos_, " trailing bytes"));
  }
  return absl::OkStatus();
}

}  // namespace dtcb::crypto
