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

#include "dtcb/attestation/registers.h"

#include "absl/strings/str_cat.h"
#include "dtcb/crypto/canonical.h"

namespace dtcb::attestation {
namespace {

absl::Status CheckIndex(size_t index) {
  if (index >= kRegisterCount) {
    return absl::OutOfRangeError(absl::StrCat(
        "register index ", index, " out of range [0, ", kRegisterCount, ")"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status Registers::Extend(size_t index,
                               const crypto::Digest& measurement) {
  if (auto s = CheckIndex(index); !s.ok()) return s;
  crypto::CanonicalWriter w(crypto::Tag::kQuote);
  w.Put(slots_[index]).Put(measurement);
  slots_[index] = crypto::Hash(w.bytes());
  return absl::OkStatus();
}

absl::Status Registers::Reset(size_t index) {
  if (auto s = CheckIndex(index); !s.ok()) return s;
  slots_[index] = crypto::Digest();
  return absl::OkStatus();
}

absl::StatusOr<crypto::Digest> Registers::Read(size_t index) const {
  if (auto s = CheckIndex(index); !s.ok()) return s;
  return slots_[index];
}

absl::StatusOr<Registers> ExtendRegister(Registers regs, size_t index,
                                         const crypto::Digest& measurement) {
  if (auto s = regs.Extend(index, measurement); !s.ok()) return s;
  return regs;
}

}  // namespace dtcb::attestation
