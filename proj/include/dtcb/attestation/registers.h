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

#ifndef DTCB_ATTESTATION_REGISTERS_H_
#define DTCB_ATTESTATION_REGISTERS_H_

#include <array>
#include <cstddef>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dtcb/crypto/crypto.h"

namespace dtcb::attestation {

inline constexpr size_t kRegisterCount = 32;

using RegisterValues = std::array<crypto::Digest, kRegisterCount>;

// Extend-only measurement registers. A slot changes only through
//   slot <- H(0x05 | slot | measurement)
// or a reset back to all zeros.
class Registers {
 public:
  Registers() = default;

  absl::Status Extend(size_t index, const crypto::Digest& measurement);
  absl::Status Reset(size_t index);
  absl::StatusOr<crypto::Digest> Read(size_t index) const;

  const RegisterValues& values() const { return slots_; }

  friend bool operator==(const Registers&, const Registers&) = default;

 private:
  RegisterValues slots_{};
};

// Value-returning form of Registers::Extend.
absl::StatusOr<Registers> ExtendRegister(Registers regs, size_t index,
                                         const crypto::Digest& measurement);

}  // namespace dtcb::attestation

#endif  // DTCB_ATTESTATION_REGISTERS_H_
