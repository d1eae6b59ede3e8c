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

#ifndef DTCB_STATUS_MACROS_H_
#define DTCB_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DTCB_STATUS_CONCAT_INNER(a, b) a##b
#define DTCB_STATUS_CONCAT(a, b) DTCB_STATUS_CONCAT_INNER(a, b)

#define DTCB_RETURN_IF_ERROR(expr)                  \
  do {                                              \
    ::absl::Status dtcb_status_ = (expr);           \
    if (!dtcb_status_.ok()) return dtcb_status_;    \
  } while (0)

#define DTCB_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                               \
  if (!tmp.ok()) return tmp.status();              \
  lhs = std::move(*tmp)

// DTCB_ASSIGN_OR_RETURN(auto x, FunctionReturningStatusOr());
#define DTCB_ASSIGN_OR_RETURN(lhs, expr) \
  DTCB_ASSIGN_OR_RETURN_IMPL(DTCB_STATUS_CONCAT(dtcb_statusor_, __LINE__), lhs, expr)

#endif  // DTCB_STATUS_MACROS_H_
