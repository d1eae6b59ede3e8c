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

#include "dtcb/ledger/scheduler.h"

#include <limits>

#include "absl/strings/str_cat.h"
#include "dtcb/crypto/canonical.h"

namespace dtcb::ledger {

uint64_t DeterministicRng::Uniform(uint64_t lo, uint64_t hi) {
  const uint64_t span = hi - lo;
  if (span == std::numeric_limits<uint64_t>::max()) return NextU64();
  const uint64_t range = span + 1;
  // Rejection sampling keeps the result exactly uniform.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % range;
  uint64_t draw;
  do {
    draw = NextU64();
  } while (draw >= limit);
  return lo + draw % range;
}

const LinkParams& NetworkModel::Link(const std::string& from,
                                     const std::string& to) const {
  auto it = links_.find({from, to});
  return it == links_.end() ? default_ : it->second;
}

std::vector<Tick> NetworkModel::Sample(const std::string& from,
                                       const std::string& to,
                                       DeterministicRng& rng) const {
  const LinkParams& link = Link(from, to);
  std::vector<Tick> delays;
  if (rng.Bernoulli(link.drop_probability)) return delays;
  delays.push_back(rng.Uniform(link.delay_min, link.delay_max));
  if (rng.Bernoulli(link.duplicate_probability)) {
    delays.push_back(rng.Uniform(link.delay_min, link.delay_max));
  }
  return delays;
}

void EventLog::Add(Tick tick, std::string chain, std::string kind,
                   ByteView payload, std::string summary, std::string node,
                   std::optional<crypto::Nonce> session) {
  crypto::CanonicalWriter w(crypto::Tag::kLogEvent);
  w.PutBytes(payload);
  events_.push_back(LogEvent{tick, std::move(chain), std::move(kind),
                             crypto::Hash(w.bytes()), std::move(summary),
                             std::move(node), session});
}

std::string EventLog::FormatLine(const LogEvent& e) {
  return absl::StrCat(e.tick, "\t", e.chain.empty() ? "-" : e.chain, "\t",
                      e.kind, "\t", e.digest.hex(), "\t", e.summary);
}

std::string EventLog::Render() const {
  std::string out;
  for (const auto& e : events_) {
    absl::StrAppend(&out, FormatLine(e), "\n");
  }
  return out;
}

}  // namespace dtcb::ledger
