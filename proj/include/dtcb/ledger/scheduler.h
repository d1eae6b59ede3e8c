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

#ifndef DTCB_LEDGER_SCHEDULER_H_
#define DTCB_LEDGER_SCHEDULER_H_

// Deterministic discrete-event machinery: seeded randomness, a tick-ordered
// event queue with sequence-number tie breaking, a lossy link model, and the
// tab-separated event log.

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dtcb/crypto/bytes.h"
#include "dtcb/crypto/crypto.h"
#include "dtcb/ledger/ledger.h"

namespace dtcb::ledger {

// mt19937_64 with fixed range reductions, so draws are identical across
// standard libraries (the std distributions are not).
class DeterministicRng {
 public:
  explicit DeterministicRng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform on [lo, hi]; requires lo <= hi.
  uint64_t Uniform(uint64_t lo, uint64_t hi);
  // Uniform on [0, 1) with 53 bits of precision.
  double Unit() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }
  // Always consumes exactly one draw.
  bool Bernoulli(double p) { return Unit() < p; }

  template <typename Fixed>
  Fixed Fill() {
    Fixed out;
    auto& arr = out.mutable_array();
    for (size_t i = 0; i < arr.size(); i += 8) {
      uint64_t v = NextU64();
      for (size_t j = 0; j < 8 && i + j < arr.size(); ++j) {
        arr[i + j] = static_cast<uint8_t>(v >> (56 - 8 * j));
      }
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    Tick tick;
    uint64_t sequence;
    Payload payload;
  };

  void Push(Tick tick, Payload payload) {
    heap_.push(Entry{tick, next_sequence_++, std::move(payload)});
  }

  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  std::optional<Tick> NextTick() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().tick;
  }

  // Removes every event scheduled at the earliest occupied tick, in
  // submission order.
  std::vector<Entry> PopNextTick() {
    std::vector<Entry> out;
    if (heap_.empty()) return out;
    const Tick tick = heap_.top().tick;
    while (!heap_.empty() && heap_.top().tick == tick) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    return out;
  }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.tick != b.tick) return a.tick > b.tick;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  uint64_t next_sequence_ = 0;
};

struct LinkParams {
  Tick delay_min = 1;
  Tick delay_max = 1;
  double drop_probability = 0.0;
  double duplicate_probability = 0.0;
};

class NetworkModel {
 public:
  void SetDefault(LinkParams params) { default_ = params; }
  void SetLink(const std::string& from, const std::string& to,
               LinkParams params) {
    links_[{from, to}] = params;
  }
  const LinkParams& Link(const std::string& from, const std::string& to) const;

  // Delivery delays for one send: empty when dropped, two entries when
  // duplicated. Draw order is fixed: drop, delay, duplicate, second delay.
  std::vector<Tick> Sample(const std::string& from, const std::string& to,
                           DeterministicRng& rng) const;

 private:
  LinkParams default_;
  std::map<std::pair<std::string, std::string>, LinkParams> links_;
};

struct LogEvent {
  Tick tick = 0;
  std::string chain;
  std::string kind;
  crypto::Digest digest;
  std::string summary;
  // Node and session the event belongs to, for audits.
  std::string node;
  std::optional<crypto::Nonce> session;
};

class EventLog {
 public:
  // `payload` is hashed (tag 0x0c) into the digest column.
  void Add(Tick tick, std::string chain, std::string kind, ByteView payload,
           std::string summary, std::string node = {},
           std::optional<crypto::Nonce> session = std::nullopt);

  const std::vector<LogEvent>& events() const { return events_; }

  // tick<TAB>chain<TAB>event_kind<TAB>payload digest hex<TAB>summary
  static std::string FormatLine(const LogEvent& e);
  std::string Render() const;
  crypto::Digest Digest() const { return crypto::Hash(AsBytes(Render())); }

 private:
  std::vector<LogEvent> events_;
};

}  // namespace dtcb::ledger

#endif  // DTCB_LEDGER_SCHEDULER_H_
