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

#include "dtcb/scenario/config.h"

#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace dtcb::scenario {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Line index: JSON pointer -> source line, built by a SAX pass over an
// iterator that counts newlines.

struct Cursor {
  int line = 1;
  // Line of the last non-whitespace character; the lexer reads one character
  // past a number, which may be a newline.
  int token_line = 1;
};

class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator(const char* p, Cursor* cursor) : p_(p), cursor_(cursor) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    if (*p_ == '\n') {
      ++cursor_->line;
    } else if (!std::isspace(static_cast<unsigned char>(*p_))) {
      cursor_->token_line = cursor_->line;
    }
    ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) {
    return a.p_ == b.p_;
  }
  friend bool operator!=(const CountingIterator& a, const CountingIterator& b) {
    return a.p_ != b.p_;
  }

 private:
  const char* p_;
  Cursor* cursor_;
};

class LineIndexer : public nlohmann::json_sax<json> {
 public:
  explicit LineIndexer(const Cursor* cursor) : cursor_(cursor) {}

  std::map<std::string, int> take() { return std::move(lines_); }

  bool null() override { return Value(); }
  bool boolean(bool) override { return Value(); }
  bool number_integer(number_integer_t) override { return Value(); }
  bool number_unsigned(number_unsigned_t) override { return Value(); }
  bool number_float(number_float_t, const string_t&) override {
    return Value();
  }
  bool string(string_t&) override { return Value(); }
  bool binary(binary_t&) override { return Value(); }
  bool start_object(std::size_t) override { return Open(false); }
  bool end_object() override { return Close(); }
  bool start_array(std::size_t) override { return Open(true); }
  bool end_array() override { return Close(); }
  bool key(string_t& k) override {
    frames_.back().key = k;
    lines_[absl::StrCat(frames_.back().path, "/", k)] = cursor_->token_line;
    return true;
  }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    std::string path;
    bool array = false;
    size_t index = 0;
    std::string key;
  };

  // Path of the value that starts now.
  std::string NextPath() {
    if (frames_.empty()) return "";
    Frame& f = frames_.back();
    if (f.array) {
      std::string p = absl::StrCat(f.path, "/", f.index++);
      lines_[p] = cursor_->token_line;
      return p;
    }
    return absl::StrCat(f.path, "/", f.key);
  }
  bool Value() {
    NextPath();
    return true;
  }
  bool Open(bool array) {
    std::string path = NextPath();
    if (frames_.empty()) lines_[""] = cursor_->token_line;
    frames_.push_back(Frame{std::move(path), array, 0, {}});
    return true;
  }
  bool Close() {
    frames_.pop_back();
    return true;
  }

  const Cursor* cursor_;
  std::vector<Frame> frames_;
  std::map<std::string, int> lines_;
};

// ---------------------------------------------------------------------------
// Typed access with path-aware errors.

class Reader {
 public:
  explicit Reader(std::map<std::string, int> lines)
      : lines_(std::move(lines)) {}

  int Line(const std::string& path) const {
    // Fall back to the closest enclosing value with a known line.
    std::string p = path;
    while (true) {
      if (auto it = lines_.find(p); it != lines_.end()) return it->second;
      if (p.empty()) return 1;
      p.resize(p.rfind('/'));
    }
  }

  absl::Status Error(const std::string& path, std::string_view message) const {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", Line(path), ": ", std::string(message)));
  }

  absl::StatusOr<const json*> Field(const json& obj, const std::string& path,
                                    const std::string& key,
                                    bool required) const {
    if (!obj.is_object()) return Error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) {
        return Error(path, absl::StrCat("missing field \"", key, "\""));
      }
      return nullptr;
    }
    return &*it;
  }

  absl::StatusOr<uint64_t> U64(const json& obj, const std::string& path,
                               const std::string& key,
                               std::optional<uint64_t> fallback) const {
    auto f = Field(obj, path, key, !fallback.has_value());
    if (!f.ok()) return f.status();
    if (*f == nullptr) return *fallback;
    if (!(*f)->is_number_unsigned()) {
      return Error(Sub(path, key),
                   absl::StrCat("\"", key, "\" must be a non-negative integer"));
    }
    return (*f)->get<uint64_t>();
  }

  absl::StatusOr<double> Probability(const json& obj, const std::string& path,
                                     const std::string& key,
                                     double fallback) const {
    auto f = Field(obj, path, key, false);
    if (!f.ok()) return f.status();
    if (*f == nullptr) return fallback;
    if (!(*f)->is_number()) {
      return Error(Sub(path, key), absl::StrCat("\"", key, "\" must be a number"));
    }
    double v = (*f)->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      return Error(Sub(path, key),
                   absl::StrCat("\"", key, "\" must lie in [0, 1]"));
    }
    return v;
  }

  absl::StatusOr<bool> Bool(const json& obj, const std::string& path,
                            const std::string& key, bool fallback) const {
    auto f = Field(obj, path, key, false);
    if (!f.ok()) return f.status();
    if (*f == nullptr) return fallback;
    if (!(*f)->is_boolean()) {
      return Error(Sub(path, key), absl::StrCat("\"", key, "\" must be a boolean"));
    }
    return (*f)->get<bool>();
  }

  absl::StatusOr<std::string> String(
      const json& obj, const std::string& path, const std::string& key,
      std::optional<std::string> fallback = std::nullopt) const {
    auto f = Field(obj, path, key, !fallback.has_value());
    if (!f.ok()) return f.status();
    if (*f == nullptr) return *fallback;
    if (!(*f)->is_string()) {
      return Error(Sub(path, key), absl::StrCat("\"", key, "\" must be a string"));
    }
    return (*f)->get<std::string>();
  }

  template <typename Fixed>
  absl::StatusOr<Fixed> Hex(const json& obj, const std::string& path,
                            const std::string& key) const {
    auto s = String(obj, path, key);
    if (!s.ok()) return s.status();
    auto v = Fixed::FromHexString(*s);
    if (!v.ok()) {
      return Error(Sub(path, key),
                   absl::StrCat("\"", key, "\": ", std::string(v.status().message())));
    }
    return *v;
  }

  // Array under `key`, or an empty array when absent and optional.
  absl::StatusOr<const json*> Array(const json& obj, const std::string& path,
                                    const std::string& key,
                                    bool required) const {
    static const json kEmpty = json::array();
    auto f = Field(obj, path, key, required);
    if (!f.ok()) return f.status();
    if (*f == nullptr) return &kEmpty;
    if (!(*f)->is_array()) {
      return Error(Sub(path, key), absl::StrCat("\"", key, "\" must be an array"));
    }
    return *f;
  }

  static std::string Sub(const std::string& path, const std::string& key) {
    return absl::StrCat(path, "/", key);
  }
  static std::string Sub(const std::string& path, size_t index) {
    return absl::StrCat(path, "/", index);
  }

 private:
  std::map<std::string, int> lines_;
};

#define DTCB_READ(lhs, expr)             \
  auto lhs##_or = (expr);                \
  if (!lhs##_or.ok()) return lhs##_or.status(); \
  auto lhs = std::move(*lhs##_or)

absl::StatusOr<json> ParseWithIndex(std::string_view text,
                                    std::map<std::string, int>* lines) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": malformed JSON"));
  }
  Cursor cursor;
  LineIndexer indexer(&cursor);
  json::sax_parse(CountingIterator(text.data(), &cursor),
                  CountingIterator(text.data() + text.size(), &cursor),
                  &indexer);
  *lines = indexer.take();
  return doc;
}

absl::StatusOr<dice::LayerMeasurement> ReadLayer(const Reader& r,
                                                 const json& j,
                                                 const std::string& path) {
  dice::LayerMeasurement m;
  DTCB_READ(index, r.U64(j, path, "layer_index", std::nullopt));
  DTCB_READ(digest, r.Hex<crypto::Digest>(j, path, "code_digest"));
  DTCB_READ(product, r.String(j, path, "product_id", std::string()));
  DTCB_READ(svn, r.U64(j, path, "svn", 0));
  m.layer_index = index;
  m.code_digest = digest;
  m.product_id = product;
  m.svn = svn;
  return m;
}

absl::StatusOr<std::vector<dice::LayerMeasurement>> ReadLayers(
    const Reader& r, const json& arr, const std::string& path) {
  std::vector<dice::LayerMeasurement> out;
  for (size_t i = 0; i < arr.size(); ++i) {
    DTCB_READ(m, ReadLayer(r, arr[i], Reader::Sub(path, i)));
    out.push_back(std::move(m));
  }
  return out;
}

absl::StatusOr<ledger::LinkParams> ReadLinkParams(const Reader& r,
                                                  const json& j,
                                                  const std::string& path,
                                                  ledger::LinkParams base) {
  ledger::LinkParams p;
  DTCB_READ(dmin, r.U64(j, path, "delay_min", base.delay_min));
  DTCB_READ(dmax, r.U64(j, path, "delay_max", base.delay_max));
  DTCB_READ(drop, r.Probability(j, path, "drop_probability",
                                base.drop_probability));
  DTCB_READ(dup, r.Probability(j, path, "duplicate_probability",
                               base.duplicate_probability));
  if (dmin < 1) return r.Error(path, "delay_min must be at least 1");
  if (dmin > dmax) return r.Error(path, "delay_min exceeds delay_max");
  p.delay_min = dmin;
  p.delay_max = dmax;
  p.drop_probability = drop;
  p.duplicate_probability = dup;
  return p;
}

absl::StatusOr<ScenarioConfig> ReadConfig(const Reader& r, const json& doc) {
  ScenarioConfig c;
  if (!doc.is_object()) return r.Error("", "scenario must be a JSON object");

  DTCB_READ(seed, r.U64(doc, "", "seed", std::nullopt));
  c.seed = seed;
  DTCB_READ(limit, r.U64(doc, "", "tick_limit", kDefaultTickLimit));
  c.tick_limit = limit;
  DTCB_READ(group, r.String(doc, "", "group", std::string("gateways")));
  c.group = group;

  // Users.
  DTCB_READ(users, r.Array(doc, "", "users", false));
  std::set<std::string> user_names;
  for (size_t i = 0; i < users->size(); ++i) {
    const std::string path = Reader::Sub("/users", i);
    const json& u = (*users)[i];
    UserConfig user;
    DTCB_READ(name, r.String(u, path, "name"));
    user.name = name;
    if (!user_names.insert(name).second) {
      return r.Error(path, absl::StrCat("duplicate user \"", name, "\""));
    }
    DTCB_READ(has_seed, r.Field(u, path, "seed", false));
    if (has_seed != nullptr) {
      DTCB_READ(s, r.Hex<crypto::Seed>(u, path, "seed"));
      user.seed = s;
    } else {
      user.seed = crypto::SeedFromDigest(crypto::Hash(AsBytes("user:" + name)));
    }
    c.users.push_back(std::move(user));
  }

  // Chains.
  DTCB_READ(chains, r.Array(doc, "", "chains", true));
  std::set<std::string> chain_ids;
  for (size_t i = 0; i < chains->size(); ++i) {
    const std::string path = Reader::Sub("/chains", i);
    const json& j = (*chains)[i];
    ChainConfig chain;
    DTCB_READ(id, r.String(j, path, "chain_id"));
    if (!chain_ids.insert(id).second) {
      return r.Error(Reader::Sub(path, "chain_id"),
                     absl::StrCat("duplicate chain_id \"", id, "\""));
    }
    chain.chain_id = id;
    DTCB_READ(interval, r.U64(j, path, "block_interval", 10));
    if (interval < 1) {
      return r.Error(Reader::Sub(path, "block_interval"),
                     "block_interval must be at least 1");
    }
    chain.block_interval = interval;
    DTCB_READ(depth, r.U64(j, path, "confirmation_depth", 0));
    chain.confirmation_depth = depth;
    DTCB_READ(delegate, r.String(j, path, "delegate", std::string()));
    chain.delegate = delegate;
    DTCB_READ(assets, r.Array(j, path, "assets", false));
    std::set<std::string> labels;
    for (size_t k = 0; k < assets->size(); ++k) {
      const std::string apath = Reader::Sub(Reader::Sub(path, "assets"), k);
      const json& a = (*assets)[k];
      AssetConfig asset;
      DTCB_READ(label, r.String(a, apath, "label"));
      if (!labels.insert(label).second) {
        return r.Error(apath, absl::StrCat("duplicate asset label \"", label,
                                           "\" on ", id));
      }
      DTCB_READ(owner, r.String(a, apath, "owner"));
      if (!user_names.contains(owner)) {
        return r.Error(Reader::Sub(apath, "owner"),
                       absl::StrCat("unknown user \"", owner, "\""));
      }
      DTCB_READ(value, r.U64(a, apath, "value", 1));
      asset.label = label;
      asset.owner = owner;
      asset.value = value;
      chain.assets.push_back(std::move(asset));
    }
    c.chains.push_back(std::move(chain));
  }

  // Nodes.
  DTCB_READ(nodes, r.Array(doc, "", "nodes", true));
  std::map<std::string, const NodeConfig*> node_by_id;
  c.nodes.reserve(nodes->size());
  for (size_t i = 0; i < nodes->size(); ++i) {
    const std::string path = Reader::Sub("/nodes", i);
    const json& j = (*nodes)[i];
    NodeConfig node;
    DTCB_READ(id, r.String(j, path, "node_id"));
    node.node_id = id;
    if (node_by_id.contains(id)) {
      return r.Error(Reader::Sub(path, "node_id"),
                     absl::StrCat("duplicate node_id \"", id, "\""));
    }
    DTCB_READ(chain, r.String(j, path, "chain_id"));
    if (!chain_ids.contains(chain)) {
      return r.Error(Reader::Sub(path, "chain_id"),
                     absl::StrCat("node ", id, " references unknown chain \"",
                                  chain, "\""));
    }
    node.chain_id = chain;
    DTCB_READ(uds, r.Hex<crypto::Seed>(j, path, "uds"));
    node.uds = uds;
    DTCB_READ(gateway, r.Bool(j, path, "gateway", false));
    node.gateway = gateway;
    DTCB_READ(member, r.Bool(j, path, "member", true));
    node.member = member;
    DTCB_READ(caps, r.Field(j, path, "capabilities", false));
    if (caps != nullptr) {
      const std::string cpath = Reader::Sub(path, "capabilities");
      DTCB_READ(wd, r.Bool(*caps, cpath, "well_defined", true));
      DTCB_READ(sh, r.Bool(*caps, cpath, "shielded", true));
      node.caps.well_defined = wd;
      node.caps.shielded = sh;
    }
    DTCB_READ(layers, r.Array(j, path, "layers", true));
    DTCB_READ(parsed, ReadLayers(r, *layers, Reader::Sub(path, "layers")));
    node.layers = std::move(parsed);
    if (node.layers.empty()) {
      return r.Error(Reader::Sub(path, "layers"), "chain structure: no layers");
    }
    DTCB_READ(components, r.Array(j, path, "components", gateway));
    for (size_t k = 0; k < components->size(); ++k) {
      const std::string kpath =
          Reader::Sub(Reader::Sub(path, "components"), k);
      const json& e = (*components)[k];
      attestation::ManifestEntry entry;
      DTCB_READ(name, r.String(e, kpath, "name"));
      DTCB_READ(version, r.String(e, kpath, "version", std::string()));
      DTCB_READ(svn, r.U64(e, kpath, "svn", 0));
      DTCB_READ(digest, r.Hex<crypto::Digest>(e, kpath, "code_digest"));
      entry.component_name = name;
      entry.version = version;
      entry.svn = svn;
      entry.code_digest = digest;
      node.components.push_back(std::move(entry));
    }
    c.nodes.push_back(std::move(node));
    node_by_id[id] = &c.nodes.back();
  }

  for (size_t i = 0; i < c.chains.size(); ++i) {
    const ChainConfig& chain = c.chains[i];
    if (chain.delegate.empty()) continue;
    const std::string path = Reader::Sub(Reader::Sub("/chains", i), "delegate");
    auto it = node_by_id.find(chain.delegate);
    if (it == node_by_id.end()) {
      return r.Error(path, absl::StrCat("unknown delegate \"", chain.delegate,
                                        "\""));
    }
    if (!it->second->gateway || it->second->chain_id != chain.chain_id) {
      return r.Error(path, absl::StrCat("delegate ", chain.delegate,
                                        " is not a gateway of ",
                                        chain.chain_id));
    }
  }

  // Policy.
  DTCB_READ(policy, r.Field(doc, "", "policy", false));
  if (policy != nullptr) {
    const std::string path = "/policy";
    DTCB_READ(required, r.Array(*policy, path, "required_components", false));
    for (size_t k = 0; k < required->size(); ++k) {
      const std::string kpath =
          Reader::Sub(Reader::Sub(path, "required_components"), k);
      const json& e = (*required)[k];
      attestation::RequiredComponent rc;
      DTCB_READ(name, r.String(e, kpath, "name"));
      DTCB_READ(min_svn, r.U64(e, kpath, "min_svn", 0));
      rc.name = name;
      rc.min_svn = min_svn;
      DTCB_READ(pinned, r.Field(e, kpath, "digest", false));
      if (pinned != nullptr) {
        DTCB_READ(d, r.Hex<crypto::Digest>(e, kpath, "digest"));
        rc.pinned_digest = d;
      }
      c.policy.required_components.push_back(std::move(rc));
    }
    DTCB_READ(age, r.U64(*policy, path, "max_quote_age_ticks",
                         c.policy.max_quote_age_ticks));
    DTCB_READ(m, r.U64(*policy, path, "quorum_m", c.policy.quorum_m));
    DTCB_READ(n, r.U64(*policy, path, "quorum_n", c.policy.quorum_n));
    DTCB_READ(threshold, r.U64(*policy, path, "sensitive_threshold",
                               c.policy.sensitive_threshold));
    DTCB_READ(grace, r.U64(*policy, path, "grace_blocks",
                           c.policy.grace_blocks));
    if (m < 1 || m > n) {
      return r.Error(path, "quorum must satisfy 1 <= quorum_m <= quorum_n");
    }
    c.policy.max_quote_age_ticks = age;
    c.policy.quorum_m = m;
    c.policy.quorum_n = n;
    c.policy.sensitive_threshold = threshold;
    c.policy.grace_blocks = grace;
  }

  // Network.
  DTCB_READ(default_link, r.Field(doc, "", "default_link", false));
  if (default_link != nullptr) {
    DTCB_READ(p, ReadLinkParams(r, *default_link, "/default_link",
                                ledger::LinkParams{}));
    c.default_link = p;
  }
  auto read_link = [&](const json& j,
                       const std::string& path) -> absl::StatusOr<LinkConfig> {
    LinkConfig link;
    DTCB_READ(from, r.String(j, path, "from"));
    DTCB_READ(to, r.String(j, path, "to"));
    const std::pair<std::string, std::string> ends[] = {{"from", from},
                                                        {"to", to}};
    for (const auto& [key, id] : ends) {
      if (!node_by_id.contains(id)) {
        return r.Error(Reader::Sub(path, key),
                       absl::StrCat("unknown node \"", id, "\""));
      }
    }
    DTCB_READ(p, ReadLinkParams(r, j, path, c.default_link));
    link.from = from;
    link.to = to;
    link.params = p;
    return link;
  };
  DTCB_READ(links, r.Array(doc, "", "links", false));
  for (size_t i = 0; i < links->size(); ++i) {
    DTCB_READ(link, read_link((*links)[i], Reader::Sub("/links", i)));
    c.links.push_back(std::move(link));
  }

  // Script.
  DTCB_READ(script, r.Array(doc, "", "script", false));
  Tick last_tick = 0;
  for (size_t i = 0; i < script->size(); ++i) {
    const std::string path = Reader::Sub("/script", i);
    const json& j = (*script)[i];
    ScriptAction a;
    a.line = r.Line(path);
    DTCB_READ(tick, r.U64(j, path, "tick", std::nullopt));
    if (tick < last_tick) {
      return r.Error(Reader::Sub(path, "tick"),
                     "script actions must be ordered by tick");
    }
    last_tick = tick;
    a.tick = tick;
    DTCB_READ(action, r.String(j, path, "action"));
    auto require_node = [&](const std::string& key)
        -> absl::StatusOr<std::string> {
      DTCB_READ(id, r.String(j, path, key));
      if (!node_by_id.contains(id)) {
        return r.Error(Reader::Sub(path, key),
                       absl::StrCat("unknown node \"", id, "\""));
      }
      return id;
    };
    if (action == "transfer") {
      a.kind = ScriptAction::Kind::kTransfer;
      DTCB_READ(chain, r.String(j, path, "chain"));
      DTCB_READ(asset, r.String(j, path, "asset"));
      DTCB_READ(to_chain, r.String(j, path, "to_chain"));
      DTCB_READ(to_owner, r.String(j, path, "to_owner"));
      if (!chain_ids.contains(chain) || !chain_ids.contains(to_chain)) {
        return r.Error(path, "transfer references an unknown chain");
      }
      if (!user_names.contains(to_owner)) {
        return r.Error(Reader::Sub(path, "to_owner"),
                       absl::StrCat("unknown user \"", to_owner, "\""));
      }
      a.chain = chain;
      a.asset = asset;
      a.to_chain = to_chain;
      a.to_owner = to_owner;
    } else if (action == "crash") {
      a.kind = ScriptAction::Kind::kCrash;
      DTCB_READ(node, require_node("node"));
      a.node = node;
      DTCB_READ(duration, r.Field(j, path, "duration", false));
      if (duration != nullptr) {
        DTCB_READ(d, r.U64(j, path, "duration", std::nullopt));
        a.duration = d;
      }
    } else if (action == "corrupt_next_message") {
      a.kind = ScriptAction::Kind::kCorruptNextMessage;
      DTCB_READ(node, require_node("node"));
      a.node = node;
    } else if (action == "link") {
      a.kind = ScriptAction::Kind::kSetLink;
      DTCB_READ(link, read_link(j, path));
      a.link = std::move(link);
    } else {
      return r.Error(Reader::Sub(path, "action"),
                     absl::StrCat("unknown action \"", action, "\""));
    }
    c.script.push_back(std::move(a));
  }
  return c;
}

#undef DTCB_READ

}  // namespace

absl::Status ValidateConfig(const ScenarioConfig& config) {
  std::set<std::string> chains;
  for (const auto& c : config.chains) {
    if (!chains.insert(c.chain_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate chain_id \"", c.chain_id, "\""));
    }
    if (c.block_interval < 1) {
      return absl::InvalidArgumentError("block_interval must be at least 1");
    }
  }
  std::set<std::string> users;
  for (const auto& u : config.users) {
    if (!users.insert(u.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate user \"", u.name, "\""));
    }
  }
  std::map<std::string, const NodeConfig*> nodes;
  for (const auto& n : config.nodes) {
    if (!nodes.emplace(n.node_id, &n).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate node_id \"", n.node_id, "\""));
    }
    if (!chains.contains(n.chain_id)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "node ", n.node_id, " references unknown chain \"", n.chain_id, "\""));
    }
  }
  for (const auto& c : config.chains) {
    std::set<std::string> labels;
    for (const auto& a : c.assets) {
      if (!labels.insert(a.label).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "duplicate asset label \"", a.label, "\" on ", c.chain_id));
      }
      if (!users.contains(a.owner)) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown user \"", a.owner, "\""));
      }
    }
    if (c.delegate.empty()) continue;
    auto it = nodes.find(c.delegate);
    if (it == nodes.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown delegate \"", c.delegate, "\""));
    }
    if (!it->second->gateway || it->second->chain_id != c.chain_id) {
      return absl::InvalidArgumentError(absl::StrCat(
          "delegate ", c.delegate, " is not a gateway of ", c.chain_id));
    }
  }
  auto known_node = [&](const std::string& id) -> absl::Status {
    if (nodes.contains(id)) return absl::OkStatus();
    return absl::InvalidArgumentError(absl::StrCat("unknown node \"", id, "\""));
  };
  Tick last_tick = 0;
  for (const auto& a : config.script) {
    if (a.tick < last_tick) {
      return absl::InvalidArgumentError("script actions must be ordered by tick");
    }
    last_tick = a.tick;
    switch (a.kind) {
      case ScriptAction::Kind::kTransfer:
        if (!chains.contains(a.chain) || !chains.contains(a.to_chain)) {
          return absl::InvalidArgumentError(
              "transfer references an unknown chain");
        }
        if (!users.contains(a.to_owner)) {
          return absl::InvalidArgumentError(
              absl::StrCat("unknown user \"", a.to_owner, "\""));
        }
        break;
      case ScriptAction::Kind::kCrash:
      case ScriptAction::Kind::kCorruptNextMessage:
        if (auto s = known_node(a.node); !s.ok()) return s;
        break;
      case ScriptAction::Kind::kSetLink:
        if (!a.link.has_value()) {
          return absl::InvalidArgumentError("link action without a link");
        }
        if (auto s = known_node(a.link->from); !s.ok()) return s;
        if (auto s = known_node(a.link->to); !s.ok()) return s;
        break;
    }
  }
  for (const auto& l : config.links) {
    if (auto s = known_node(l.from); !s.ok()) return s;
    if (auto s = known_node(l.to); !s.ok()) return s;
  }
  auto check_link = [](const ledger::LinkParams& p) {
    return p.delay_min >= 1 && p.delay_min <= p.delay_max &&
           p.drop_probability >= 0 && p.drop_probability <= 1 &&
           p.duplicate_probability >= 0 && p.duplicate_probability <= 1;
  };
  if (!check_link(config.default_link)) {
    return absl::InvalidArgumentError("invalid default_link");
  }
  for (const auto& l : config.links) {
    if (!check_link(l.params)) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid link ", l.from, " -> ", l.to));
    }
  }
  if (config.policy.quorum_m < 1 ||
      config.policy.quorum_m > config.policy.quorum_n) {
    return absl::InvalidArgumentError(
        "quorum must satisfy 1 <= quorum_m <= quorum_n");
  }
  return absl::OkStatus();
}

absl::StatusOr<ScenarioConfig> ParseConfig(std::string_view text) {
  std::map<std::string, int> lines;
  auto doc = ParseWithIndex(text, &lines);
  if (!doc.ok()) return doc.status();
  Reader reader(std::move(lines));
  auto config = ReadConfig(reader, *doc);
  if (!config.ok()) return config.status();
  if (auto s = ValidateConfig(*config); !s.ok()) return s;
  return config;
}

absl::StatusOr<ScenarioConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseConfig(buffer.str());
  if (!config.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", std::string(config.status().message())));
  }
  return config;
}

absl::StatusOr<std::vector<dice::LayerMeasurement>> ParseMeasurements(
    std::string_view text) {
  std::map<std::string, int> lines;
  auto doc = ParseWithIndex(text, &lines);
  if (!doc.ok()) return doc.status();
  Reader reader(std::move(lines));
  if (doc->is_array()) return ReadLayers(reader, *doc, "");
  auto arr = reader.Array(*doc, "", "layers", true);
  if (!arr.ok()) return arr.status();
  return ReadLayers(reader, **arr, "/layers");
}

}  // namespace dtcb::scenario
