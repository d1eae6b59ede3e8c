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

// sim: scenario runner and standalone identity / quote tools.
//
// Exit codes: 0 pass, 1 invariant failure, 2 protocol rejection, 3 input
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dtcb/attestation/quote.h"
#include "dtcb/attestation/registers.h"
#include "dtcb/dice/identity.h"
#include "dtcb/scenario/config.h"
#include "dtcb/scenario/world.h"

namespace {

using namespace dtcb;  // NOLINT

constexpr int kPass = 0;
constexpr int kInvariantFailure = 1;
constexpr int kRejected = 2;
constexpr int kInputError = 3;

int InputError(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kInputError;
}

bool ReadFile(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

bool WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
absl::StatusOr<T> HexArg(const std::string& what, const std::string& hex) {
  auto v = T::FromHexString(Trim(hex));
  if (!v.ok()) {
    return absl::InvalidArgumentError(
        what + ": " + std::string(v.status().message()));
  }
  return v;
}

absl::StatusOr<dice::DeviceIdentity> LoadChain(const std::string& uds_hex,
                                               const std::string& path,
                                               attestation::Registers* regs) {
  auto uds = HexArg<crypto::Seed>("--uds", uds_hex);
  if (!uds.ok()) return uds.status();
  std::string text;
  if (!ReadFile(path, &text)) {
    return absl::NotFoundError("cannot read " + path);
  }
  auto layers = scenario::ParseMeasurements(text);
  if (!layers.ok()) {
    return absl::InvalidArgumentError(
        path + ": " + std::string(layers.status().message()));
  }
  auto identity = dice::BuildChain(*uds, *layers);
  if (!identity.ok()) return identity.status();
  if (regs != nullptr) {
    for (const auto& m : *layers) {
      if (auto s = regs->Extend(m.layer_index, m.code_digest); !s.ok()) {
        return s;
      }
    }
  }
  return identity;
}

int Run(const std::string& config_path, const std::string& log_path,
        const std::string& report_path, std::optional<uint64_t> ticks,
        std::optional<uint64_t> seed) {
  auto config = scenario::LoadConfig(config_path);
  if (!config.ok()) return InputError(std::string(config.status().message()));
  if (seed) config->seed = *seed;
  auto world = scenario::World::Build(*config);
  if (!world.ok()) return InputError(std::string(world.status().message()));
  scenario::RunReport report = (*world)->Run(ticks);

  if (!log_path.empty() && !WriteFile(log_path, (*world)->log().Render())) {
    return InputError("cannot write " + log_path);
  }
  if (!report_path.empty() && !WriteFile(report_path, report.ToJson() + "\n")) {
    return InputError("cannot write " + report_path);
  }

  std::cout << "seed " << report.seed << "  final tick " << report.final_tick
            << (report.quiescent ? "  (quiescent)" : "  (tick limit)") << "\n";
  for (const auto& chain : report.chains) {
    for (const auto& a : chain.assets) {
      std::cout << chain.chain_id << "  " << a.label << "  " << a.state
                << "  owner=" << a.owner;
      if (!a.redirect_chain.empty()) {
        std::cout << "  redirect=" << a.redirect_chain << ":"
                  << a.redirect_id.substr(0, 16);
      }
      std::cout << "\n";
    }
  }
  for (const auto& v : report.verdicts) {
    std::cout << (v.pass ? "PASS  " : "FAIL  ") << v.name;
    if (v.first_violation) {
      std::cout << "  first violation at tick " << *v.first_violation << ": "
                << v.detail;
    }
    std::cout << "\n";
  }
  for (const auto& h : report.hazards) std::cout << "HAZARD  " << h << "\n";
  for (const auto& f : report.script_failures) {
    std::cout << "SCRIPT FAILED  " << f << "\n";
  }
  std::cout << "log digest " << report.log_digest << "\n";
  return report.Passed() ? kPass : kInvariantFailure;
}

int Derive(const std::string& uds_hex, const std::string& path) {
  auto identity = LoadChain(uds_hex, path, nullptr);
  if (!identity.ok()) return InputError(std::string(identity.status().message()));
  std::cout << "cdi " << identity->cdi().hex() << "\n";
  std::cout << "device_id " << identity->device_id().public_key.hex() << "\n";
  for (size_t k = 0; k < identity->alias_ids().size(); ++k) {
    std::cout << "alias[" << k + 1 << "] "
              << identity->alias_ids()[k].public_key.hex() << "\n";
  }
  return kPass;
}

int CreateQuote(const std::string& uds_hex, const std::string& path,
                const std::string& nonce_hex, const std::string& out_path) {
  attestation::Registers regs;
  auto identity = LoadChain(uds_hex, path, &regs);
  if (!identity.ok()) return InputError(std::string(identity.status().message()));
  auto nonce = HexArg<crypto::Nonce>("--nonce", nonce_hex);
  if (!nonce.ok()) return InputError(std::string(nonce.status().message()));
  auto quote = attestation::CreateQuote(*identity, regs, *nonce);
  if (!quote.ok()) return InputError(std::string(quote.status().message()));
  if (!WriteFile(out_path, ToHex(quote->Serialize()) + "\n")) {
    return InputError("cannot write " + out_path);
  }
  std::cout << "key " << quote->signer.hex() << "\n";
  return kPass;
}

int VerifyQuote(const std::string& quote_path, const std::string& nonce_hex,
                const std::string& key_hex, uint64_t age, uint64_t max_age) {
  std::string text;
  if (!ReadFile(quote_path, &text)) {
    return InputError("cannot read " + quote_path);
  }
  auto raw = FromHex(Trim(text));
  if (!raw.ok()) {
    return InputError(quote_path + ": " + std::string(raw.status().message()));
  }
  auto quote = attestation::Quote::Parse(*raw);
  if (!quote.ok()) {
    return InputError(quote_path + ": " +
                      std::string(quote.status().message()));
  }
  auto nonce = HexArg<crypto::Nonce>("--nonce", nonce_hex);
  if (!nonce.ok()) return InputError(std::string(nonce.status().message()));
  auto key = HexArg<crypto::PublicKey>("--key", key_hex);
  if (!key.ok()) return InputError(std::string(key.status().message()));
  attestation::DtcbPolicy policy;
  policy.max_quote_age_ticks = max_age;
  Verdict v = attestation::VerifyQuote(*quote, *key, *nonce, policy, age);
  if (v) {
    std::cout << "accepted\n";
    return kPass;
  }
  std::cout << "rejected: " << v.reason() << "\n";
  return kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gateway interoperability simulator"};
  app.require_subcommand(1);

  std::string config_path, log_path, report_path;
  std::optional<uint64_t> ticks, seed;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("config", config_path, "Scenario JSON")->required();
  run->add_option("--log", log_path, "Write the event log here");
  run->add_option("--report", report_path, "Write the JSON report here");
  run->add_option("--ticks", ticks, "Tick limit (overrides the file)");
  run->add_option("--seed", seed, "Seed (overrides the file)");

  std::string uds, measurements, nonce, key, quote_path, out_path;
  auto* derive = app.add_subcommand("derive", "Print a derivation chain");
  derive->add_option("--uds", uds, "Unique device secret (hex)")->required();
  derive->add_option("--measurements", measurements, "Layer file (JSON)")
      ->required();

  auto* create = app.add_subcommand("create-quote", "Quote a chain's registers");
  create->add_option("--uds", uds, "Unique device secret (hex)")->required();
  create->add_option("--measurements", measurements, "Layer file (JSON)")
      ->required();
  create->add_option("--nonce", nonce, "Challenge nonce (hex)")->required();
  create->add_option("--out", out_path, "Quote output file (hex)")->required();

  uint64_t age = 0, max_age = 0;
  auto* verify = app.add_subcommand("verify-quote", "Verify a quote");
  verify->add_option("--quote", quote_path, "Quote file (hex)")->required();
  verify->add_option("--nonce", nonce, "Expected nonce (hex)")->required();
  verify->add_option("--key", key, "Expected signer key (hex)")->required();
  verify->add_option("--age", age, "Ticks since the nonce was issued");
  verify->add_option("--max-age", max_age, "Freshness window in ticks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  }

  if (*run) return Run(config_path, log_path, report_path, ticks, seed);
  if (*derive) return Derive(uds, measurements);
  if (*create) return CreateQuote(uds, measurements, nonce, out_path);
  return VerifyQuote(quote_path, nonce, key, age, max_age);
}
