#!/usr/bin/env python3
# Copyright 2026 The dtcb-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference derivation oracle, written independently of the C++ code.

  CDI        = HMAC-SHA256(UDS, 01 | len32(FMC) | FMC)
  secret[i]  = HMAC-SHA256(prev, 02 | u64(i) | len32(digest) | digest
                                    | len32(product) | product | u64(svn))
  DeviceID   = Ed25519 from seed SHA256(03 | len32(CDI) | CDI)
  AliasID[i] = Ed25519 from seed SHA256(04 | len32(secret[i]) | secret[i])

Usage:
  dice_oracle.py check-cli <sim binary> <scratch dir>
  dice_oracle.py vectors
"""

import hashlib
import hmac
import json
import os
import random
import subprocess
import sys

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat


def lp(b):
    return len(b).to_bytes(4, "big") + b


def u64(v):
    return v.to_bytes(8, "big")


def ed25519_pub(seed):
    key = Ed25519PrivateKey.from_private_bytes(seed)
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def derive(uds, layers):
    """layers: list of (code_digest bytes, product_id str, svn int)."""
    cdi = hmac.new(uds, b"\x01" + lp(layers[0][0]), hashlib.sha256).digest()
    device = ed25519_pub(hashlib.sha256(b"\x03" + lp(cdi)).digest())
    prev = cdi
    secrets, aliases = [], []
    for i, (digest, product, svn) in enumerate(layers):
        msg = b"\x02" + u64(i) + lp(digest) + lp(product.encode()) + u64(svn)
        prev = hmac.new(prev, msg, hashlib.sha256).digest()
        secrets.append(prev)
        if i > 0:
            aliases.append(ed25519_pub(hashlib.sha256(b"\x04" + lp(prev)).digest()))
    return cdi, device, secrets, aliases


def expected_cli_output(uds, layers):
    cdi, device, _, aliases = derive(uds, layers)
    lines = ["cdi " + cdi.hex(), "device_id " + device.hex()]
    lines += ["alias[%d] %s" % (k + 1, a.hex()) for k, a in enumerate(aliases)]
    return "\n".join(lines) + "\n"


def write_layers(path, layers):
    doc = [{"layer_index": i, "code_digest": d.hex(), "product_id": p, "svn": s}
           for i, (d, p, s) in enumerate(layers)]
    with open(path, "w") as f:
        json.dump(doc, f)


def run_sim(sim, uds, path):
    return subprocess.run([sim, "derive", "--uds", uds.hex(), "--measurements", path],
                          capture_output=True, text=True)


def check_cli(sim, scratch):
    os.makedirs(scratch, exist_ok=True)
    failures = 0

    # FIPS 180-2 sanity check of the hash underneath everything.
    assert hashlib.sha256(b"").hexdigest() == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")

    cases = [(bytes(32), [(bytes(32), "", 0)])]
    rng = random.Random(7)
    for _ in range(20):
        uds = bytes(rng.getrandbits(8) for _ in range(32))
        layers = [(bytes(rng.getrandbits(8) for _ in range(32)),
                   "p%d" % rng.randrange(100), rng.randrange(1 << 20))
                  for _ in range(3)]
        cases.append((uds, layers))

    for n, (uds, layers) in enumerate(cases):
        path = os.path.join(scratch, "layers_%d.json" % n)
        write_layers(path, layers)
        for attempt in range(2):
            got = run_sim(sim, uds, path)
            want = expected_cli_output(uds, layers)
            if got.returncode != 0 or got.stdout != want:
                failures += 1
                print("case %d run %d mismatch:\n--- sim\n%s--- oracle\n%s"
                      % (n, attempt, got.stdout + got.stderr, want))

    gap = os.path.join(scratch, "gap.json")
    with open(gap, "w") as f:
        json.dump([{"layer_index": 0, "code_digest": "00" * 32},
                   {"layer_index": 2, "code_digest": "00" * 32}], f)
    got = run_sim(sim, bytes(32), gap)
    if got.returncode != 3 or "chain gap" not in got.stderr:
        failures += 1
        print("layer gap not rejected: rc=%d %s" % (got.returncode, got.stderr))

    got = subprocess.run([sim, "derive", "--uds", "zz", "--measurements", gap],
                         capture_output=True, text=True)
    if got.returncode != 3:
        failures += 1
        print("malformed hex not rejected: rc=%d" % got.returncode)

    print("%d cases, %d failures" % (len(cases), failures))
    return 1 if failures else 0


def vectors():
    """Prints values that are frozen into the C++ tests."""
    rng = random.Random(2026)
    for n in range(3):
        uds = bytes(rng.getrandbits(8) for _ in range(32))
        layers = [(bytes(rng.getrandbits(8) for _ in range(32)), "layer%d" % i, i + 1)
                  for i in range(3)]
        cdi, device, secrets, aliases = derive(uds, layers)
        print("uds", uds.hex())
        for d, p, s in layers:
            print("  layer", d.hex(), p, s)
        print("  cdi", cdi.hex())
        print("  device_id", device.hex())
        for s in secrets:
            print("  secret", s.hex())
        for a in aliases:
            print("  alias", a.hex())
    cdi, device, secrets, _ = derive(bytes(32), [(bytes(32), "", 0)])
    print("zero cdi", cdi.hex())
    print("zero device_id", device.hex())
    print("zero secret0", secrets[0].hex())
    return 0


if __name__ == "__main__":
    if len(sys.argv) == 4 and sys.argv[1] == "check-cli":
        sys.exit(check_cli(sys.argv[2], sys.argv[3]))
    if len(sys.argv) == 2 and sys.argv[1] == "vectors":
        sys.exit(vectors())
    print(__doc__)
    sys.exit(2)
