"""Compare the numba and pure-numpy kernel backends on the hot paths.

Runs each workload in a subprocess with F2REG_BACKEND forced, so both
paths go through exactly the code the library dispatches at import time.

    python3 benchmarks/bench_backends.py
"""

import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, os, time
import numpy as np
from fractions import Fraction
from f2reg import _kernels, f2core, regularize
from f2reg.spectrum import FunctionTable, wht

results = {"backend": _kernels.BACKEND}

# exact WHT on a 2^16 +-1 table (repeated)
rng = np.random.default_rng(1)
t16 = FunctionTable.from_ints(16, np.where(rng.integers(0, 2, 1 << 16), 1, -1).tolist(), 1, "pm1")
wht(t16)  # warm the JIT before timing
t0 = time.perf_counter()
for _ in range(10):
    wht(t16)
results["wht_n16_ms"] = (time.perf_counter() - t0) / 10 * 1e3

# exhaustive regularity scan at n=8, codim <= 2
nums = rng.integers(-16, 17, size=256)
t8 = FunctionTable.from_ints(8, nums.tolist(), 16, "bounded")
t0 = time.perf_counter()
regularize.exact_regularity_number(t8, Fraction(1, 64), max_codim=2)
results["scan_n8_codim2_s"] = time.perf_counter() - t0

print(json.dumps(results))
"""


def run(backend: str) -> dict:
    env = dict(os.environ, F2REG_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    rows = [run("numba"), run("numpy")]
    print(f"{'backend':<8} {'wht n=16 (ms)':>14} {'scan n=8 codim<=2 (s)':>22}")
    for r in rows:
        print(f"{r['backend']:<8} {r['wht_n16_ms']:>14.3f} {r['scan_n8_codim2_s']:>22.3f}")


if __name__ == "__main__":
    main()
