"""Time the numba and numpy kernel backends on Monte-Carlo sized inputs.

    python3 benchmarks/bench_kernels.py [--n 32768] [--repeat 5]

The last section runs one full estimate per backend in a subprocess, since the
backend is fixed at import time by ORTHOBICM_DISABLE_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from orthobicm import kernels
from orthobicm.constellation import labeling_natural, make_bippm

E2E = """
import time
from orthobicm import kernels
from orthobicm.channels import ChannelModel, NoiseConfig
from orthobicm.constellation import labeling_natural, make_bippm
from orthobicm.mi import simulate
s = make_bippm(2)
simulate(s, None, ChannelModel("{det}", NoiseConfig(2.0)), 2000)  # warm-up / jit
t0 = time.perf_counter()
if "{det}" == "coherent":
    s = make_bippm(16)
    simulate(s, labeling_natural(s), ChannelModel("coherent", NoiseConfig(2.0)), 200_000)
else:
    simulate(s, None, ChannelModel("{det}", NoiseConfig(2.0)), 200_000)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def best(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1 << 15, help="samples per call (one block)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    s = make_bippm(16)
    bits = np.ascontiguousarray(labeling_natural(s).bits)
    metrics = rng.normal(size=(args.n, 16)) * 4
    sym = rng.integers(16, size=args.n)
    z = rng.chisquare(1, size=(args.n, 16))
    zd = rng.normal(1, 1, size=args.n)

    cases = {
        "mi_terms (16-biPPM)": lambda b: b.mi_terms(metrics, sym, bits),
        "energy_metrics (16 dims)": lambda b: b.energy_metrics(z, 2.0),
        "diff_logpdf": lambda b: b.diff_logpdf(zd, 1.0, 0.5),
    }
    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, call in cases.items():
        times = {name: best(lambda b=b: call(b), args.repeat) for name, b in backends.items()}
        row = "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        speed = f"{times['numpy'] / times['numba']:8.1f}x" if "numba" in times else ""
        print(f"{label:28s}{row}  {speed}")

    print("\nend to end, 200k samples:")
    for det in ("coherent", "differential"):
        for flag in ("1", "0"):
            env = dict(os.environ, ORTHOBICM_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", E2E.format(det=det)], env=env,
                                 capture_output=True, text=True, check=True).stdout.split()
            print(f"  {det:13s} {out[0]:6s} {float(out[1]):7.2f} s")


if __name__ == "__main__":
    main()
