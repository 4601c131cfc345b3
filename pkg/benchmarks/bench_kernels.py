"""Time the hot kernels with and without numba.

Each path runs in its own interpreter because GPWB_DISABLE_JIT is read at
import time.  The JIT timing excludes the first (compiling) call.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from gpwb import _kernels as K
from gpwb.core_graph import cycle_graph
from gpwb.extension_graph import build_window, girth_check
from gpwb.graph_product import ProductContext
from gpwb.groups import cyclic

repeat = int(sys.argv[1])
ctx = ProductContext(cycle_graph(21), cyclic(2))
win = build_window(ctx, 2)
ptr, idx = win.indptr, win.indices
n = len(ptr) - 1
rng = np.random.default_rng(0)
sources = rng.choice(n, 64, replace=False)
d = K.bfs_many(ptr, idx, sources[:40])[:, sources[:40]]
quads = rng.integers(0, 40, size=(200_000, 4))

def timed(fn):
    fn()  # warm-up, compiles under numba
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    return best

res = {
    "jit": K.JIT_ENABLED,
    "bfs_many (64 sources, %d vertices)" % n: timed(lambda: K.bfs_many(ptr, idx, sources)),
    "delta_doubled_full (40 points)": timed(lambda: K.delta_doubled_full(d)),
    "delta_doubled_quads (200k quads)": timed(lambda: K.delta_doubled_quads(d, quads)),
    "girth_check C21/Z2 L=2 (circuit DFS)": timed(lambda: girth_check(ctx, L=2, n_max=21, window=win)),
}
print(json.dumps(res))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, GPWB_DISABLE_JIT="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    t = time.perf_counter()
    jit, ref = run(False, args.repeat), run(True, args.repeat)
    if not jit.pop("jit"):
        print("numba unavailable: both columns are the fallback")
    ref.pop("jit")
    print(f"{'kernel':40s} {'numba s':>10s} {'fallback s':>11s} {'speedup':>8s}")
    for k in jit:
        print(f"{k:40s} {jit[k]:10.4f} {ref[k]:11.4f} {ref[k] / max(jit[k], 1e-9):7.1f}x")
    print(f"(total wall {time.perf_counter() - t:.1f}s, best of {args.repeat})")


if __name__ == "__main__":
    main()
