"""Compare the numba kernels with their numpy twins.

Kernel timings run both implementations in one process. The end-to-end
section re-runs a traversal in a child process per backend, since the
backend is chosen once at import from ``SKG_DISABLE_NUMBA``.

    python benchmarks/bench_kernels.py [--docs 100000] [--repeat 7]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from skg import _kernels_numba as nb
from skg import _kernels_numpy as npk


def timed(fn, *args, repeat):
    fn(*args)
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        out.append(time.perf_counter() - t)
    return statistics.median(out) * 1000


def sorted_ids(rng, universe, size):
    return np.sort(rng.choice(universe, size, replace=False)).astype(np.int32)


def kernel_cases(n_docs, rng):
    big = sorted_ids(rng, n_docs, n_docs // 3)
    mid = sorted_ids(rng, n_docs, n_docs // 4)
    small = sorted_ids(rng, n_docs, 200)
    n_terms, per_doc = 10_000, 10
    fwd_terms = rng.integers(0, n_terms, n_docs * per_doc).astype(np.int32)
    fwd_ptr = np.arange(0, n_docs * per_doc + 1, per_doc, dtype=np.int64)
    fg = sorted_ids(rng, n_docs, n_docs // 10)
    return [
        ("intersect_merge 33k x 25k", "intersect_merge", (big, mid)),
        ("intersect_gallop 200 x 33k", "intersect_gallop", (small, big)),
        ("intersect_count 33k x 25k", "intersect_count", (big, mid)),
        ("union 33k + 25k", "union", (big, mid)),
        ("difference 33k - 25k", "difference", (big, mid)),
        ("gather_ranges 10k rows", "gather_ranges", (fwd_ptr[fg], fwd_ptr[fg + 1])),
        ("count_terms 10k docs", "count_terms", (fwd_ptr, fwd_terms, fg, n_terms)),
    ]


SCRIPT = """
import json, statistics, time
from skg import Traverser, build_snapshot, kernels
from skg.synthetic import skills_schema, zipf_corpus
snap = build_snapshot(zipf_corpus({docs}, 10_000, seed=0), skills_schema())
tr = Traverser(snap)
out = {{"backend": kernels.BACKEND}}
for scorer in ("relatedness", "popularity"):
    req = {{"starting_node": ["*:*"], "nodes": [{{"type": "skills", "limit": 25, "scorer": scorer}}]}}
    tr.traverse(req)
    ts = []
    for _ in range({repeat}):
        t = time.perf_counter(); tr.traverse(req); ts.append(time.perf_counter() - t)
    out[scorer] = statistics.median(ts) * 1000
print(json.dumps(out))
"""


def end_to_end(docs, repeat):
    rows = []
    for flag in ("0", "1"):
        env = {**os.environ, "SKG_DISABLE_NUMBA": flag}
        proc = subprocess.run([sys.executable, "-c", SCRIPT.format(docs=docs, repeat=repeat)],
                              env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel':32} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for label, name, case in kernel_cases(args.docs, rng):
        a = timed(getattr(nb, name), *case, repeat=args.repeat)
        b = timed(getattr(npk, name), *case, repeat=args.repeat)
        print(f"{label:32} {a:10.3f} {b:10.3f} {b / a:8.1f}x")

    if not args.skip_e2e:
        print(f"\ntraversal over {args.docs} docs, 10k-term field, limit 25 (median ms)")
        for row in end_to_end(args.docs, args.repeat):
            print(f"  {row['backend']:6} relatedness {row['relatedness']:8.2f}"
                  f"   popularity {row['popularity']:8.2f}")


if __name__ == "__main__":
    main()
