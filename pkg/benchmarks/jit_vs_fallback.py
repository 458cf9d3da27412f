#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback lane.

Runs one identical build+search workload in two child processes, one with
SDM_JIT=1 and one with SDM_JIT=0, then prints the wall times side by side.
The lanes must agree on occurrence and probe counts; the script fails loudly
if they do not, so it doubles as a cross-lane differential check.

Usage: python3 benchmarks/jit_vs_fallback.py [--patterns N] [--max-len N]
       [--text-bytes N] [--seed N] [--sample-rate N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

ALPHABET = b"acgt"


def workload(args):
    rng = np.random.RandomState(args.seed)
    pats, seen = [], set()
    while len(pats) < args.patterns:
        m = rng.randint(1, args.max_len + 1)
        p = bytes(ALPHABET[i] for i in rng.randint(0, 4, m))
        if p not in seen:
            seen.add(p)
            pats.append(p)
    text = bytes(ALPHABET[i] for i in rng.randint(0, 4, args.text_bytes))
    return pats, text


def run_child(args):
    import sdm

    pats, text = workload(args)
    dictionary = sdm.ingest(pats)

    # warm every kernel once so jit compilation stays out of the timings
    warm = sdm.CstIndex.build(sdm.ingest(pats[:4]), sample_rate=4)
    sdm.search(warm, text[:512])
    sdm.search(sdm.GstIndex(sdm.ingest(pats[:4])), text[:512])

    out = {"lane": sdm.lane_name()}

    t0 = time.perf_counter()
    gst = sdm.GstIndex(dictionary)
    out["gst_build_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    cst = sdm.CstIndex.build(dictionary, sample_rate=args.sample_rate)
    out["cst_build_s"] = time.perf_counter() - t0

    for name, ix in (("gst", gst), ("cst", cst)):
        counters = sdm.ScanCounters()
        t0 = time.perf_counter()
        count = sdm.search(ix, text, counters=counters)
        out[f"{name}_search_s"] = time.perf_counter() - t0
        out[f"{name}_occurrences"] = count
        out[f"{name}_comparisons"] = counters.comparisons
        out[f"{name}_links"] = counters.links
        out[f"{name}_resident_bytes"] = ix.memory_bytes()
    print(json.dumps(out))


def run_parent(args):
    results = {}
    for flag, label in (("1", "jit"), ("0", "fallback")):
        env = dict(os.environ, SDM_JIT=flag)
        cmd = [sys.executable, __file__, "--child",
               "--patterns", str(args.patterns),
               "--max-len", str(args.max_len),
               "--text-bytes", str(args.text_bytes),
               "--seed", str(args.seed),
               "--sample-rate", str(args.sample_rate)]
        print(f"running {label} lane ...", file=sys.stderr)
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            return 1
        results[label] = json.loads(proc.stdout)

    jit, fb = results["jit"], results["fallback"]
    if (jit["lane"], fb["lane"]) != ("jit", "fallback"):
        print("error: a lane did not come up as requested "
              f"({jit['lane']}, {fb['lane']}); is numba installed?",
              file=sys.stderr)
        return 1
    agree = True
    for key in ("gst_occurrences", "gst_comparisons", "gst_links",
                "cst_occurrences", "cst_comparisons", "cst_links",
                "gst_resident_bytes", "cst_resident_bytes"):
        if jit[key] != fb[key]:
            print(f"LANE DISAGREEMENT on {key}: jit={jit[key]} "
                  f"fallback={fb[key]}", file=sys.stderr)
            agree = False
    if not agree:
        return 1

    print(f"# {args.patterns} patterns (max len {args.max_len}), "
          f"{args.text_bytes} text bytes, seed {args.seed}")
    print(f"# occurrences={jit['gst_occurrences']} "
          f"comparisons(gst)={jit['gst_comparisons']} "
          f"comparisons(cst)={jit['cst_comparisons']}")
    header = f"{'phase':<12} {'jit (s)':>10} {'fallback (s)':>13} {'speedup':>8}"
    print(header)
    for key in ("gst_build_s", "cst_build_s", "gst_search_s", "cst_search_s"):
        a, b = jit[key], fb[key]
        ratio = b / a if a > 0 else float("inf")
        print(f"{key[:-2]:<12} {a:>10.4f} {b:>13.4f} {ratio:>7.1f}x")
    return 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    ap.add_argument("--patterns", type=int, default=200)
    ap.add_argument("--max-len", type=int, default=24)
    ap.add_argument("--text-bytes", type=int, default=40_000)
    ap.add_argument("--seed", type=int,
                    default=int(os.environ.get("SDM_SEED", 20240811)))
    ap.add_argument("--sample-rate", type=int, default=16)
    args = ap.parse_args()
    if args.child:
        run_child(args)
        return 0
    return run_parent(args)


if __name__ == "__main__":
    sys.exit(main())
