"""Command-line front end: build, search, verify, and bench subcommands.

Exit codes: 0 success, 1 validation or I/O error, 2 verification failure.
"""

import argparse
import csv
import dataclasses
import os
import resource
import sys
import time

import numpy as np

from ._dispatch import lane_name
from .cst import CstIndex
from .gst import GstIndex
from .indexio import load_index, save_index
from .matcher import ScanCounters, find_occurrences, search
from .oracle import longest_matches
from .textindex import RESERVED_BYTES, ingest

DEFAULT_SEED = 20240811
ORACLE_TEXT_CAP = 1 << 20

CST_PROFILES = [("plain", "plain"), ("plain", "compact"),
                ("sampled", "plain"), ("sampled", "compact")]


@dataclasses.dataclass
class BenchReport:
    """One benchmark row; field order is the CSV column order."""

    config: str
    patterns: int
    dict_bytes: int
    build_seconds: float
    resident_bytes: int
    serialized_bytes: int
    text_bytes: int
    search_seconds: float
    occurrences: int
    comparisons: int
    links: int


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    """User-facing validation failure; message printed, exit code 1."""


def _say(msg):
    print(msg, file=sys.stderr)


def read_dictionary(path):
    """Newline-delimited patterns; blank lines skipped, duplicates dropped."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise CliError(f"cannot read dictionary: {e}") from None
    pats, seen, dups = [], set(), 0
    for line in data.split(b"\n"):
        if not line:
            continue
        if line in seen:
            dups += 1
            continue
        seen.add(line)
        pats.append(line)
    if dups:
        _say(f"warning: dropped {dups} duplicate pattern(s)")
    if not pats:
        raise CliError(f"no patterns in {path}")
    return pats


def read_text(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(f"cannot read text: {e}") from None


def build_index(pats, backend, csa, lcp, sample_rate):
    dictionary = ingest(pats)
    if backend == "gst":
        return GstIndex(dictionary)
    return CstIndex.build(dictionary, csa_profile=csa, lcp_profile=lcp,
                          sample_rate=sample_rate)


def _seed(args):
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("SDM_SEED", DEFAULT_SEED))


# --- build --------------------------------------------------------------------


def cmd_build(args):
    pats = read_dictionary(args.dictionary)
    if args.backend == "gst" and args.output:
        raise CliError("the gst backend is an in-memory baseline and cannot "
                       "be written to a file; use --backend cst")
    t0 = time.perf_counter()
    index = build_index(pats, args.backend, args.csa, args.lcp,
                        args.sample_rate)
    dt = time.perf_counter() - t0
    _say(f"built {args.backend} index: {len(pats)} patterns, "
         f"{sum(map(len, pats))} pattern bytes, "
         f"{index.marked_count()} marked nodes, "
         f"{index.memory_bytes()} resident bytes, {dt:.3f}s")
    if args.output:
        nbytes = save_index(index, args.output)
        _say(f"wrote {args.output}: {nbytes} bytes "
             f"(csa={args.csa}, lcp={args.lcp})")
    return 0


# --- search -------------------------------------------------------------------


def cmd_search(args):
    index = load_index(args.index)
    text = read_text(args.text)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        counters = ScanCounters()
        count = search(
            index, text,
            lambda occ: out.write(f"{occ.end_pos}\t{occ.pattern_id}\t{occ.length}\n"),
            counters=counters)
    finally:
        if args.output:
            out.close()
    _say(f"{count} occurrence(s) in {len(text)} bytes "
         f"({counters.comparisons} comparisons, {counters.links} links)")
    return 0


# --- verify -------------------------------------------------------------------


def _triples(occs):
    return [(o.end_pos, o.pattern_id, o.length) for o in occs]


def _check_one(pats, text, args, label):
    """Compare both backends against the oracle; return divergence or None."""
    want = longest_matches(pats, text)
    gst = build_index(pats, "gst", None, None, 0)
    cst = build_index(pats, "cst", args.csa, args.lcp, args.sample_rate)
    for name, ix in (("gst", gst), (f"cst({args.csa},{args.lcp})", cst)):
        got = _triples(find_occurrences(ix, text))
        if got != want:
            at = next((i for i, pair in enumerate(zip(got, want))
                       if pair[0] != pair[1]), min(len(got), len(want)))
            return (f"FAIL {label}: {name} diverges from oracle at record "
                    f"{at}: got {got[at] if at < len(got) else None}, "
                    f"want {want[at] if at < len(want) else None}")
    return None


def _random_case(rng, alphabet, max_pats, max_len, max_text):
    npats = rng.randint(1, max_pats + 1)
    pats, seen = [], set()
    while len(pats) < npats:
        m = rng.randint(1, max_len + 1)
        p = bytes(alphabet[i] for i in rng.randint(0, len(alphabet), m))
        for cand in (p, p[:max(1, m // 2)]):
            if cand and cand not in seen:
                seen.add(cand)
                pats.append(cand)
    n = rng.randint(1, max_text + 1)
    text = bytearray(alphabet[i] for i in rng.randint(0, len(alphabet), n))
    for _ in range(4):
        p = pats[rng.randint(0, len(pats))]
        if len(p) <= n:
            at = rng.randint(0, n - len(p) + 1)
            text[at:at + len(p)] = p
    return pats, bytes(text)


def cmd_verify(args):
    if args.text:
        pats = read_dictionary(args.dictionary)
        text = read_text(args.text)
        if len(text) > ORACLE_TEXT_CAP and not args.force:
            raise CliError(
                f"text is {len(text)} bytes; the verification oracle is "
                f"quadratic and capped at {ORACLE_TEXT_CAP} (use --force)")
        failure = _check_one(pats, text, args, args.text)
        if failure:
            _say(failure)
            return 2
        _say(f"PASS {args.text}: both backends match the oracle "
             f"({len(longest_matches(pats, text))} occurrences)")
        return 0

    seed = _seed(args)
    rng = np.random.RandomState(seed)
    alphabet = args.alphabet.encode("ascii")
    if any(b in RESERVED_BYTES for b in alphabet):
        raise CliError("alphabet contains a reserved byte")
    _say(f"running {args.trials} randomized trials, seed={seed}, "
         f"alphabet={args.alphabet!r}")
    for trial in range(args.trials):
        pats, text = _random_case(rng, alphabet, 12, 12, 400)
        failure = _check_one(pats, text, args, f"trial {trial}")
        if failure:
            _say(failure)
            _say(f"reproduce with seed={seed}")
            return 2
    _say(f"PASS {args.trials} trials, seed={seed}")
    return 0


# --- bench --------------------------------------------------------------------


def _bench_configs(backend):
    rows = []
    if backend in ("gst", "all"):
        rows.append(("gst", None, None))
    if backend in ("cst", "all"):
        rows.extend(("cst", c, l) for c, l in CST_PROFILES)
    return rows


def _config_name(backend, csa, lcp):
    return "gst" if backend == "gst" else f"cst/{csa}/{lcp}"


def cmd_bench(args):
    pats = read_dictionary(args.dictionary)
    text = read_text(args.text)
    dict_bytes = sum(map(len, pats))

    # warm the compiled kernels so rows measure steady-state behavior
    warm = build_index(pats[: min(4, len(pats))], "cst", "plain", "plain", 2)
    search(warm, text[:256])

    reports = []
    for backend, csa, lcp in _bench_configs(args.backend):
        t0 = time.perf_counter()
        index = build_index(pats, backend, csa, lcp, args.sample_rate)
        build_s = time.perf_counter() - t0
        serialized = 0
        if backend == "cst":
            from .indexio import dumps
            serialized = len(dumps(index))
        counters = ScanCounters()
        t0 = time.perf_counter()
        count = search(index, text, counters=counters)
        search_s = time.perf_counter() - t0
        reports.append(BenchReport(
            config=_config_name(backend, csa, lcp),
            patterns=len(pats), dict_bytes=dict_bytes,
            build_seconds=round(build_s, 6),
            resident_bytes=index.memory_bytes(), serialized_bytes=serialized,
            text_bytes=len(text), search_seconds=round(search_s, 6),
            occurrences=count, comparisons=counters.comparisons,
            links=counters.links))

    fields = [f.name for f in dataclasses.fields(BenchReport)]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            for r in reports:
                w.writerow(dataclasses.asdict(r))
        _say(f"wrote {args.csv}")

    rows = [fields] + [[str(getattr(r, f)) for f in fields] for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(fields))]
    for row in rows:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    print(f"# lane={lane_name()} peak_rss_kb={peak_kb}")
    return 0


# --- argument wiring ----------------------------------------------------------


def _add_profile_flags(p):
    p.add_argument("--csa", choices=["plain", "sampled"], default="sampled",
                   help="suffix-array layer profile (default sampled)")
    p.add_argument("--lcp", choices=["plain", "compact"], default="compact",
                   help="lcp storage profile (default compact)")
    p.add_argument("--sample-rate", type=int, default=32,
                   help="sampling step for the sampled csa (default 32)")


def make_parser():
    parser = _Parser(prog="sdm",
                     description="dictionary matching over suffix trees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from a dictionary file")
    p.add_argument("dictionary", help="newline-delimited pattern file")
    p.add_argument("-o", "--output", help="index output path (cst only)")
    p.add_argument("--backend", choices=["gst", "cst"], default="cst")
    _add_profile_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="scan a text with a saved index")
    p.add_argument("index", help="index file written by build")
    p.add_argument("text", help="text file to scan")
    p.add_argument("-o", "--output",
                   help="TSV output path (default stdout); columns are "
                        "end_pos, pattern_id, length")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify",
                       help="check both backends against a brute-force oracle")
    p.add_argument("dictionary")
    p.add_argument("text", nargs="?",
                   help="text file; omit to run randomized trials")
    p.add_argument("--trials", type=int, default=1000,
                   help="randomized trial count when no text is given")
    p.add_argument("--seed", type=int, default=None,
                   help="trial seed (default: SDM_SEED env or "
                        f"{DEFAULT_SEED})")
    p.add_argument("--alphabet", default="acgt",
                   help="alphabet for randomized trials")
    p.add_argument("--force", action="store_true",
                   help="run the quadratic oracle past the size cap")
    _add_profile_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench",
                       help="time and size every configuration on one input")
    p.add_argument("dictionary")
    p.add_argument("text")
    p.add_argument("--backend", choices=["gst", "cst", "all"], default="all")
    p.add_argument("--csv", help="also write rows to this CSV file")
    p.add_argument("--sample-rate", type=int, default=32)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as e:
        _say(f"error: {e}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
