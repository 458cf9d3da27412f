"""Succinct suffix tree vs naive string-set oracles and the pointer tree."""

import numpy as np
import pytest

from sdm.cst import ROOT, CstIndex
from sdm.gst import GstIndex
from sdm.textindex import ingest

DEMO_PATTERNS = [b"a", b"ate", b"bath", b"later"]
PROFILES = [("plain", "plain", 1), ("plain", "compact", 1),
            ("sampled", "plain", 3), ("sampled", "compact", 32)]


def build(patterns, csa="plain", lcp="plain", rate=1):
    return CstIndex.build(ingest(patterns), csa_profile=csa,
                          lcp_profile=lcp, sample_rate=rate)


def sorted_suffixes(concat):
    return sorted(concat[i:] for i in range(len(concat)))


def internal_labels(suffixes):
    """Branching prefixes: >= 2 distinct continuations, end-of-suffix
    counting as one (the zero-length-edge leaf case)."""
    prefixes = set()
    for s in suffixes:
        prefixes.update(s[:k] for k in range(1, len(s) + 1))
    out = {b""}
    for p in prefixes:
        conts = set()
        for s in suffixes:
            if s.startswith(p):
                conts.add(s[len(p)] if len(s) > len(p) else -1)
        if len(conts) >= 2:
            out.add(p)
    return out


def common_prefix(a, b):
    n = 0
    while n < len(a) and n < len(b) and a[n] == b[n]:
        n += 1
    return a[:n]


def all_nodes(idx):
    return [v for v in range(idx.bp.bv.nbits) if idx.bp.is_open(v)]


def check_against_strings(idx, patterns, rng=None):
    concat = b"\x01".join(patterns) + b"\x01"
    suffixes = sorted_suffixes(concat)
    want_internal = internal_labels(suffixes)
    nodes = all_nodes(idx)
    got_internal = set()
    leaf_labels = []
    by_label = {}
    for v in nodes:
        label = idx.label(v)
        by_label[label] = v
        assert idx.string_depth(v) == len(label)
        if idx.is_leaf(v):
            leaf_labels.append(label)
            assert idx.lb(v) == idx.rb(v)
        else:
            got_internal.add(label)
            kids = idx.children(v)
            assert len(kids) >= 2 or v == ROOT
            # interval = contiguous run of suffixes extending this label
            lo = idx.lb(v)
            hi = idx.rb(v)
            assert [s for s in suffixes if s.startswith(label)] == suffixes[lo:hi + 1]
        if v != ROOT:
            par = idx.parent(v)
            assert label.startswith(idx.label(par)) and par < v
            s = idx.suffix_link(v)
            assert idx.label(s) == label[1:]
        for k in range(len(label)):
            assert idx.get_char_at_node_pos(v, k) == label[k]
    assert got_internal == want_internal
    assert leaf_labels == suffixes  # BP order is suffix order
    if rng is not None:
        for _ in range(min(60, len(nodes) ** 2)):
            u, v = (int(x) for x in rng.choice(len(nodes), size=2))
            w = idx.lca(nodes[u], nodes[v])
            assert idx.label(w) == common_prefix(idx.label(nodes[u]), idx.label(nodes[v]))
    # child lookup with every byte that appears, plus definite misses
    for v in nodes:
        if idx.is_leaf(v):
            assert idx.child(v, 0x61) is None
            continue
        label = idx.label(v)
        firsts = {}
        for s in suffixes:
            if s.startswith(label) and len(s) > len(label):
                firsts.setdefault(s[len(label)], label + s[len(label):len(label) + 1])
        for c, deeper in firsts.items():
            w = idx.child(v, c)
            assert w is not None and idx.label(w).startswith(deeper)
        for c in (0x00, 0x02, 0xFF):
            if c not in firsts:
                assert idx.child(v, c) is None
    return by_label


class TestFrozenShapes:
    def test_single_char_pattern_bp(self):
        idx = build([b"z"])
        assert "".join("()"[1 - b] for b in idx.bp.bv.to_bools()) == "(()())"
        assert idx.nnodes == 3

    def test_run_dictionary_left_spine(self):
        idx = build([b"aaaa"])
        v = ROOT
        for depth in range(1, 4):
            v = idx.child(v, ord("a"))
            assert idx.string_depth(v) == depth and not idx.is_leaf(v)
        assert idx.child(v, ord("a")) is not None

    def test_zero_length_edge_leaf(self):
        # "b" is both a whole pattern suffix and a prefix of "b#b..." suffixes
        idx = build([b"ab", b"b"])
        check_against_strings(idx, [b"ab", b"b"])
        node = next(v for v in all_nodes(idx)
                    if idx.label(v) == b"b\x01" and not idx.is_leaf(v))
        first = idx.children(node)[0]
        assert idx.is_leaf(first) and idx.string_depth(first) == idx.string_depth(node)


class TestDemoDictionary:
    def test_structure(self, rng):
        idx = build(DEMO_PATTERNS)
        check_against_strings(idx, DEMO_PATTERNS, rng)

    def test_marks(self):
        idx = build(DEMO_PATTERNS)
        assert idx.marked_count() == 2
        assert idx.marks.M.popcount() == 4
        assert "".join("()"[1 - b] for b in idx.marks.D.bv.to_bools()) == "(())"

    def test_marked_ancestor_node_examples(self):
        idx = build(DEMO_PATTERNS)
        by_label = {idx.label(v): v for v in all_nodes(idx)}
        ater_leaf = by_label[b"ater\x01"]
        got = idx.marks.lma(ater_leaf)
        assert idx.label(got) == b"ate"
        assert idx.marks.payload(got) == (1, 3)
        ath_leaf = by_label[b"ath\x01later\x01"]
        got = idx.marks.lma(ath_leaf)
        assert idx.label(got) == b"a"
        assert idx.marks.payload(got) == (0, 1)

    def test_announce_lookup(self):
        idx = build(DEMO_PATTERNS)
        by_label = {idx.label(v): v for v in all_nodes(idx)}
        for pid, pat in enumerate(DEMO_PATTERNS):
            leaf = next(v for lbl, v in by_label.items()
                        if lbl.startswith(pat + b"\x01") and idx.is_leaf(v))
            assert idx.announce_id(idx.lb(leaf), idx.rb(leaf)) == pid
        t_node = by_label[b"t"]
        assert idx.announce_id(idx.lb(t_node), idx.rb(t_node)) is None

    def test_suffix_link_examples(self):
        idx = build(DEMO_PATTERNS)
        by_label = {idx.label(v): v for v in all_nodes(idx)}
        assert idx.suffix_link(by_label[b"ate"]) == by_label[b"te"]
        assert idx.suffix_link(ROOT) == ROOT
        # leaf of suffix i links to leaf of suffix i+1
        leaf12 = by_label[b"ater\x01"]
        leaf13 = by_label[b"ter\x01"]
        assert idx.suffix_link(leaf12) == leaf13
        # rank-0 leaf is the bare terminator, linking to the root
        assert idx.suffix_link(idx.leaf_of_rank(0)) == ROOT

    def test_depth_drop_property(self):
        idx = build(DEMO_PATTERNS)
        for v in all_nodes(idx):
            if v != ROOT:
                assert idx.string_depth(idx.suffix_link(v)) == idx.string_depth(v) - 1


class TestProfilesAgree:
    def test_nav_identical_across_profiles(self, rng):
        patterns = [b"abra", b"bra", b"ra", b"cad", b"a"]
        built = [build(patterns, c, l, r) for c, l, r in PROFILES]
        base = built[0]
        nodes = all_nodes(base)
        for other in built[1:]:
            assert other.bp.bv.to_bytes() == base.bp.bv.to_bytes()
            for v in nodes:
                assert other.string_depth(v) == base.string_depth(v)
                assert other.label(v) == base.label(v)
                assert other.suffix_link(v) == base.suffix_link(v)

    def test_sampled_profiles_structure(self, rng):
        for csa, lcp, rate in PROFILES[2:]:
            idx = build([b"mississippi", b"issi", b"ss"], csa, lcp, rate)
            check_against_strings(idx, [b"mississippi", b"issi", b"ss"])


class TestRandomDictionaries:
    def test_structure_oracle(self, rng):
        for trial in range(25):
            sigma = int(rng.choice([2, 3, 26]))
            k = int(rng.randint(1, 6))
            pats = sorted({bytes(rng.randint(97, 97 + sigma, size=int(rng.randint(1, 10))).astype(np.uint8))
                           for _ in range(k)})
            csa, lcp, rate = PROFILES[trial % len(PROFILES)]
            idx = build(pats, csa, lcp, rate)
            check_against_strings(idx, pats, rng)

    def test_agrees_with_pointer_tree(self, rng):
        # delimiter-free internal labels and marked labels coincide
        for _ in range(15):
            pats = sorted({bytes(rng.randint(97, 100, size=int(rng.randint(1, 12))).astype(np.uint8))
                           for _ in range(int(rng.randint(1, 8)))})
            cd = ingest(pats)
            cst = CstIndex.build(cd, csa_profile="plain", lcp_profile="plain")
            gst = GstIndex.build(cd)
            cst_internal = {cst.label(v) for v in all_nodes(cst)
                            if not cst.is_leaf(v) and v != ROOT}
            cst_clean = {s for s in cst_internal if 1 not in s}
            gst_internal = {gst.label(v) for v in range(1, gst.nnodes)
                            if not gst.is_leaf(v)}
            assert cst_clean == gst_internal
            cst_marked = {cst.label(v) for v in cst.marks.marked_nodes()}
            gst_marked = {gst.label(v) for v in range(gst.nnodes) if gst.mark_pat[v] >= 0}
            assert cst_marked == gst_marked

    def test_node_budget(self, rng):
        pats = [bytes(rng.randint(97, 99, size=40).astype(np.uint8)) for _ in range(3)]
        pats = sorted(set(pats))
        idx = build(pats)
        ell = sum(len(p) + 1 for p in pats)
        assert idx.nnodes <= 2 * ell


class TestValidation:
    def test_bad_node_position(self):
        idx = build([b"ab"])
        with pytest.raises(ValueError, match="open parenthesis"):
            idx.string_depth(idx.bp.find_close(0))
        with pytest.raises(ValueError, match="out of range"):
            idx.leaf_of_rank(99)

    def test_char_offset_range(self):
        idx = build([b"ab"])
        v = idx.child(ROOT, ord("a"))
        with pytest.raises(ValueError, match="root path"):
            idx.get_char_at_node_pos(v, idx.string_depth(v))

    def test_memory_bytes_positive(self):
        idx = build([b"ab"])
        assert idx.memory_bytes() > 0
