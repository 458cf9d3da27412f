import numpy as np
import pytest

from sdm.cst import CstIndex
from sdm.gst import GstIndex
from sdm.matcher import Occurrence, ScanCounters, find_occurrences, search
from sdm.oracle import longest_matches
from sdm.textindex import ingest

DEMO_DICT = [b"a", b"ate", b"bath", b"later"]


def gst_of(pats):
    return GstIndex(ingest(pats))


def cst_of(pats, csa="plain", lcp="plain", rate=2):
    return CstIndex.build(ingest(pats), csa_profile=csa, lcp_profile=lcp,
                          sample_rate=rate)


def all_indexes(pats):
    return [gst_of(pats),
            cst_of(pats),
            cst_of(pats, csa="sampled", lcp="compact", rate=3)]


def triples(occs):
    return [(o.end_pos, o.pattern_id, o.length) for o in occs]


def run_all(pats, text):
    outs = [triples(find_occurrences(ix, text)) for ix in all_indexes(pats)]
    assert outs[0] == outs[1] == outs[2]
    return outs[0]


class TestKnownAnswers:
    def test_nested_patterns_inside_longer_word(self):
        # the canonical miss case: "ate" inside "lately" while chasing "later"
        assert run_all(DEMO_DICT, b"lately") == [(1, 0, 1), (3, 1, 3)]

    def test_full_pattern_then_shorter_inside(self):
        assert run_all(DEMO_DICT, b"bath") == [(1, 0, 1), (3, 2, 4)]

    def test_disjoint_alphabet(self):
        assert run_all(DEMO_DICT, b"zzzz") == []

    def test_match_flush_with_text_end(self):
        got = run_all(DEMO_DICT, b"later")
        assert got == [(1, 0, 1), (3, 1, 3), (4, 3, 5)]
        assert got == longest_matches(DEMO_DICT, b"later")

    def test_trailing_short_pattern_after_partial_long_one(self):
        assert run_all([b"abcde", b"bcd", b"c"], b"zabc") == [(3, 2, 1)]

    def test_prefix_pattern_passed_through(self):
        assert run_all([b"a", b"ab"], b"ab") == [(0, 0, 1), (1, 1, 2)]

    def test_pattern_that_is_a_suffix_of_another(self):
        # "a" must be announced even though dictionary order puts the
        # lexicographically smaller "a#..." suffix inside pattern "za"
        assert run_all([b"a", b"za"], b"a") == [(0, 0, 1)]
        assert run_all([b"a", b"za"], b"za") == [(1, 1, 2)]
        assert run_all([b"a", b"za"], b"xa") == [(1, 0, 1)]

    def test_single_byte_patterns(self):
        assert run_all([b"a", b"b"], b"abba") == [
            (0, 0, 1), (1, 1, 1), (2, 1, 1), (3, 0, 1)]

    def test_self_overlapping_pattern(self):
        assert run_all([b"abab"], b"ababab") == [(3, 0, 4), (5, 0, 4)]

    def test_longest_occurrence_wins_per_position(self):
        assert run_all([b"ab", b"babab"], b"ababab") == [
            (1, 0, 2), (3, 0, 2), (5, 1, 5)]

    def test_low_and_high_byte_values(self):
        pats = [bytes([2]), bytes([2, 255])]
        assert run_all(pats, bytes([2, 255, 2])) == [
            (0, 0, 1), (1, 1, 2), (2, 0, 1)]

    def test_repeated_single_symbol(self):
        assert run_all([b"z"], b"zzzzz") == [(i, 0, 1) for i in range(5)]

    def test_unary_nesting_ladder(self):
        pats = [b"a", b"aa", b"aaa"]
        got = run_all(pats, b"aaaaa")
        assert got == longest_matches(pats, b"aaaaa")
        assert got == [(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 2, 3), (4, 2, 3)]


class TestApi:
    def test_emit_sink_and_count(self):
        ix = gst_of(DEMO_DICT)
        seen = []
        count = search(ix, b"lately", seen.append)
        assert count == 2 and len(seen) == 2
        assert seen[0] == Occurrence(1, 0, 1)

    def test_count_without_sink(self):
        ix = gst_of(DEMO_DICT)
        assert search(ix, b"lately") == 2

    def test_counters_filled(self):
        for ix in all_indexes(DEMO_DICT):
            counters = ScanCounters()
            find_occurrences(ix, b"lately", counters=counters)
            assert counters.comparisons > 0
            assert counters.links > 0
            assert counters.total() == counters.comparisons + counters.links

    def test_empty_text(self):
        for ix in all_indexes(DEMO_DICT):
            assert find_occurrences(ix, b"") == []

    def test_rejects_unknown_index(self):
        with pytest.raises(TypeError):
            search(object(), b"x")

    def test_memoryview_and_ndarray_inputs(self):
        ix = gst_of(DEMO_DICT)
        expect = triples(find_occurrences(ix, b"lately"))
        assert triples(find_occurrences(ix, memoryview(b"lately"))) == expect
        arr = np.frombuffer(b"lately", np.uint8)
        assert triples(find_occurrences(ix, arr)) == expect


class TestReservedBytes:
    @pytest.mark.parametrize("text,off", [(b"ab\x01cd", 2), (b"\x00ab", 0),
                                          (b"ab\x00", 2)])
    def test_rejected_with_offset(self, text, off):
        for ix in all_indexes(DEMO_DICT):
            for engine in ("kernel", "reference"):
                with pytest.raises(ValueError, match=f"offset {off}"):
                    search(ix, text, engine=engine)

    def test_bytes_before_the_bad_one_are_still_scanned(self):
        ix = gst_of(DEMO_DICT)
        counters = ScanCounters()
        with pytest.raises(ValueError):
            search(ix, b"bath\x01", counters=counters)


def random_dictionary(rng, alphabet, npats, max_len):
    """Pattern set with forced prefix and substring nesting."""
    pats = []
    seen = set()

    def add(p):
        if p and p not in seen:
            seen.add(p)
            pats.append(p)

    while len(pats) < npats:
        m = rng.randint(1, max_len + 1)
        p = bytes(alphabet[i] for i in rng.randint(0, len(alphabet), m))
        add(p)
        if len(p) >= 2 and rng.rand() < 0.5:
            add(p[:rng.randint(1, len(p))])
        if len(p) >= 3 and rng.rand() < 0.5:
            i = rng.randint(1, len(p) - 1)
            add(p[i:i + rng.randint(1, len(p) - i + 1)])
    return pats[:npats]


def random_text(rng, alphabet, pats, n):
    """Noise with pattern occurrences planted on top."""
    text = bytearray(alphabet[i] for i in rng.randint(0, len(alphabet), n))
    for _ in range(max(1, n // 8)):
        p = pats[rng.randint(0, len(pats))]
        if len(p) <= n:
            at = rng.randint(0, n - len(p) + 1)
            text[at:at + len(p)] = p
    return bytes(text)


ALPHABETS = [b"ab", b"acgt", b"abcdefghijklmnopqrstuvwxyz"]


class TestOracleEquivalence:
    @pytest.mark.parametrize("alphabet", ALPHABETS)
    def test_matches_brute_force(self, rng, alphabet):
        for _ in range(25):
            pats = random_dictionary(rng, alphabet, rng.randint(2, 10), 9)
            text = random_text(rng, alphabet, pats, rng.randint(1, 300))
            want = longest_matches(pats, text)
            for ix in all_indexes(pats):
                assert triples(find_occurrences(ix, text)) == want

    def test_binary_worst_case_overlaps(self, rng):
        pats = [b"a", b"aa", b"ab", b"aab", b"abaab", b"b"]
        for _ in range(40):
            text = random_text(rng, b"ab", pats, rng.randint(1, 200))
            want = longest_matches(pats, text)
            for ix in all_indexes(pats):
                assert triples(find_occurrences(ix, text)) == want


class TestEngineParity:
    @pytest.mark.parametrize("alphabet", ALPHABETS[:2])
    def test_reference_equals_kernel(self, rng, alphabet):
        for _ in range(10):
            pats = random_dictionary(rng, alphabet, rng.randint(2, 8), 8)
            text = random_text(rng, alphabet, pats, rng.randint(1, 160))
            for ix in all_indexes(pats):
                ck, cr = ScanCounters(), ScanCounters()
                got_k = find_occurrences(ix, text, counters=ck)
                got_r = find_occurrences(ix, text, counters=cr,
                                         engine="reference")
                assert triples(got_k) == triples(got_r)
                assert (ck.comparisons, ck.links) == (cr.comparisons, cr.links)


class TestLinearity:
    def test_counter_growth_is_linear(self, rng):
        pats = random_dictionary(rng, b"acgt", 20, 16)
        texts = {n: random_text(rng, b"acgt", pats, n) for n in (20_000, 40_000)}
        for ix in all_indexes(pats):
            totals = {}
            for n, text in texts.items():
                counters = ScanCounters()
                search(ix, text, counters=counters)
                assert counters.total() <= 10 * n
                totals[n] = counters.total()
            assert totals[40_000] <= 2.2 * totals[20_000]

    def test_backends_count_their_own_probes(self, rng):
        # backends need not agree with each other, only with themselves
        pats = [b"ab", b"abc", b"bc"]
        text = random_text(rng, b"abc", pats, 500)
        for ix in all_indexes(pats):
            c1, c2 = ScanCounters(), ScanCounters()
            search(ix, text, counters=c1)
            search(ix, text, counters=c2)
            assert (c1.comparisons, c1.links) == (c2.comparisons, c2.links)
