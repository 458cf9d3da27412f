"""Suffix array / LCP / self-index layer against brute-force oracles."""

import numpy as np
import pytest

from sdm.textindex import (
    CompactLcp,
    PlainCsa,
    PlainLcp,
    SampledCsa,
    build_lcp,
    build_sa,
    byte_bands,
    dedupe_patterns,
    ingest,
    make_csa,
    make_lcp,
)

TERM = b"\x01"


def naive_sa(text: bytes):
    return sorted(range(len(text)), key=lambda i: text[i:])


def naive_lcp(text: bytes, sa):
    out = [0] * len(sa)
    for r in range(1, len(sa)):
        a, b = text[sa[r - 1] :], text[sa[r] :]
        h = 0
        while h < len(a) and h < len(b) and a[h] == b[h]:
            h += 1
        out[r] = h
    return out


def random_text(rng, n, sigma):
    return bytes(rng.randint(ord("a"), ord("a") + sigma, size=n).astype(np.uint8)) + TERM


class TestIngest:
    def test_four_pattern_concat(self):
        cd = ingest([b"a", b"ate", b"bath", b"later"])
        assert cd.concat_bytes() == b"a\x01ate\x01bath\x01later\x01"
        assert cd.ell == 17
        assert cd.d == 4
        assert list(cd.boundaries) == [1, 5, 10, 16]
        assert list(cd.starts) == [0, 2, 6, 11]

    def test_single_pattern(self):
        cd = ingest([b"x"])
        assert cd.concat_bytes() == b"x\x01"
        assert cd.pattern_bounds(0) == (0, 1)
        assert cd.pattern_len(0) == 1

    def test_pattern_id_covers_delimiter(self):
        cd = ingest([b"ab", b"c"])
        assert [cd.pattern_id(p) for p in range(cd.ell)] == [0, 0, 0, 1, 1]

    def test_rejects_empty_dictionary(self):
        with pytest.raises(ValueError, match="empty dictionary"):
            ingest([])

    def test_rejects_empty_pattern(self):
        with pytest.raises(ValueError, match="index 1"):
            ingest([b"ab", b""])

    def test_rejects_reserved_bytes(self):
        with pytest.raises(ValueError, match="0x01 at offset 2"):
            ingest([b"ab\x01c"])
        with pytest.raises(ValueError, match="0x00 at offset 0"):
            ingest([b"\x00ab"])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate pattern at index 2"):
            ingest([b"ab", b"cd", b"ab"])

    def test_dedupe_helper(self):
        unique, dropped = dedupe_patterns([b"x", b"y", b"x", b"z", b"y"])
        assert unique == [b"x", b"y", b"z"]
        assert dropped == [2, 4]


class TestSuffixArray:
    def test_banana(self):
        suf = build_sa(np.frombuffer(b"banana" + TERM, np.uint8))
        assert list(suf.sa) == [6, 5, 3, 1, 0, 4, 2]
        assert list(suf.isa[suf.sa]) == list(range(7))

    def test_single_char(self):
        suf = build_sa(np.frombuffer(b"z" + TERM, np.uint8))
        assert list(suf.sa) == [1, 0]

    def test_run(self):
        suf = build_sa(np.frombuffer(b"aaaa" + TERM, np.uint8))
        assert list(suf.sa) == [4, 3, 2, 1, 0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_sa(np.zeros(0, np.uint8))

    def test_against_oracle(self, rng):
        for _ in range(120):
            sigma = int(rng.choice([2, 4, 26]))
            n = int(rng.randint(1, 400))
            text = random_text(rng, n, sigma)
            suf = build_sa(np.frombuffer(text, np.uint8))
            assert list(suf.sa) == naive_sa(text)

    def test_on_dictionary(self):
        cd = ingest([b"a", b"ate", b"bath", b"later"])
        suf = build_sa(cd)
        assert list(suf.sa) == naive_sa(cd.concat_bytes())


class TestLcp:
    def test_banana(self):
        text = np.frombuffer(b"banana" + TERM, np.uint8)
        suf = build_sa(text)
        assert list(build_lcp(text, suf)) == [0, 0, 1, 3, 0, 0, 2]

    def test_run(self):
        text = np.frombuffer(b"aaaa" + TERM, np.uint8)
        suf = build_sa(text)
        assert list(build_lcp(text, suf)) == [0, 0, 1, 2, 3]

    def test_against_oracle(self, rng):
        for _ in range(120):
            sigma = int(rng.choice([2, 4]))
            n = int(rng.randint(1, 400))
            text = random_text(rng, n, sigma)
            arr = np.frombuffer(text, np.uint8)
            suf = build_sa(arr)
            assert list(build_lcp(arr, suf)) == naive_lcp(text, list(suf.sa))


class TestCsa:
    def psis(self, sa, isa):
        n = len(sa)
        return [int(isa[(sa[i] + 1) % n]) for i in range(n)]

    def test_plain_roundtrip(self):
        cd = ingest([b"a", b"ate", b"bath", b"later"])
        suf = build_sa(cd)
        csa = make_csa("plain", suf, byte_bands(cd))
        for i in range(cd.ell):
            assert csa.access(i) == suf.sa[i]
            assert csa.isa_at(i) == suf.isa[i]
        assert [csa.psi(i) for i in range(cd.ell)] == self.psis(suf.sa, suf.isa)

    def test_sampled_banana_known_walk(self):
        text = np.frombuffer(b"banana" + TERM, np.uint8)
        suf = build_sa(text)
        csa = SampledCsa(suf, byte_bands(text), sample_rate=3)
        assert csa.access(3) == 1

    def test_sampled_matches_plain(self, rng):
        for _ in range(40):
            sigma = int(rng.choice([2, 4, 26]))
            n = int(rng.randint(1, 300))
            text = random_text(rng, n, sigma)
            arr = np.frombuffer(text, np.uint8)
            suf = build_sa(arr)
            C = byte_bands(arr)
            plain = PlainCsa(suf, C)
            rate = int(rng.choice([1, 2, 3, 8, 32, 64]))
            samp = SampledCsa(suf, C, sample_rate=rate)
            for i in range(len(text)):
                assert samp.psi(i) == plain.psi(i)
                assert samp.access(i) == plain.access(i)
                assert samp.isa_at(i) == plain.isa_at(i)
                assert samp.extract_char(i) == plain.extract_char(i) == text[i]

    def test_psi_follows_text_order(self):
        cd = ingest([b"mississippi"])
        suf = build_sa(cd)
        csa = make_csa("sampled", suf, byte_bands(cd), sample_rate=4)
        r = suf.isa[0]
        for pos in range(1, cd.ell):
            r = csa.psi(int(r))
            assert r == suf.isa[pos]

    def test_extract_char_examples(self):
        cd = ingest([b"a", b"ate", b"bath", b"later"])
        suf = build_sa(cd)
        csa = make_csa("plain", suf, byte_bands(cd))
        assert csa.extract_char(0) == ord("a")
        assert csa.extract_char(1) == 0x01
        text = np.frombuffer(b"banana" + TERM, np.uint8)
        csa2 = make_csa("plain", build_sa(text), byte_bands(text))
        assert csa2.extract_char(4) == ord("n")

    def test_out_of_range(self):
        text = np.frombuffer(b"ab" + TERM, np.uint8)
        suf = build_sa(text)
        csa = make_csa("sampled", suf, byte_bands(text), sample_rate=2)
        with pytest.raises(ValueError, match="out of range"):
            csa.access(3)
        with pytest.raises(ValueError, match="out of range"):
            csa.isa_at(-1)

    def test_sampled_is_smaller_on_big_text(self, rng):
        text = random_text(rng, 50_000, 4)
        arr = np.frombuffer(text, np.uint8)
        suf = build_sa(arr)
        C = byte_bands(arr)
        assert SampledCsa(suf, C, 32).memory_bytes() < PlainCsa(suf, C).memory_bytes() // 4

    def test_unknown_profile(self):
        text = np.frombuffer(b"ab" + TERM, np.uint8)
        with pytest.raises(ValueError, match="unknown csa profile"):
            make_csa("mystery", build_sa(text), byte_bands(text))


class TestLcpProfiles:
    def test_compact_escapes_long_runs(self):
        text = np.frombuffer(b"a" * 300 + TERM, np.uint8)
        suf = build_sa(text)
        lcp = build_lcp(text, suf)
        compact = CompactLcp(lcp)
        assert len(compact.esc_pos) > 0
        plain = PlainLcp(lcp)
        for i in range(len(lcp)):
            assert compact.at(i) == plain.at(i) == lcp[i]

    def test_profiles_agree(self, rng):
        for _ in range(30):
            text = random_text(rng, int(rng.randint(1, 500)), 2)
            arr = np.frombuffer(text, np.uint8)
            suf = build_sa(arr)
            lcp = build_lcp(arr, suf)
            a = make_lcp("plain", lcp)
            b = make_lcp("compact", lcp)
            assert [a.at(i) for i in range(len(a))] == [b.at(i) for i in range(len(b))]

    def test_unknown_profile(self):
        with pytest.raises(ValueError, match="unknown lcp profile"):
            make_lcp("tiny", np.zeros(3, np.int32))
