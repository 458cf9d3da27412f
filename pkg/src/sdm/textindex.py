"""Concatenated dictionary text, suffix array, LCP, and the self-index layer.

The d patterns are concatenated into one string, each pattern followed by
the reserved delimiter byte 0x01 (the final delimiter doubles as the
terminator), giving a text of length ell = sum(|P_i|) + d. The delimiter
is the smallest byte in the effective alphabet, so the terminator suffix
is the lexicographic minimum, and a delimiter never equals a text byte.

On top of the suffix array two self-index profiles are provided:

* plain   - sa and isa stored verbatim (sample rate 1); psi computed on
            the fly as isa[(sa[i] + 1) mod ell]. Fast and fat.
* sampled - psi stored as zigzagged Elias-gamma deltas in blocks of 32
            ranks with absolute block bases; sa kept only at ranks whose
            suffix START position is a multiple of the sample rate
            (marker bitvector + values in rank order), so walking psi
            from rank i for k steps until it hits a marked rank
            reconstructs sa[i] = sample - k (mod ell); isa kept at every
            sample-rate-th text position and advanced by psi.

Character extraction never touches the original text: the first character
of the rank-r suffix is the byte band containing r in the cumulative
byte-count array C, and extract_char(pos) is that lookup at rank isa(pos).

LCP storage is either one int32 per entry or byte-per-entry with an
escape table for values >= 255.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._dispatch import maybe_njit
from .bitseq import BitVector, _rank1

DELIMITER = 1
RESERVED_BYTES = (0, 1)
PSI_BLOCK = 32

_U1 = np.uint64(1)
_U63 = np.uint64(63)


class ConcatDictionary:
    """The pattern set merged into a single delimiter-terminated string."""

    __slots__ = ("patterns", "concat", "boundaries", "starts", "ell", "d")

    def __init__(self, patterns, concat, boundaries, starts):
        self.patterns = patterns
        self.concat = concat
        self.boundaries = boundaries
        self.starts = starts
        self.ell = len(concat)
        self.d = len(patterns)

    @property
    def delimiter(self):
        return DELIMITER

    def pattern_id(self, pos):
        """Id of the pattern whose span (including its delimiter) covers pos."""
        if not 0 <= pos < self.ell:
            raise ValueError(f"position {pos} out of range")
        return int(np.searchsorted(self.boundaries, pos, side="left"))

    def pattern_bounds(self, pid):
        """(start, end) of pattern pid in the concat, delimiter excluded."""
        return int(self.starts[pid]), int(self.boundaries[pid])

    def pattern_len(self, pid):
        return int(self.boundaries[pid] - self.starts[pid])

    def concat_bytes(self):
        return self.concat.tobytes()


def ingest(patterns):
    """Validate and concatenate patterns. Duplicates are the caller's problem
    and are rejected here; the CLI deduplicates (with a warning) first."""
    if not patterns:
        raise ValueError("empty dictionary: no patterns to index")
    seen = {}
    for idx, p in enumerate(patterns):
        if not isinstance(p, (bytes, bytearray)):
            raise TypeError(f"pattern {idx} is not a byte string")
        if len(p) == 0:
            raise ValueError(f"empty pattern at index {idx}")
        for b in RESERVED_BYTES:
            off = bytes(p).find(bytes([b]))
            if off >= 0:
                raise ValueError(
                    f"pattern {idx} contains reserved byte {b:#04x} at offset {off}"
                )
        if p in seen:
            raise ValueError(f"duplicate pattern at index {idx} (first at {seen[p]})")
        seen[bytes(p)] = idx
    d = len(patterns)
    total = sum(len(p) for p in patterns) + d
    concat = np.empty(total, np.uint8)
    boundaries = np.empty(d, np.int64)
    starts = np.empty(d, np.int64)
    at = 0
    for i, p in enumerate(patterns):
        starts[i] = at
        arr = np.frombuffer(bytes(p), np.uint8)
        concat[at : at + len(arr)] = arr
        at += len(arr)
        boundaries[i] = at
        concat[at] = DELIMITER
        at += 1
    concat.setflags(write=False)
    return ConcatDictionary([bytes(p) for p in patterns], concat, boundaries, starts)


def dedupe_patterns(patterns):
    """Keep first occurrences; return (unique, list of dropped indices)."""
    seen = set()
    unique = []
    dropped = []
    for i, p in enumerate(patterns):
        key = bytes(p)
        if key in seen:
            dropped.append(i)
        else:
            seen.add(key)
            unique.append(key)
    return unique, dropped


@dataclass(frozen=True)
class SuffixArray:
    sa: np.ndarray
    isa: np.ndarray


def _as_text(x):
    if isinstance(x, ConcatDictionary):
        return x.concat
    return np.asarray(x, np.uint8)


def build_sa(x):
    """Suffix array by prefix doubling over numpy lexsort passes."""
    text = _as_text(x)
    n = len(text)
    if n == 0:
        raise ValueError("cannot index an empty text")
    rank = text.astype(np.int64)
    k = 1
    while True:
        key2 = np.full(n, -1, np.int64)
        key2[: n - k] = rank[k:]
        sa = np.lexsort((key2, rank))
        newr = np.empty(n, np.int64)
        newr[sa[0]] = 0
        diff = (rank[sa[1:]] != rank[sa[:-1]]) | (key2[sa[1:]] != key2[sa[:-1]])
        newr[sa[1:]] = np.cumsum(diff)
        rank = newr
        if rank[sa[-1]] == n - 1:
            break
        k <<= 1
    sa = sa.astype(np.int32)
    isa = np.empty(n, np.int32)
    isa[sa] = np.arange(n, dtype=np.int32)
    sa.setflags(write=False)
    isa.setflags(write=False)
    return SuffixArray(sa, isa)


@maybe_njit
def _kasai(text, sa, isa, lcp):
    n = len(text)
    h = 0
    for i in range(n):
        r = isa[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and text[i + h] == text[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0


def build_lcp(x, suffixes):
    """Kasai construction; lcp[i] = lcp(suffix sa[i-1], suffix sa[i]), lcp[0] = 0."""
    text = _as_text(x)
    lcp = np.zeros(len(text), np.int32)
    _kasai(text, suffixes.sa.astype(np.int64), suffixes.isa.astype(np.int64), lcp)
    lcp.setflags(write=False)
    return lcp


def byte_bands(x):
    """C[b] = number of suffixes whose first byte is < b; C has 257 entries."""
    text = _as_text(x)
    counts = np.bincount(text, minlength=256).astype(np.int64)
    C = np.zeros(257, np.int64)
    np.cumsum(counts, out=C[1:])
    C.setflags(write=False)
    return C


@maybe_njit
def _first_char(C, r):
    """First byte of the rank-r suffix: the band of C containing r."""
    return np.searchsorted(C, r, side="right") - 1


# --- gamma-coded psi ---------------------------------------------------------


@maybe_njit
def _bit_length(v):
    n = 0
    while v > 0:
        v >>= 1
        n += 1
    return n


@maybe_njit
def _zigzag(d):
    if d < 0:
        return np.int64(-2 * d - 1)
    return np.int64(2 * d)


@maybe_njit
def _unzigzag(u):
    if u & 1:
        return np.int64(-((u + 1) >> 1))
    return np.int64(u >> 1)


@maybe_njit
def _psi_encode_pass(psi, block, bits_out, offsets, count_only):
    """Gamma-write zigzagged psi deltas; returns total bit count."""
    ell = len(psi)
    nb = (ell + block - 1) // block
    pos = np.int64(0)
    for j in range(nb):
        offsets[j] = pos
        lo = j * block
        hi = min(lo + block, ell)
        for i in range(lo + 1, hi):
            v = _zigzag(psi[i] - psi[i - 1]) + 1  # >= 1 either sign; 0 impossible
            nlen = _bit_length(v)
            if count_only:
                pos += 2 * nlen - 1
            else:
                pos += nlen - 1  # leading zeros are already zero in the buffer
                for t in range(nlen - 1, -1, -1):
                    if (v >> t) & 1:
                        bits_out[pos >> 6] |= _U1 << (np.uint64(pos) & _U63)
                    pos += 1
    return pos


@maybe_njit
def _gamma_read(bits, pos):
    z = 0
    while ((bits[pos >> 6] >> (np.uint64(pos) & _U63)) & _U1) == np.uint64(0):
        z += 1
        pos += 1
    v = np.int64(0)
    for _ in range(z + 1):
        bit = np.int64((bits[pos >> 6] >> (np.uint64(pos) & _U63)) & _U1)
        v = (v << 1) | bit
        pos += 1
    return v, pos


@maybe_njit
def _psi_sampled(base, offsets, bits, i):
    j = i >> 5
    v = np.int64(base[j])
    pos = offsets[j]
    for _ in range(i & 31):
        g, pos = _gamma_read(bits, pos)
        v += _unzigzag(g - 1)
    return v


@maybe_njit
def _csa_psi(tag, sa, isa, base, offsets, bits, ell, i):
    if tag == 0:
        p = sa[i] + 1
        if p == ell:
            p = 0
        return np.int64(isa[p])
    return _psi_sampled(base, offsets, bits, i)


@maybe_njit
def _csa_access(tag, sa, mk_words, mk_sup, mk_cum, sa_samp,
                base, offsets, bits, ell, srate, i):
    if tag == 0:
        return np.int64(sa[i])
    r = i
    k = np.int64(0)
    while ((mk_words[r >> 6] >> (np.uint64(r) & _U63)) & _U1) == np.uint64(0):
        r = _psi_sampled(base, offsets, bits, r)
        k += 1
    val = np.int64(sa_samp[_rank1(mk_words, mk_sup, mk_cum, r)]) - k
    if val < 0:
        val += ell
    return val


@maybe_njit
def _csa_isa_at(tag, isa, isa_samp, base, offsets, bits, ell, srate, pos):
    if tag == 0:
        return np.int64(isa[pos])
    j = pos // srate
    r = np.int64(isa_samp[j])
    for _ in range(pos - j * srate):
        r = _psi_sampled(base, offsets, bits, r)
    return r


_E_U64 = np.zeros(0, np.uint64)
_E_I64 = np.zeros(0, np.int64)
_E_I32 = np.zeros(0, np.int32)
_E_U16 = np.zeros(0, np.uint16)
_E_U8 = np.zeros(0, np.uint8)


class PlainCsa:
    """Suffix-array layer with everything stored verbatim (sample rate 1)."""

    tag = 0
    __slots__ = ("sa", "isa", "C", "ell", "sample_rate")

    def __init__(self, suffixes, C):
        self.sa = suffixes.sa
        self.isa = suffixes.isa
        self.C = C
        self.ell = len(self.sa)
        self.sample_rate = 1

    def access(self, i):
        self._check_rank(i)
        return int(self.sa[i])

    def isa_at(self, pos):
        self._check_pos(pos)
        return int(self.isa[pos])

    def psi(self, i):
        self._check_rank(i)
        p = int(self.sa[i]) + 1
        return int(self.isa[p if p < self.ell else 0])

    def extract_char(self, pos):
        self._check_pos(pos)
        return int(_first_char(self.C, self.isa_at(pos)))

    def _check_rank(self, i):
        if not 0 <= i < self.ell:
            raise ValueError(f"suffix rank {i} out of range [0, {self.ell})")

    def _check_pos(self, pos):
        if not 0 <= pos < self.ell:
            raise ValueError(f"text position {pos} out of range [0, {self.ell})")

    def kernel_pack(self):
        """Kernel argument tuple; layout shared with SampledCsa.kernel_pack."""
        return (np.int64(0), self.sa, self.isa, _E_U64, _E_I64, _E_U16,
                _E_I32, _E_I32, _E_I32, _E_I64, _E_U64, self.C,
                np.int64(self.ell), np.int64(1))

    def memory_bytes(self):
        return self.sa.nbytes + self.isa.nbytes + self.C.nbytes


class SampledCsa:
    """Suffix-array layer with gamma-coded psi and sparse sa/isa samples."""

    tag = 1
    __slots__ = ("C", "ell", "sample_rate", "psi_base", "psi_off", "psi_bits",
                 "marked", "sa_samp", "isa_samp")

    def __init__(self, suffixes, C, sample_rate=32):
        if sample_rate < 1:
            raise ValueError("sample rate must be positive")
        sa = suffixes.sa.astype(np.int64)
        isa = suffixes.isa.astype(np.int64)
        ell = len(sa)
        self.ell = ell
        self.C = C
        self.sample_rate = int(sample_rate)
        psi = isa[(sa + 1) % ell]
        nb = (ell + PSI_BLOCK - 1) // PSI_BLOCK
        self.psi_base = psi[np.arange(nb) * PSI_BLOCK].astype(np.int32)
        offsets = np.zeros(nb, np.int64)
        dummy = np.zeros(1, np.uint64)
        total_bits = _psi_encode_pass(psi, PSI_BLOCK, dummy, offsets, True)
        bits = np.zeros(max(1, (int(total_bits) + 63) >> 6), np.uint64)
        _psi_encode_pass(psi, PSI_BLOCK, bits, offsets, False)
        self.psi_off = offsets
        self.psi_bits = bits
        marked_bits = (sa % self.sample_rate == 0).astype(np.uint8)
        self.marked = BitVector(marked_bits)
        self.sa_samp = sa[marked_bits.astype(bool)].astype(np.int32)
        grid = np.arange(0, ell, self.sample_rate)
        self.isa_samp = isa[grid].astype(np.int32)
        for a in (self.psi_base, self.psi_off, self.psi_bits, self.sa_samp, self.isa_samp):
            a.setflags(write=False)

    def access(self, i):
        if not 0 <= i < self.ell:
            raise ValueError(f"suffix rank {i} out of range [0, {self.ell})")
        m = self.marked
        return int(
            _csa_access(
                1, np.zeros(0, np.int32), m.words, m.sup, m.cum, self.sa_samp,
                self.psi_base, self.psi_off, self.psi_bits, self.ell,
                self.sample_rate, i,
            )
        )

    def isa_at(self, pos):
        if not 0 <= pos < self.ell:
            raise ValueError(f"text position {pos} out of range [0, {self.ell})")
        return int(
            _csa_isa_at(
                1, np.zeros(0, np.int32), self.isa_samp, self.psi_base,
                self.psi_off, self.psi_bits, self.ell, self.sample_rate, pos,
            )
        )

    def psi(self, i):
        if not 0 <= i < self.ell:
            raise ValueError(f"suffix rank {i} out of range [0, {self.ell})")
        return int(_psi_sampled(self.psi_base, self.psi_off, self.psi_bits, i))

    def extract_char(self, pos):
        return int(_first_char(self.C, self.isa_at(pos)))

    def kernel_pack(self):
        m = self.marked
        return (np.int64(1), _E_I32, _E_I32, m.words, m.sup, m.cum,
                self.sa_samp, self.isa_samp, self.psi_base, self.psi_off,
                self.psi_bits, self.C, np.int64(self.ell),
                np.int64(self.sample_rate))

    def memory_bytes(self):
        own = (self.psi_base.nbytes + self.psi_off.nbytes + self.psi_bits.nbytes
               + self.sa_samp.nbytes + self.isa_samp.nbytes + self.C.nbytes)
        return own + self.marked.memory_bytes()


def make_csa(profile, suffixes, C, sample_rate=32):
    if profile == "plain":
        return PlainCsa(suffixes, C)
    if profile == "sampled":
        return SampledCsa(suffixes, C, sample_rate)
    raise ValueError(f"unknown csa profile {profile!r}")


# Pack-tuple views of the csa ops, for kernels composed by other modules.
# Layout: (tag, sa, isa, mk_words, mk_sup, mk_cum, sa_samp, isa_samp,
#          psi_base, psi_off, psi_bits, C, ell, srate)


@maybe_njit
def _pk_psi(P, i):
    return _csa_psi(P[0], P[1], P[2], P[8], P[9], P[10], P[12], i)


@maybe_njit
def _pk_access(P, i):
    return _csa_access(P[0], P[1], P[3], P[4], P[5], P[6], P[8], P[9], P[10],
                       P[12], P[13], i)


@maybe_njit
def _pk_isa_at(P, pos):
    return _csa_isa_at(P[0], P[2], P[7], P[8], P[9], P[10], P[12], P[13], pos)


@maybe_njit
def _pk_first_char(P, r):
    return _first_char(P[11], r)


@maybe_njit
def _pk_char_at(P, pos):
    return _first_char(P[11], _pk_isa_at(P, pos))


# --- LCP profiles ------------------------------------------------------------

LCP_ESCAPE = 255


@maybe_njit
def _lcp_at(tag, plain, small, esc_pos, esc_val, i):
    if tag == 0:
        return np.int64(plain[i])
    v = np.int64(small[i])
    if v == LCP_ESCAPE:
        j = np.searchsorted(esc_pos, i)
        return np.int64(esc_val[j])
    return v


class PlainLcp:
    tag = 0
    __slots__ = ("arr",)

    def __init__(self, lcp):
        self.arr = np.ascontiguousarray(lcp, np.int32)
        self.arr.setflags(write=False)

    def at(self, i):
        return int(self.arr[i])

    def __len__(self):
        return len(self.arr)

    def kernel_pack(self):
        return (np.int64(0), self.arr, _E_U8, _E_I64, _E_I32)

    def memory_bytes(self):
        return self.arr.nbytes


class CompactLcp:
    tag = 1
    __slots__ = ("small", "esc_pos", "esc_val", "n")

    def __init__(self, lcp):
        lcp = np.asarray(lcp, np.int64)
        self.n = len(lcp)
        big = lcp >= LCP_ESCAPE
        small = lcp.astype(np.int64).clip(max=LCP_ESCAPE).astype(np.uint8)
        small[big] = LCP_ESCAPE
        self.small = small
        self.esc_pos = np.flatnonzero(big).astype(np.int64)
        self.esc_val = lcp[big].astype(np.int32)
        for a in (self.small, self.esc_pos, self.esc_val):
            a.setflags(write=False)

    def at(self, i):
        if not 0 <= i < self.n:
            raise IndexError(i)
        return int(_lcp_at(1, _E_I32, self.small, self.esc_pos, self.esc_val, i))

    def __len__(self):
        return self.n

    def kernel_pack(self):
        return (np.int64(1), _E_I32, self.small, self.esc_pos, self.esc_val)

    def memory_bytes(self):
        return self.small.nbytes + self.esc_pos.nbytes + self.esc_val.nbytes


def make_lcp(profile, lcp):
    if profile == "plain":
        return PlainLcp(lcp)
    if profile == "compact":
        return CompactLcp(lcp)
    raise ValueError(f"unknown lcp profile {profile!r}")


@maybe_njit
def _pk_lcp(L, i):
    return _lcp_at(L[0], L[1], L[2], L[3], L[4], i)
