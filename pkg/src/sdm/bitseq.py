"""Succinct bit sequences: rank/select bitvectors and balanced parentheses.

Two classes live here.

``BitVector`` packs bits into 64-bit words (bit j of word w is position
64*w + j) and answers rank1/select1 in constant time after construction.
The rank directory is two-level: absolute one-counts per 512-bit block
plus 16-bit word-local counts, about 6% overhead. select1 keeps the block
index of every 512th one and scans from there.

``BalancedParens`` views a BitVector as a parentheses sequence (1 is '(',
0 is ')') and supports find_close/find_open/enclose plus a range-minimum
over the excess function (used for lowest common ancestors). Navigation
runs on a min-excess tree over 512-bit blocks, with 256-entry byte tables
accelerating in-block scans.

All positions are 0-based. rank1(i) counts ones in positions [0, i).
select1(k) takes a 1-based k and returns a 0-based position. The excess
after position i is exc(i) = 2*rank1(i+1) - (i+1), with exc(-1) = 0; a
matching pair (o, c) satisfies exc(c) = exc(o) - 1 = exc(o - 1).

Everything is immutable after construction; queries are safe to run from
any number of threads. Serialization stores the raw words length-prefixed,
little-endian; directories are rebuilt on load.
"""

from __future__ import annotations

import struct

import numpy as np

from ._dispatch import maybe_njit

_BLOCK_BITS = 512
_BLOCK_WORDS = 8
_SELECT_SAMPLE = 512

_U1 = np.uint64(1)
_U63 = np.uint64(63)
_UFF = np.uint64(0xFF)

_NOT_FOUND = np.int64(-2)


def _build_byte_tables():
    pop = np.zeros(256, np.uint8)
    delta = np.zeros(256, np.int8)
    fwd_min = np.zeros(256, np.int8)  # min running excess over prefixes of 1..8 bits
    fwd_min7 = np.zeros(256, np.int8)  # same, over prefixes of 1..7 bits
    bwd_min = np.zeros(256, np.int8)  # min excess drop stepping back 1..8 bits
    for b in range(256):
        pop[b] = bin(b).count("1")
        delta[b] = 2 * int(pop[b]) - 8
        cur = 0
        mn = 127
        for t in range(8):
            cur += 1 if (b >> t) & 1 else -1
            mn = min(mn, cur)
            if t == 6:
                fwd_min7[b] = mn
        fwd_min[b] = mn
        cur = 0
        mn = 127
        for t in range(7, -1, -1):
            cur -= 1 if (b >> t) & 1 else -1
            mn = min(mn, cur)
        bwd_min[b] = mn
    return pop, delta, fwd_min, fwd_min7, bwd_min


(_BYTE_POP, _BYTE_DELTA, _BYTE_FWD_MIN, _BYTE_FWD_MIN7, _BYTE_BWD_MIN) = _build_byte_tables()

_INT32_INF = np.int32(2**31 - 1)


@maybe_njit
def _popcount64(x):
    x = x - ((x >> _U1) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    x = x + (x >> np.uint64(8))
    x = x + (x >> np.uint64(16))
    x = x + (x >> np.uint64(32))
    return np.int64(x & np.uint64(0x7F))


@maybe_njit
def _getbit(words, i):
    return np.int64((words[i >> 6] >> (np.uint64(i) & _U63)) & _U1)


@maybe_njit
def _rank1(words, sup, cum, i):
    if i <= 0:
        return np.int64(0)
    w = (i - 1) >> 6
    r = sup[(i - 1) >> 9] + np.int64(cum[w])
    rem = np.uint64(i) & _U63
    if rem == np.uint64(0):
        r += _popcount64(words[w])
    else:
        r += _popcount64(words[w] & ((_U1 << rem) - _U1))
    return r


@maybe_njit
def _select1(words, sup, cum, samples, nblocks, k):
    b = np.int64(samples[(k - 1) >> 9])
    while b + 1 < nblocks and sup[b + 1] < k:
        b += 1
    need = k - sup[b]
    wbase = b << 3
    wtop = wbase + _BLOCK_WORDS
    if wtop > len(words):
        wtop = len(words)
    w = wbase
    while w + 1 < wtop and np.int64(cum[w + 1]) < need:
        w += 1
    need -= np.int64(cum[w])
    word = words[w]
    pos = np.int64(w << 6)
    while True:
        byte = np.int64(word & _UFF)
        c = np.int64(_BYTE_POP[byte])
        if c >= need:
            for t in range(8):
                if (byte >> t) & 1:
                    need -= 1
                    if need == 0:
                        return pos + t
        need -= c
        word = word >> np.uint64(8)
        pos += 8


@maybe_njit
def _excess(words, sup, cum, i):
    if i < 0:
        return np.int64(0)
    return 2 * _rank1(words, sup, cum, i + 1) - (i + 1)


@maybe_njit
def _scan_fwd(words, frombit, tobit, cur, target):
    """Smallest j in [frombit, tobit) with running excess == target.

    cur is the excess just before frombit. Returns (pos, excess at range
    end); pos is -2 when the target is not hit. Assumes target < cur on
    entry (all callers search downward), so a byte whose min dips to the
    target is guaranteed to contain an exact hit.
    """
    pos = frombit
    while pos < tobit:
        if (pos & 7) == 0 and pos + 8 <= tobit:
            byte = np.int64((words[pos >> 6] >> (np.uint64(pos) & _U63)) & _UFF)
            if cur + np.int64(_BYTE_FWD_MIN[byte]) <= target:
                for t in range(8):
                    cur += 2 * ((byte >> t) & 1) - 1
                    if cur == target:
                        return pos + t, cur
                pos += 8
            else:
                cur += np.int64(_BYTE_DELTA[byte])
                pos += 8
        else:
            cur += 2 * _getbit(words, pos) - 1
            if cur == target:
                return pos, cur
            pos += 1
    return _NOT_FOUND, cur


@maybe_njit
def _scan_bwd(words, lowbit, j0, cur, target):
    """Largest j in [lowbit-1, j0] with exc(j) == target, given cur = exc(j0).

    The one-below-range position lowbit-1 is a legitimate candidate (its
    excess is fully determined by the scan); -2 when nothing matches.
    """
    j = j0
    while j >= lowbit:
        if cur == target:
            return j
        if (j & 7) == 7 and j - 7 >= lowbit:
            byte = np.int64((words[j >> 6] >> (np.uint64(j - 7) & _U63)) & _UFF)
            if cur + np.int64(_BYTE_BWD_MIN[byte]) <= target:
                for t in range(7, -1, -1):
                    cur -= 2 * ((byte >> t) & 1) - 1
                    if cur == target:
                        return j - 8 + t
                j -= 8
            else:
                cur -= np.int64(_BYTE_DELTA[byte])
                j -= 8
        else:
            cur -= 2 * _getbit(words, j) - 1
            j -= 1
    if cur == target:
        return j  # lowbit - 1
    return _NOT_FOUND


@maybe_njit
def _span_start_block(node, ptree, log2p):
    lvl = 0
    n = node
    while n > 1:
        n >>= 1
        lvl += 1
    return (node - (1 << lvl)) << (log2p - lvl)


@maybe_njit
def _fwdsearch(words, sup, cum, tmin, ttot, ptree, log2p, nbits, start, target):
    """Smallest j > start with exc(j) == target, else -2. Needs target < exc(start)."""
    if start + 1 >= nbits:
        return _NOT_FOUND
    cur = _excess(words, sup, cum, start)
    b = (start + 1) >> 9
    block_end = (b + 1) << 9
    if block_end > nbits:
        block_end = nbits
    pos, cur = _scan_fwd(words, start + 1, block_end, cur, target)
    if pos != _NOT_FOUND:
        return pos
    node = ptree + b
    while True:
        while node != 1 and (node & 1) == 1:
            node >>= 1
        if node == 1:
            return _NOT_FOUND
        sib = node + 1
        if cur + np.int64(tmin[sib]) <= target:
            node = sib
            break
        cur += np.int64(ttot[sib])
        node >>= 1
    while node < ptree:
        left = node << 1
        if cur + np.int64(tmin[left]) <= target:
            node = left
        else:
            cur += np.int64(ttot[left])
            node = left + 1
    b = node - ptree
    block_end = (b + 1) << 9
    if block_end > nbits:
        block_end = nbits
    pos, cur = _scan_fwd(words, b << 9, block_end, cur, target)
    return pos


@maybe_njit
def _bwdsearch(words, sup, cum, tminb, ttot, ptree, log2p, nbits, start, target):
    """Largest j <= start with exc(j) == target; j = -1 (virtual) allowed. Else -2."""
    if start < 0:
        if target == 0:
            return np.int64(-1)
        return _NOT_FOUND
    b = start >> 9
    cur = _excess(words, sup, cum, start)
    j = _scan_bwd(words, b << 9, start, cur, target)
    if j != _NOT_FOUND:
        return j
    node = ptree + b
    while True:
        while node != 1 and (node & 1) == 0:
            node >>= 1
        if node == 1:
            return _NOT_FOUND
        sib = node - 1
        base = _excess(words, sup, cum, (_span_start_block(sib, ptree, log2p) << 9) - 1)
        if base + np.int64(tminb[sib]) <= target:
            node = sib
            break
        node >>= 1
    while node < ptree:
        right = (node << 1) + 1
        rstart = _span_start_block(right, ptree, log2p) << 9
        base = _excess(words, sup, cum, rstart - 1)
        if base + np.int64(tminb[right]) <= target:
            node = right
        else:
            node = node << 1
    b = node - ptree
    block_end = (b + 1) << 9
    if block_end > nbits:
        block_end = nbits
    cur = _excess(words, sup, cum, block_end - 1)
    return _scan_bwd(words, b << 9, block_end - 1, cur, target)


@maybe_njit
def _find_close(words, sup, cum, tmin, ttot, ptree, log2p, nbits, i):
    e = _excess(words, sup, cum, i)
    return _fwdsearch(words, sup, cum, tmin, ttot, ptree, log2p, nbits, i, e - 1)


@maybe_njit
def _find_open(words, sup, cum, tminb, ttot, ptree, log2p, nbits, i):
    e = _excess(words, sup, cum, i)
    j = _bwdsearch(words, sup, cum, tminb, ttot, ptree, log2p, nbits, i - 1, e)
    if j == _NOT_FOUND:
        return _NOT_FOUND
    return j + 1


@maybe_njit
def _enclose(words, sup, cum, tminb, ttot, ptree, log2p, nbits, i):
    target = _excess(words, sup, cum, i) - 2
    if target < 0:
        return _NOT_FOUND
    j = _bwdsearch(words, sup, cum, tminb, ttot, ptree, log2p, nbits, i - 1, target)
    if j == _NOT_FOUND:
        return _NOT_FOUND
    return j + 1


@maybe_njit
def _scan_min(words, frombit, tobit, cur, best, bestpos):
    """Scan [frombit, tobit); keep the leftmost strict minimum of the excess."""
    pos = frombit
    while pos < tobit:
        if (pos & 7) == 0 and pos + 8 <= tobit:
            byte = np.int64((words[pos >> 6] >> (np.uint64(pos) & _U63)) & _UFF)
            if cur + np.int64(_BYTE_FWD_MIN[byte]) < best:
                for t in range(8):
                    cur += 2 * ((byte >> t) & 1) - 1
                    if cur < best:
                        best = cur
                        bestpos = pos + t
            else:
                cur += np.int64(_BYTE_DELTA[byte])
            pos += 8
        else:
            cur += 2 * _getbit(words, pos) - 1
            if cur < best:
                best = cur
                bestpos = pos
            pos += 1
    return best, bestpos, cur


@maybe_njit
def _rmq_excess(words, sup, cum, tmin, ttot, ptree, log2p, nbits, x, y):
    """Position of the leftmost minimum of exc(j) over j in [x, y]."""
    b1 = x >> 9
    b2 = y >> 9
    cur = _excess(words, sup, cum, x - 1)
    best = np.int64(2**62)
    bestpos = np.int64(-1)
    if b1 == b2:
        best, bestpos, cur = _scan_min(words, x, y + 1, cur, best, bestpos)
        return bestpos
    best, bestpos, cur = _scan_min(words, x, (b1 + 1) << 9, cur, best, bestpos)
    lo = b1 + 1
    hi = b2 - 1
    bestnode = np.int64(-1)
    bestnode_val = np.int64(2**62)
    bestnode_start = np.int64(2**62)
    left = ptree + lo
    right = ptree + hi + 1
    while left < right:
        if left & 1:
            st = _span_start_block(left, ptree, log2p)
            v = _excess(words, sup, cum, (st << 9) - 1) + np.int64(tmin[left])
            if v < bestnode_val or (v == bestnode_val and st < bestnode_start):
                bestnode_val = v
                bestnode_start = st
                bestnode = left
            left += 1
        if right & 1:
            right -= 1
            st = _span_start_block(right, ptree, log2p)
            v = _excess(words, sup, cum, (st << 9) - 1) + np.int64(tmin[right])
            if v < bestnode_val or (v == bestnode_val and st < bestnode_start):
                bestnode_val = v
                bestnode_start = st
                bestnode = right
        left >>= 1
        right >>= 1
    if bestnode >= 0 and bestnode_val < best:
        node = bestnode
        while node < ptree:
            l = node << 1
            lstart = _span_start_block(l, ptree, log2p)
            lval = _excess(words, sup, cum, (lstart << 9) - 1) + np.int64(tmin[l])
            if lval <= bestnode_val:
                node = l
            else:
                node = l + 1
        bb = node - ptree
        base = _excess(words, sup, cum, (bb << 9) - 1)
        best, bestpos, _ = _scan_min(words, bb << 9, (bb + 1) << 9, base, best, bestpos)
    base = _excess(words, sup, cum, (b2 << 9) - 1)
    best, bestpos, _ = _scan_min(words, b2 << 9, y + 1, base, best, bestpos)
    return bestpos


def _pack_bools(bits):
    bits = np.asarray(bits, dtype=np.uint8)
    nbits = len(bits)
    nwords = max(1, (nbits + 63) >> 6)
    padded = np.zeros(nwords * 64, np.uint8)
    padded[:nbits] = bits
    by = np.packbits(padded.reshape(-1, 8), axis=1, bitorder="little")
    return np.ascontiguousarray(by.reshape(-1)).view("<u8").astype(np.uint64), nbits


def _unpack_words(words, nbits):
    if nbits == 0:
        return np.zeros(0, np.uint8)
    by = words.astype("<u8").view(np.uint8)
    bits = np.unpackbits(by, bitorder="little")
    return bits[:nbits].copy()


class BitVector:
    """Immutable bit array with constant-time rank1 and fast select1."""

    __slots__ = ("words", "nbits", "sup", "cum", "samples", "nblocks", "total")

    def __init__(self, bits=None, *, _words=None, _nbits=None):
        if _words is not None:
            words = np.ascontiguousarray(_words, dtype=np.uint64)
            nbits = int(_nbits)
            need = max(1, (nbits + 63) >> 6)
            if len(words) < need:
                raise ValueError("word buffer shorter than declared bit length")
            words = words[:need].copy()
            if nbits & 63:
                words[-1] &= (_U1 << np.uint64(nbits & 63)) - _U1
        else:
            words, nbits = _pack_bools(bits)
        self.words = words
        self.nbits = nbits
        self._build_rank_dirs()
        for a in (self.words, self.sup, self.cum, self.samples):
            a.setflags(write=False)

    def _build_rank_dirs(self):
        nwords = len(self.words)
        nblocks = (nwords + _BLOCK_WORDS - 1) // _BLOCK_WORDS
        per_word = np.bitwise_count(self.words).astype(np.int64)
        padded = np.zeros(nblocks * _BLOCK_WORDS, np.int64)
        padded[:nwords] = per_word
        grid = padded.reshape(nblocks, _BLOCK_WORDS)
        sup = np.zeros(nblocks + 1, np.int64)
        np.cumsum(grid.sum(axis=1), out=sup[1:])
        within = np.zeros_like(grid)
        np.cumsum(grid[:, :-1], axis=1, out=within[:, 1:])
        cum = within.reshape(-1)[:nwords].astype(np.uint16)
        total = int(sup[-1])
        if total:
            ks = np.arange(0, total, _SELECT_SAMPLE, dtype=np.int64)
            samples = np.searchsorted(sup[1:], ks + 1, side="left").astype(np.int64)
        else:
            samples = np.zeros(1, np.int64)
        self.sup = sup
        self.cum = cum
        self.samples = samples
        self.nblocks = nblocks
        self.total = total

    @classmethod
    def from_words(cls, words, nbits):
        return cls(_words=words, _nbits=nbits)

    @classmethod
    def from_str(cls, s):
        """Build from a string of '1'/'0' or '('/')' characters."""
        table = {"1": 1, "0": 0, "(": 1, ")": 0}
        return cls([table[c] for c in s])

    def __len__(self):
        return self.nbits

    def access(self, i):
        if not 0 <= i < self.nbits:
            raise ValueError(f"bit index {i} out of range [0, {self.nbits})")
        return int(_getbit(self.words, i))

    def rank1(self, i):
        if not 0 <= i <= self.nbits:
            raise ValueError(f"rank index {i} out of range [0, {self.nbits}]")
        return int(_rank1(self.words, self.sup, self.cum, i))

    def select1(self, k):
        if not 1 <= k <= self.total:
            raise ValueError(f"select rank {k} out of range [1, {self.total}]")
        return int(_select1(self.words, self.sup, self.cum, self.samples, self.nblocks, k))

    def popcount(self):
        return self.total

    def to_bools(self):
        return _unpack_words(self.words, self.nbits)

    def to_bytes(self):
        return struct.pack("<Q", self.nbits) + self.words.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, buf):
        (nbits,) = struct.unpack_from("<Q", buf, 0)
        words = np.frombuffer(buf, dtype="<u8", offset=8).astype(np.uint64)
        return cls.from_words(words, nbits)

    def memory_bytes(self):
        return sum(a.nbytes for a in (self.words, self.sup, self.cum, self.samples))


class BalancedParens:
    """Navigation over a balanced parentheses sequence (1='(', 0=')')."""

    __slots__ = ("bv", "tmin", "tminb", "ttot", "ptree", "log2p")

    def __init__(self, bv):
        self.bv = bv if isinstance(bv, BitVector) else BitVector(bv)
        self._build_min_tree()
        for a in (self.tmin, self.tminb, self.ttot):
            a.setflags(write=False)

    @classmethod
    def from_str(cls, s):
        return cls(BitVector.from_str(s))

    def _build_min_tree(self):
        bv = self.bv
        nbits = bv.nbits
        nblocks = max(1, (nbits + _BLOCK_BITS - 1) // _BLOCK_BITS)
        ptree = 1
        while ptree < nblocks:
            ptree <<= 1
        log2p = ptree.bit_length() - 1
        tmin = np.full(2 * ptree, _INT32_INF, np.int32)
        tminb = np.full(2 * ptree, _INT32_INF, np.int32)
        ttot = np.zeros(2 * ptree, np.int32)

        nfull = nbits // _BLOCK_BITS
        if nfull:
            by = bv.words[: nfull * _BLOCK_WORDS].astype("<u8").view(np.uint8)
            by = by.reshape(nfull, 64).astype(np.int64)
            deltas = _BYTE_DELTA.astype(np.int64)[by]
            fmins = _BYTE_FWD_MIN.astype(np.int64)[by]
            starts = np.zeros((nfull, 64), np.int64)
            np.cumsum(deltas[:, :-1], axis=1, out=starts[:, 1:])
            leaf = np.arange(nfull)
            ttot[ptree + leaf] = (starts[:, -1] + deltas[:, -1]).astype(np.int32)
            tmin[ptree + leaf] = (starts + fmins).min(axis=1).astype(np.int32)
            # min over prefix lengths 0..511: cap at 0, exclude the last bit
            head = (starts[:, :63] + fmins[:, :63]).min(axis=1)
            tail = starts[:, 63] + _BYTE_FWD_MIN7.astype(np.int64)[by[:, 63]]
            tminb[ptree + leaf] = np.minimum(0, np.minimum(head, tail)).astype(np.int32)
        if nbits % _BLOCK_BITS or nbits == 0:
            b = nfull
            lo = b * _BLOCK_BITS
            cur = 0
            mn = int(_INT32_INF)
            mnb = 0
            for p in range(lo, nbits):
                if p > lo:
                    mnb = min(mnb, cur)
                cur += 2 * int(_getbit(bv.words, p)) - 1
                mn = min(mn, cur)
            tmin[ptree + b] = mn
            tminb[ptree + b] = mnb
            ttot[ptree + b] = cur
        for node in range(ptree - 1, 0, -1):
            l = node << 1
            r = l + 1
            ttot[node] = ttot[l] + ttot[r]
            tmin[node] = min(np.int64(tmin[l]), np.int64(ttot[l]) + np.int64(tmin[r]))
            tminb[node] = min(np.int64(tminb[l]), np.int64(ttot[l]) + np.int64(tminb[r]))
        self.tmin = tmin
        self.tminb = tminb
        self.ttot = ttot
        self.ptree = ptree
        self.log2p = log2p

    def __len__(self):
        return self.bv.nbits

    def is_open(self, i):
        return self.bv.access(i) == 1

    def excess(self, i):
        if not -1 <= i < self.bv.nbits:
            raise ValueError(f"excess index {i} out of range")
        return int(_excess(self.bv.words, self.bv.sup, self.bv.cum, i))

    def find_close(self, i):
        if not self.is_open(i):
            raise ValueError(f"find_close expects an open parenthesis at {i}")
        bv = self.bv
        return int(
            _find_close(
                bv.words, bv.sup, bv.cum, self.tmin, self.ttot,
                self.ptree, self.log2p, bv.nbits, i,
            )
        )

    def find_open(self, i):
        if self.is_open(i):
            raise ValueError(f"find_open expects a close parenthesis at {i}")
        bv = self.bv
        return int(
            _find_open(
                bv.words, bv.sup, bv.cum, self.tminb, self.ttot,
                self.ptree, self.log2p, bv.nbits, i,
            )
        )

    def enclose(self, i):
        if not self.is_open(i):
            raise ValueError(f"enclose expects an open parenthesis at {i}")
        bv = self.bv
        r = int(
            _enclose(
                bv.words, bv.sup, bv.cum, self.tminb, self.ttot,
                self.ptree, self.log2p, bv.nbits, i,
            )
        )
        return None if r == int(_NOT_FOUND) else r

    def rmq_excess(self, x, y):
        """Leftmost position of the minimum excess on [x, y]."""
        if not 0 <= x <= y < self.bv.nbits:
            raise ValueError("bad rmq range")
        bv = self.bv
        return int(
            _rmq_excess(
                bv.words, bv.sup, bv.cum, self.tmin, self.ttot,
                self.ptree, self.log2p, bv.nbits, x, y,
            )
        )

    def to_bytes(self):
        return self.bv.to_bytes()

    @classmethod
    def from_bytes(cls, buf):
        return cls(BitVector.from_bytes(buf))

    def memory_bytes(self):
        aux = sum(a.nbytes for a in (self.tmin, self.tminb, self.ttot))
        return self.bv.memory_bytes() + aux
