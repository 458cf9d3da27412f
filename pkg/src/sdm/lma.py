"""Lowest-marked-ancestor queries over a balanced-parentheses tree.

A tree is given as a parentheses sequence B. A subset of its nodes is
marked; each marked node carries a payload (pattern id and length here,
but the structure is generic). Two small structures answer "deepest
marked ancestor-or-self of v" in a constant number of rank/select/
parentheses queries:

* M: a bitvector aligned with B, 1 at both parentheses of every marked
  node;
* D: the subsequence of B at the positions where M is 1, itself a
  balanced sequence, encoding the nesting of just the marked nodes.

The k-th 1 of M corresponds to position k-1 of D with the same paren
orientation. A query finds the last marked parenthesis at or before v:
an open one is the answer itself; a close one belongs to a subtree
entirely to the left, whose enclosing marked node (found in D, where
the irrelevant unmarked structure is gone) is the answer.

Queries return the root's open parenthesis (position 0) as the "no
marked ancestor" sentinel; callers disambiguate a genuinely marked root
via M[0].
"""

from __future__ import annotations

import numpy as np

from ._dispatch import maybe_njit
from .bitseq import (
    _NOT_FOUND,
    BalancedParens,
    BitVector,
    _enclose,
    _find_open,
    _getbit,
    _rank1,
    _select1,
)

ROOT_BP = 0


@maybe_njit
def _lma_dpos(m_words, m_sup, m_cum, d_words, d_sup, d_cum, d_tminb, d_ttot,
              d_ptree, d_log2p, d_nbits, v):
    """D open position of the nearest marked ancestor-or-self, or -1."""
    pre_y = _rank1(m_words, m_sup, m_cum, v + 1)
    if pre_y == 0:
        return np.int64(-1)
    j = pre_y - 1
    if _getbit(d_words, j) == 1:
        return np.int64(j)
    y2 = _find_open(d_words, d_sup, d_cum, d_tminb, d_ttot, d_ptree, d_log2p,
                    d_nbits, j)
    y3 = _enclose(d_words, d_sup, d_cum, d_tminb, d_ttot, d_ptree, d_log2p,
                  d_nbits, y2)
    if y3 == _NOT_FOUND:
        return np.int64(-1)
    return y3


@maybe_njit
def _lma_every_open(b_words, b_nbits, m_words, m_sup, m_cum, m_samples,
                    m_nblocks, d_words, d_sup, d_cum, d_tminb, d_ttot,
                    d_ptree, d_log2p, d_nbits, out):
    """Answer the query at every open parenthesis, in preorder; -1 = none."""
    i = 0
    for v in range(b_nbits):
        if _getbit(b_words, v) == 1:
            j = _lma_dpos(m_words, m_sup, m_cum, d_words, d_sup, d_cum,
                          d_tminb, d_ttot, d_ptree, d_log2p, d_nbits, v)
            if j < 0:
                out[i] = -1
            else:
                out[i] = _select1(m_words, m_sup, m_cum, m_samples,
                                  m_nblocks, j + 1)
            i += 1
    return i


@maybe_njit
def _dpos_payload(d_words, d_sup, d_cum, j):
    """Marked-node index (payload slot) of the D open parenthesis at j."""
    return _rank1(d_words, d_sup, d_cum, j + 1) - 1


@maybe_njit
def _dpos_up(d_words, d_sup, d_cum, d_tminb, d_ttot, d_ptree, d_log2p,
             d_nbits, j):
    """D open position of the next marked strict ancestor, or -1."""
    r = _enclose(d_words, d_sup, d_cum, d_tminb, d_ttot, d_ptree, d_log2p,
                 d_nbits, j)
    if r == _NOT_FOUND:
        return np.int64(-1)
    return r


class MarkedAncestorIndex:
    """M/D pair plus per-marked-node payload, frozen after construction."""

    __slots__ = ("bp", "M", "D", "pat_id", "pat_len", "nmarked")

    def __init__(self, bp: BalancedParens, marked_opens, pat_id=None, pat_len=None):
        self.bp = bp
        nbits = bp.bv.nbits
        opens = np.asarray(sorted(int(p) for p in marked_opens), np.int64)
        for p in opens:
            if not 0 <= p < nbits or not bp.is_open(int(p)):
                raise ValueError(f"marked position {p} is not an open parenthesis")
        if len(np.unique(opens)) != len(opens):
            raise ValueError("duplicate marked node")
        self.nmarked = len(opens)
        mbits = np.zeros(nbits, np.uint8)
        for p in opens:
            mbits[p] = 1
            mbits[bp.find_close(int(p))] = 1
        self.M = BitVector(mbits)
        dbits = mbits.nonzero()[0]
        orient = np.array([bp.bv.access(int(p)) for p in dbits], np.uint8)
        self.D = BalancedParens(BitVector(orient))
        if pat_id is None:
            pat_id = np.arange(self.nmarked, dtype=np.int32)
        if pat_len is None:
            pat_len = np.zeros(self.nmarked, np.int64)
        self.pat_id = np.ascontiguousarray(pat_id, np.int32)
        self.pat_len = np.ascontiguousarray(pat_len, np.int64)
        if len(self.pat_id) != self.nmarked or len(self.pat_len) != self.nmarked:
            raise ValueError("payload length does not match marked node count")
        self.pat_id.setflags(write=False)
        self.pat_len.setflags(write=False)

    @classmethod
    def build_marks(cls, bp, predicate, pat_id=None, pat_len=None):
        """Mark every open position v with predicate(v) true (test helper)."""
        opens = [v for v in range(bp.bv.nbits) if bp.is_open(v) and predicate(v)]
        return cls(bp, opens, pat_id, pat_len)

    def _check_node(self, v):
        if not 0 <= v < self.bp.bv.nbits or not self.bp.is_open(v):
            raise ValueError(f"{v} is not an open parenthesis position")

    def _lma_dpos(self, v):
        m, d = self.M, self.D.bv
        return int(_lma_dpos(m.words, m.sup, m.cum, d.words, d.sup, d.cum,
                             self.D.tminb, self.D.ttot,
                             np.int64(self.D.ptree), np.int64(self.D.log2p),
                             np.int64(d.nbits), v))

    def to_bpos(self, dpos):
        """B position of the marked open parenthesis at D position dpos."""
        return self.M.select1(dpos + 1)

    def marked_nodes(self):
        """B positions of the marked nodes, in tree order."""
        return [self.to_bpos(j) for j in range(self.D.bv.nbits)
                if self.D.bv.access(j) == 1]

    def is_marked(self, v):
        self._check_node(v)
        return bool(self.M.access(v))

    def lma(self, v):
        """Nearest marked ancestor-or-self as a B position; root = sentinel."""
        self._check_node(v)
        j = self._lma_dpos(v)
        if j < 0:
            return ROOT_BP
        return self.to_bpos(j)

    def payload(self, v):
        """(pattern id, pattern length) of a marked node."""
        self._check_node(v)
        if not self.M.access(v):
            raise ValueError(f"node {v} is not marked")
        j = self.M.rank1(v)
        idx = int(_dpos_payload(self.D.bv.words, self.D.bv.sup, self.D.bv.cum, j))
        return int(self.pat_id[idx]), int(self.pat_len[idx])

    def marked_chain(self, v):
        """Marked ancestors-or-self, deepest first, as B positions."""
        self._check_node(v)
        out = []
        d = self.D.bv
        j = self._lma_dpos(v)
        while j >= 0:
            out.append(self.to_bpos(int(j)))
            j = int(_dpos_up(d.words, d.sup, d.cum, self.D.tminb, self.D.ttot,
                             np.int64(self.D.ptree), np.int64(self.D.log2p),
                             np.int64(d.nbits), j))
        return out

    def lma_all(self):
        """lma() for every node in preorder, -1 where no marked ancestor.

        Unlike lma(), an unmarked-root answer is -1 rather than the root
        sentinel, so results compare directly against a walking oracle.
        """
        bv = self.bp.bv
        d = self.D.bv
        out = np.empty(bv.nbits // 2, np.int64)
        _lma_every_open(bv.words, np.int64(bv.nbits), self.M.words,
                        self.M.sup, self.M.cum, self.M.samples,
                        np.int64(self.M.nblocks), d.words, d.sup, d.cum,
                        self.D.tminb, self.D.ttot, np.int64(self.D.ptree),
                        np.int64(self.D.log2p), np.int64(d.nbits), out)
        return out

    def memory_bytes(self):
        return (self.M.memory_bytes() + self.D.memory_bytes()
                + self.pat_id.nbytes + self.pat_len.nbytes)
