"""Compressed suffix tree over the pattern concatenation.

The tree topology is the suffix tree of the full concatenation (so edge
labels can run across pattern boundaries and may contain delimiter bytes;
matching code treats a delimiter edge byte as a hard stop). Construction
is offline: suffix array by doubling, LCP by Kasai, then one stack pass
over the LCP array builds the explicit interval tree, which a DFS flattens
into parentheses. The explicit tree is discarded; at runtime a node is its
open-parenthesis position and every query runs on four structures:

* B: the parentheses with a min-tree (navigation: parent, find_close, lca);
* L: a bitvector flagging leaf positions in B (rank gives suffix-array
  interval bounds, select maps a suffix rank to its leaf);
* the suffix-array layer (access / inverse / psi / first characters);
* the LCP array (string depth of an internal node is the LCP value at its
  first child boundary).

Suffix links: a leaf follows psi; an internal node takes the lca of the
psi images of its interval endpoints. A node whose interval starts at
rank 0 contains the bare-terminator suffix, which psi would wrap around
the text end, but such a node is the terminator leaf or the depth-1
delimiter node, so its suffix link is the root directly.

Pattern loci found at build time are handed to the marked-ancestor
structure; the starting ranks of the patterns (inverse suffix array at
each pattern start) support the "did the match end exactly at a pattern?"
test: a matched string S with the delimiter as the next edge byte is a
pattern iff some rank in the current node's interval is a pattern start.
"""

from __future__ import annotations

import numpy as np

from ._dispatch import maybe_njit
from .bitseq import (
    _NOT_FOUND,
    BalancedParens,
    BitVector,
    _enclose,
    _find_close,
    _getbit,
    _rank1,
    _rmq_excess,
    _select1,
)
from .lma import MarkedAncestorIndex
from .textindex import (
    ConcatDictionary,
    build_lcp,
    build_sa,
    byte_bands,
    make_csa,
    make_lcp,
    _pk_access,
    _pk_char_at,
    _pk_first_char,
    _pk_isa_at,
    _pk_lcp,
    _pk_psi,
)

ROOT = 0


# --- construction ------------------------------------------------------------


@maybe_njit
def _lcp_tree(sa, lcp, ndepth, lb, rb, first_child, next_sib, leaf_flag, stk):
    """Explicit suffix-tree-of-the-text from sa order and lcp values.

    Children end up linked newest-first (next_sib walks right to left);
    the BP emitter compensates. Returns the node count.
    """
    ell = len(sa)
    ndepth[ROOT] = 0
    lb[ROOT] = 0
    first_child[ROOT] = -1
    leaf_flag[ROOT] = 0
    nnodes = 1
    top = 0
    stk[0] = ROOT
    for i in range(ell):
        h = lcp[i]
        last = -1
        while ndepth[stk[top]] > h:
            u = stk[top]
            top -= 1
            rb[u] = i - 1
            if last != -1:
                next_sib[last] = first_child[u]
                first_child[u] = last
            last = u
        t = stk[top]
        if ndepth[t] == h and leaf_flag[t] == 1:
            # A suffix that is a proper prefix of the next one: wrap the
            # finished leaf in an internal node; the leaf keeps a
            # zero-length edge as its first child.
            top -= 1
            u = nnodes
            nnodes += 1
            ndepth[u] = h
            lb[u] = lb[t]
            first_child[u] = t
            next_sib[t] = -1
            leaf_flag[u] = 0
            top += 1
            stk[top] = u
            t = u
        if ndepth[t] == h:
            if last != -1:
                next_sib[last] = first_child[t]
                first_child[t] = last
        else:
            u = nnodes
            nnodes += 1
            ndepth[u] = h
            lb[u] = lb[last]
            first_child[u] = last
            next_sib[last] = -1
            leaf_flag[u] = 0
            top += 1
            stk[top] = u
        w = nnodes
        nnodes += 1
        ndepth[w] = ell - sa[i]
        lb[w] = i
        rb[w] = i
        first_child[w] = -1
        leaf_flag[w] = 1
        top += 1
        stk[top] = w
    last = -1
    while top > 0:
        u = stk[top]
        top -= 1
        rb[u] = ell - 1
        if last != -1:
            next_sib[last] = first_child[u]
            first_child[u] = last
        last = u
    rb[ROOT] = ell - 1
    if last != -1:
        next_sib[last] = first_child[ROOT]
        first_child[ROOT] = last
    return nnodes


@maybe_njit
def _emit_bp(first_child, next_sib, bwords, lwords, bp_pos, stk):
    """Preorder parentheses; children linked newest-first, so pushing in
    link order pops them oldest-first (left to right)."""
    pos = np.int64(0)
    sp = 0
    stk[0] = ROOT << 1
    while sp >= 0:
        e = stk[sp]
        sp -= 1
        if e & 1:
            pos += 1  # close parenthesis: bit stays zero
            continue
        node = e >> 1
        bp_pos[node] = pos
        bwords[pos >> 6] |= np.uint64(1) << (np.uint64(pos) & np.uint64(63))
        if first_child[node] == -1:
            lwords[pos >> 6] |= np.uint64(1) << (np.uint64(pos) & np.uint64(63))
        pos += 1
        sp += 1
        stk[sp] = (node << 1) | 1
        c = first_child[node]
        while c != -1:
            sp += 1
            stk[sp] = c << 1
            c = next_sib[c]


@maybe_njit
def _find_pattern_loci(first_child, next_sib, ndepth, lb, concat, sa, starts,
                       boundaries, loci):
    """Explicit-tree node whose path label equals each pattern, or -1."""
    for pid in range(len(starts)):
        plen = boundaries[pid] - starts[pid]
        v = ROOT
        while ndepth[v] < plen:
            want = concat[starts[pid] + ndepth[v]]
            u = first_child[v]
            while u != -1:
                if ndepth[u] > ndepth[v] and concat[sa[lb[u]] + ndepth[v]] == want:
                    break
                u = next_sib[u]
            v = u
        loci[pid] = v if ndepth[v] == plen else -1


# --- navigation kernels -------------------------------------------------------
# B pack: (words, sup, cum, tmin, tminb, ttot, ptree, log2p, nbits)
# L pack: (words, sup, cum, samples, nblocks)


@maybe_njit
def _bp_close(B, i):
    return _find_close(B[0], B[1], B[2], B[3], B[5], B[6], B[7], B[8], i)


@maybe_njit
def _bp_enclose(B, i):
    return _enclose(B[0], B[1], B[2], B[4], B[5], B[6], B[7], B[8], i)


@maybe_njit
def _nav_is_leaf(B, v):
    return _getbit(B[0], v + 1) == 0


@maybe_njit
def _nav_lb(L, v):
    return _rank1(L[0], L[1], L[2], v)


@maybe_njit
def _nav_rb(B, L, v):
    return _rank1(L[0], L[1], L[2], _bp_close(B, v)) - 1


@maybe_njit
def _nav_leaf_bp(L, i):
    return _select1(L[0], L[1], L[2], L[3], L[4], i + 1)


@maybe_njit
def _nav_depth(B, L, CSA, LCP, v):
    if v == ROOT:
        return np.int64(0)
    if _nav_is_leaf(B, v):
        return CSA[12] - _pk_access(CSA, _nav_lb(L, v))
    return _pk_lcp(LCP, _nav_rb(B, L, v + 1) + 1)


@maybe_njit
def _nav_parent(B, v):
    r = _bp_enclose(B, v)
    if r == _NOT_FOUND:
        return np.int64(-1)
    return r


@maybe_njit
def _nav_child(B, L, CSA, v, c, vdepth):
    """Child of v whose edge starts with byte c; -1 when absent.
    vdepth must be string_depth(v). Children are in suffix order, so
    first bytes ascend and a zero-length-edge leaf can only come first."""
    if _nav_is_leaf(B, v):
        return np.int64(-1)
    u = v + 1
    if _nav_is_leaf(B, u) and CSA[12] - _pk_access(CSA, _nav_lb(L, u)) == vdepth:
        u = _bp_close(B, u) + 1
    while _getbit(B[0], u) == 1:
        fc = _pk_char_at(CSA, _pk_access(CSA, _nav_lb(L, u)) + vdepth)
        if fc == c:
            return np.int64(u)
        if fc > c:
            return np.int64(-1)
        u = _bp_close(B, u) + 1
    return np.int64(-1)


@maybe_njit
def _nav_lca(B, x, y):
    if x > y:
        x, y = y, x
    if x == y:
        return np.int64(x)
    if _bp_close(B, x) > y:
        return np.int64(x)
    m = _rmq_excess(B[0], B[1], B[2], B[3], B[5], B[6], B[7], B[8], x, y)
    return _bp_enclose(B, m + 1)


@maybe_njit
def _nav_root_child(B, L, CSA, c):
    """Root child whose edge starts with byte c; -1 when absent.
    Root edges partition the suffixes by first byte, so the child is the
    deepest node covering the whole byte band, i.e. the band extremes' LCA.
    No suffix-array accesses, unlike the sibling walk in _nav_child."""
    lo = CSA[11][c]
    hi = CSA[11][c + 1]
    if hi <= lo:
        return np.int64(-1)
    x = _nav_leaf_bp(L, lo)
    if hi - lo == 1:
        return np.int64(x)
    return _nav_lca(B, x, _nav_leaf_bp(L, hi - 1))


@maybe_njit
def _nav_slink(B, L, CSA, v):
    if v == ROOT:
        return np.int64(ROOT)
    lo = _nav_lb(L, v)
    if lo == 0:
        # interval holds the bare-terminator suffix: v is its leaf or the
        # depth-1 delimiter node, and both link to the root
        return np.int64(ROOT)
    if _nav_is_leaf(B, v):
        return _nav_leaf_bp(L, _pk_psi(CSA, lo))
    hi = _nav_rb(B, L, v)
    x = _nav_leaf_bp(L, _pk_psi(CSA, lo))
    y = _nav_leaf_bp(L, _pk_psi(CSA, hi))
    return _nav_lca(B, x, y)


@maybe_njit
def _announce_lookup(start_ranks, start_ids, lo, hi):
    """Pattern id with suffix-array rank inside [lo, hi], or -1."""
    i = np.searchsorted(start_ranks, lo)
    if i < len(start_ranks) and start_ranks[i] <= hi:
        return np.int64(start_ids[i])
    return np.int64(-1)


# --- index object -------------------------------------------------------------


class CstIndex:
    """Succinct suffix-tree backend; a node is its open-paren position."""

    __slots__ = ("bp", "leaves", "csa", "lcp", "marks", "start_ranks",
                 "start_ids", "ell", "d", "nnodes", "csa_profile",
                 "lcp_profile")

    def __init__(self, bp, leaves, csa, lcp, marks, start_ranks, start_ids,
                 ell, d, csa_profile, lcp_profile):
        self.bp = bp
        self.leaves = leaves
        self.csa = csa
        self.lcp = lcp
        self.marks = marks
        self.start_ranks = start_ranks
        self.start_ids = start_ids
        self.ell = ell
        self.d = d
        self.nnodes = bp.bv.nbits // 2
        self.csa_profile = csa_profile
        self.lcp_profile = lcp_profile

    @classmethod
    def build(cls, dictionary: ConcatDictionary, csa_profile="sampled",
              lcp_profile="compact", sample_rate=32):
        concat = dictionary.concat
        ell = dictionary.ell
        suffixes = build_sa(dictionary)
        lcp_arr = build_lcp(dictionary, suffixes)
        sa64 = suffixes.sa.astype(np.int64)
        lcp64 = lcp_arr.astype(np.int64)

        cap = 2 * ell + 2
        ndepth = np.zeros(cap, np.int64)
        lb = np.zeros(cap, np.int64)
        rb = np.zeros(cap, np.int64)
        first_child = np.full(cap, -1, np.int64)
        next_sib = np.full(cap, -1, np.int64)
        leaf_flag = np.zeros(cap, np.uint8)
        stk = np.zeros(cap + 2, np.int64)
        nnodes = int(_lcp_tree(sa64, lcp64, ndepth, lb, rb, first_child,
                               next_sib, leaf_flag, stk))

        nbits = 2 * nnodes
        nwords = max(1, (nbits + 63) >> 6)
        bwords = np.zeros(nwords, np.uint64)
        lwords = np.zeros(nwords, np.uint64)
        bp_pos = np.zeros(nnodes, np.int64)
        _emit_bp(first_child, next_sib, bwords, lwords, bp_pos,
                 np.zeros(nbits + 2, np.int64))
        bp = BalancedParens(BitVector.from_words(bwords, nbits))
        leaves = BitVector.from_words(lwords, nbits)

        loci = np.full(dictionary.d, -1, np.int64)
        _find_pattern_loci(first_child, next_sib, ndepth, lb, concat, sa64,
                           dictionary.starts, dictionary.boundaries, loci)
        marked = [(int(bp_pos[loci[pid]]), pid,
                   int(dictionary.boundaries[pid] - dictionary.starts[pid]))
                  for pid in range(dictionary.d) if loci[pid] >= 0]
        marked.sort()
        marks = MarkedAncestorIndex(
            bp,
            [m[0] for m in marked],
            np.array([m[1] for m in marked], np.int32),
            np.array([m[2] for m in marked], np.int64),
        )

        ranks = suffixes.isa[dictionary.starts].astype(np.int64)
        order = np.argsort(ranks)
        start_ranks = ranks[order]
        start_ids = order.astype(np.int32)
        start_ranks.setflags(write=False)
        start_ids.setflags(write=False)

        csa = make_csa(csa_profile, suffixes, byte_bands(dictionary), sample_rate)
        lcp = make_lcp(lcp_profile, lcp_arr)
        return cls(bp, leaves, csa, lcp, marks, start_ranks, start_ids,
                   ell, dictionary.d, csa_profile, lcp_profile)

    # --- packs for kernels -------------------------------------------------

    def bp_pack(self):
        bp = self.bp
        return (bp.bv.words, bp.bv.sup, bp.bv.cum, bp.tmin, bp.tminb, bp.ttot,
                np.int64(bp.ptree), np.int64(bp.log2p), np.int64(bp.bv.nbits))

    def leaves_pack(self):
        lv = self.leaves
        return (lv.words, lv.sup, lv.cum, lv.samples, np.int64(lv.nblocks))

    # --- navigation ---------------------------------------------------------

    def _check(self, v):
        if not 0 <= v < self.bp.bv.nbits or not self.bp.is_open(v):
            raise ValueError(f"{v} is not a node (open parenthesis position)")

    def is_leaf(self, v):
        self._check(v)
        return bool(_nav_is_leaf(self.bp_pack(), v))

    def lb(self, v):
        self._check(v)
        return int(_nav_lb(self.leaves_pack(), v))

    def rb(self, v):
        self._check(v)
        return int(_nav_rb(self.bp_pack(), self.leaves_pack(), v))

    def leaf_of_rank(self, i):
        if not 0 <= i < self.ell:
            raise ValueError(f"suffix rank {i} out of range")
        return int(_nav_leaf_bp(self.leaves_pack(), i))

    def string_depth(self, v):
        self._check(v)
        return int(_nav_depth(self.bp_pack(), self.leaves_pack(),
                              self.csa.kernel_pack(), self.lcp.kernel_pack(), v))

    def parent(self, v):
        self._check(v)
        p = int(_nav_parent(self.bp_pack(), v))
        return None if p < 0 else p

    def edge_length(self, v):
        self._check(v)
        if v == ROOT:
            return 0
        return self.string_depth(v) - self.string_depth(self.parent(v))

    def child(self, v, c):
        self._check(v)
        w = int(_nav_child(self.bp_pack(), self.leaves_pack(),
                           self.csa.kernel_pack(), v, c, self.string_depth(v)))
        return None if w < 0 else w

    def children(self, v):
        self._check(v)
        out = []
        if _nav_is_leaf(self.bp_pack(), v):
            return out
        u = v + 1
        while self.bp.bv.access(u) == 1:
            out.append(u)
            u = self.bp.find_close(u) + 1
        return out

    def suffix_link(self, v):
        self._check(v)
        return int(_nav_slink(self.bp_pack(), self.leaves_pack(),
                              self.csa.kernel_pack(), v))

    def lca(self, u, v):
        self._check(u)
        self._check(v)
        return int(_nav_lca(self.bp_pack(), u, v))

    def get_char_at_node_pos(self, v, k):
        """Byte at root-path offset k on the way to v (k < string_depth)."""
        self._check(v)
        if not 0 <= k < self.string_depth(v):
            raise ValueError(f"offset {k} not on the root path of node {v}")
        return int(_pk_char_at(self.csa.kernel_pack(),
                               int(_pk_access(self.csa.kernel_pack(), self.lb(v))) + k))

    def label(self, v):
        """Root path label (test helper; walks one character at a time)."""
        self._check(v)
        depth = self.string_depth(v)
        pos = int(_pk_access(self.csa.kernel_pack(), self.lb(v)))
        P = self.csa.kernel_pack()
        r = int(_pk_isa_at(P, pos))
        out = bytearray()
        for _ in range(depth):
            out.append(int(_pk_first_char(P, r)))
            r = int(_pk_psi(P, r))
        return bytes(out)

    def announce_id(self, lo, hi):
        a = int(_announce_lookup(self.start_ranks, self.start_ids, lo, hi))
        return None if a < 0 else a

    def marked_count(self):
        return self.marks.nmarked

    def memory_bytes(self):
        return (self.bp.memory_bytes() + self.leaves.memory_bytes()
                + self.csa.memory_bytes() + self.lcp.memory_bytes()
                + self.marks.memory_bytes()
                + self.start_ranks.nbytes + self.start_ids.nbytes)
