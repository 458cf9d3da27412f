"""Streaming dictionary matcher over either suffix-tree backend.

One pass over the text maintains the longest suffix of the scanned prefix
that is still a factor of some pattern, as a tree locus (node, offset on
its incoming edge). Each step either consumes one text byte (edge compare,
or a child probe when sitting at a node) or handles a halt:

* announce: when the halt is against a delimiter edge byte, the matched
  string itself may be a complete pattern ending at the previous text
  position (the pointer tree keeps a flag on the pattern's leaf; the
  compressed tree checks the node interval for a pattern-start rank);
* checkpoint: every complete-pattern prefix of the matched string is
  emitted at the position where that prefix ended, by walking the
  marked-ancestor chain of the nearest node at or above the locus;
* relocate: drop the first matched character by following the suffix link
  of the node below the locus and walking upward by the unmatched tail of
  its edge (depth-1 states restart at the root instead, retrying the same
  byte; depth-0 states advance the text by one byte).

After the last text byte the remaining suffix states are drained the same
way, so matches that end flush with the text are still checkpointed.

Emissions go into per-position maxima, which makes the output canonical by
construction: at most one occurrence per end position, the longest pattern
ending there, in ascending position order. Work is counted in two places
so linearity is observable: character comparisons (edge-byte tests and
child probes) and suffix-link traversals.

The kernels and the pure-Python reference engine count identical events;
tests hold them to equal outputs and equal counters.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._dispatch import maybe_njit
from .bitseq import _getbit
from .cst import (
    CstIndex,
    _announce_lookup,
    _nav_child,
    _nav_root_child,
    _nav_lb,
    _nav_parent,
    _nav_rb,
    _nav_slink,
)
from .gst import GstIndex, _gst_child
from .lma import _dpos_payload, _dpos_up, _lma_dpos
from .textindex import (
    DELIMITER,
    _pk_access,
    _pk_first_char,
    _pk_isa_at,
    _pk_lcp,
    _pk_psi,
)

ROOT = 0


class Occurrence(NamedTuple):
    end_pos: int
    pattern_id: int
    length: int


class ScanCounters:
    """Comparison and suffix-link tallies for one search call."""

    __slots__ = ("comparisons", "links")

    def __init__(self, comparisons=0, links=0):
        self.comparisons = int(comparisons)
        self.links = int(links)

    def total(self):
        return self.comparisons + self.links

    def __repr__(self):
        return f"ScanCounters(comparisons={self.comparisons}, links={self.links})"


class MatchState:
    """The five live variables of the scan loop.

    text_index is the position where the current edge began matching, so
    text_index + cur_node_index is the read cursor; skipcount holds the
    in-flight upward walk distance; used_skip_count records that the last
    relocation landed mid-edge (the next step resumes comparing instead of
    probing a child).
    """

    __slots__ = ("cur_node", "cur_node_index", "text_index", "skipcount",
                 "used_skip_count")

    def __init__(self):
        self.cur_node = ROOT
        self.cur_node_index = 0
        self.text_index = 0
        self.skipcount = 0
        self.used_skip_count = False


def _reserved_error(text_arr, off):
    return ValueError(
        f"text contains reserved byte 0x{int(text_arr[off]):02x} at offset {off}")


# --- pointer-tree kernel -------------------------------------------------------


@maybe_njit
def _gst_checkpoint(parent, depth, mark_pat, nma, x, cursor, mdepth,
                    best_len, best_id):
    u = nma[x]
    while u >= 0:
        dm = depth[u]
        e = cursor - mdepth + dm - 1
        if dm > best_len[e]:
            best_len[e] = dm
            best_id[e] = mark_pat[u]
        u = nma[parent[u]]


@maybe_njit
def _gst_skip(parent, slink, edge_start, edge_end, v, k):
    up = (edge_end[v] - edge_start[v]) - k
    w = np.int64(slink[v])
    el = edge_end[w] - edge_start[w]
    while up >= el and w != ROOT:
        up -= el
        w = np.int64(parent[w])
        el = edge_end[w] - edge_start[w]
    return w, el - up, el


@maybe_njit
def _scan_gst(text, child_ptr, child_chr, child_id, parent, slink, edge_start,
              edge_end, concat, depth, mark_pat, announce_id, nma,
              best_len, best_id):
    n = len(text)
    ncmp = np.int64(0)
    links = np.int64(0)
    v = np.int64(ROOT)
    k = np.int64(0)
    el = np.int64(0)
    mdepth = np.int64(0)
    cursor = np.int64(0)
    while cursor < n:
        c = text[cursor]
        if c < 2:
            return ncmp, links, cursor
        if k == el:
            ncmp += 1
            w = _gst_child(child_ptr, child_chr, child_id, v, c)
            if w >= 0:
                v = w
                el = edge_end[v] - edge_start[v]
                k = np.int64(1)
                mdepth += 1
                cursor += 1
                continue
            x = v
        else:
            ncmp += 1
            if concat[edge_start[v] + k] == c:
                k += 1
                mdepth += 1
                cursor += 1
                continue
            if concat[edge_start[v] + k] == DELIMITER and announce_id[v] >= 0:
                if mdepth > best_len[cursor - 1]:
                    best_len[cursor - 1] = mdepth
                    best_id[cursor - 1] = announce_id[v]
            x = parent[v]
        _gst_checkpoint(parent, depth, mark_pat, nma, x, cursor, mdepth,
                        best_len, best_id)
        if mdepth == 0:
            cursor += 1
        elif mdepth == 1:
            v = np.int64(ROOT)
            k = np.int64(0)
            el = np.int64(0)
            mdepth = np.int64(0)
        else:
            links += 1
            v, k, el = _gst_skip(parent, slink, edge_start, edge_end, v, k)
            mdepth -= 1
    while mdepth > 0:
        if k < el:
            if concat[edge_start[v] + k] == DELIMITER and announce_id[v] >= 0:
                if mdepth > best_len[cursor - 1]:
                    best_len[cursor - 1] = mdepth
                    best_id[cursor - 1] = announce_id[v]
            x = parent[v]
        else:
            x = v
        _gst_checkpoint(parent, depth, mark_pat, nma, x, cursor, mdepth,
                        best_len, best_id)
        if mdepth == 1:
            break
        links += 1
        v, k, el = _gst_skip(parent, slink, edge_start, edge_end, v, k)
        mdepth -= 1
    return ncmp, links, np.int64(-1)


# --- compressed-tree kernel ----------------------------------------------------


@maybe_njit
def _cst_enter(B, L, P, LC, w, pd):
    """Arrival bookkeeping for node w under a parent of string depth pd:
    (left rank bound, text position of the subtree's first suffix,
    edge length)."""
    lbw = _nav_lb(L, w)
    sabw = _pk_access(P, lbw)
    if _getbit(B[0], w + 1) == 0:
        dw = P[12] - sabw
    else:
        dw = _pk_lcp(LC, _nav_rb(B, L, w + 1) + 1)
    return lbw, sabw, dw - pd


@maybe_njit
def _cst_depth(B, L, P, LC, v):
    if v == ROOT:
        return np.int64(0)
    if _getbit(B[0], v + 1) == 0:
        return P[12] - _pk_access(P, _nav_lb(L, v))
    return _pk_lcp(LC, _nav_rb(B, L, v + 1) + 1)


@maybe_njit
def _cst_skip(B, L, P, LC, v, k, el):
    up = el - k
    w = _nav_slink(B, L, P, v)
    dw = _cst_depth(B, L, P, LC, w)
    while w != ROOT:
        pw = _nav_parent(B, w)
        dpw = _cst_depth(B, L, P, LC, pw)
        elw = dw - dpw
        if up < elw:
            return w, elw - up, elw, dpw
        up -= elw
        w = pw
        dw = dpw
    return w, np.int64(0), np.int64(0), np.int64(0)


@maybe_njit
def _cst_checkpoint(mwords, msup, mcum, dwords, dsup, dcum, dtminb, dttot,
                    dptree, dlog2p, dnbits, pat_id, pat_len, x, cursor,
                    mdepth, best_len, best_id):
    j = _lma_dpos(mwords, msup, mcum, dwords, dsup, dcum, dtminb, dttot,
                  dptree, dlog2p, dnbits, x)
    while j >= 0:
        idx = _dpos_payload(dwords, dsup, dcum, j)
        dm = pat_len[idx]
        e = cursor - mdepth + dm - 1
        if dm > best_len[e]:
            best_len[e] = dm
            best_id[e] = pat_id[idx]
        j = _dpos_up(dwords, dsup, dcum, dtminb, dttot, dptree, dlog2p,
                     dnbits, j)


@maybe_njit
def _scan_cst(text, B, L, P, LC, mwords, msup, mcum, dwords, dsup, dcum,
              dtminb, dttot, dptree, dlog2p, dnbits, pat_id, pat_len,
              start_ranks, start_ids, best_len, best_id):
    n = len(text)
    ncmp = np.int64(0)
    links = np.int64(0)
    v = np.int64(ROOT)
    k = np.int64(0)
    el = np.int64(0)
    pd = np.int64(0)
    lbv = np.int64(0)
    sabv = np.int64(0)
    r_next = np.int64(0)  # rank of the suffix starting at the next edge byte
    mdepth = np.int64(0)
    cursor = np.int64(0)
    while cursor < n:
        c = text[cursor]
        if c < 2:
            return ncmp, links, cursor
        if k == el:
            ncmp += 1
            if v == ROOT:
                w = _nav_root_child(B, L, P, c)
            else:
                w = _nav_child(B, L, P, v, c, mdepth)
            if w >= 0:
                lbv, sabv, el = _cst_enter(B, L, P, LC, w, mdepth)
                pd = mdepth
                v = w
                k = np.int64(1)
                mdepth += 1
                cursor += 1
                if k < el:
                    r_next = _pk_isa_at(P, sabv + pd + k)
                continue
            x = v
        else:
            ncmp += 1
            ec = _pk_first_char(P, r_next)
            if ec == c:
                k += 1
                mdepth += 1
                cursor += 1
                if k < el:
                    r_next = _pk_psi(P, r_next)
                continue
            if ec == DELIMITER:
                pid = _announce_lookup(start_ranks, start_ids, lbv,
                                       _nav_rb(B, L, v))
                if pid >= 0 and mdepth > best_len[cursor - 1]:
                    best_len[cursor - 1] = mdepth
                    best_id[cursor - 1] = pid
            x = _nav_parent(B, v)
        _cst_checkpoint(mwords, msup, mcum, dwords, dsup, dcum, dtminb, dttot,
                        dptree, dlog2p, dnbits, pat_id, pat_len, x, cursor,
                        mdepth, best_len, best_id)
        if mdepth == 0:
            cursor += 1
        elif mdepth == 1:
            v = np.int64(ROOT)
            k = np.int64(0)
            el = np.int64(0)
            pd = np.int64(0)
            mdepth = np.int64(0)
        else:
            links += 1
            v, k, el, pd = _cst_skip(B, L, P, LC, v, k, el)
            mdepth -= 1
            lbv = _nav_lb(L, v)
            sabv = _pk_access(P, lbv)
            if k < el:
                r_next = _pk_isa_at(P, sabv + pd + k)
    while mdepth > 0:
        if k < el:
            if _pk_first_char(P, r_next) == DELIMITER:
                pid = _announce_lookup(start_ranks, start_ids, lbv,
                                       _nav_rb(B, L, v))
                if pid >= 0 and mdepth > best_len[cursor - 1]:
                    best_len[cursor - 1] = mdepth
                    best_id[cursor - 1] = pid
            x = _nav_parent(B, v)
        else:
            x = v
        _cst_checkpoint(mwords, msup, mcum, dwords, dsup, dcum, dtminb, dttot,
                        dptree, dlog2p, dnbits, pat_id, pat_len, x, cursor,
                        mdepth, best_len, best_id)
        if mdepth == 1:
            break
        links += 1
        v, k, el, pd = _cst_skip(B, L, P, LC, v, k, el)
        mdepth -= 1
        lbv = _nav_lb(L, v)
        sabv = _pk_access(P, lbv)
        if k < el:
            r_next = _pk_isa_at(P, sabv + pd + k)
    return ncmp, links, np.int64(-1)


# --- reference engine ----------------------------------------------------------


class _GstOps:
    """Pointer-tree adapter for the reference engine."""

    def __init__(self, index):
        self.ix = index

    def edge_len(self, v):
        return self.ix.edge_len(v)

    def edge_char(self, v, k):
        return self.ix.edge_char(v, k)

    def child(self, v, c, vdepth):
        w = self.ix.child(v, c)
        return -1 if w is None else w

    def parent(self, v):
        return int(self.ix.parent[v])

    def slink(self, v):
        w = int(self.ix.slink[v])
        # links never lose more than one node of path depth
        assert self.ix.node_depth[w] >= self.ix.node_depth[v] - 1
        return w

    def announce_pid(self, v):
        return int(self.ix.announce_id[v])

    def chain(self, x):
        ix = self.ix
        out = []
        u = int(ix.nma[x])
        while u >= 0:
            out.append((int(ix.mark_pat[u]), int(ix.depth[u])))
            u = int(ix.nma[int(ix.parent[u])])
        return out


class _CstOps:
    """Compressed-tree adapter for the reference engine."""

    def __init__(self, index):
        self.ix = index

    def edge_len(self, v):
        return self.ix.edge_length(v)

    def edge_char(self, v, k):
        pd = self.ix.string_depth(self.ix.parent(v))
        return self.ix.get_char_at_node_pos(v, pd + k)

    def child(self, v, c, vdepth):
        w = self.ix.child(v, c)
        return -1 if w is None else w

    def parent(self, v):
        p = self.ix.parent(v)
        return ROOT if p is None else p

    def slink(self, v):
        return self.ix.suffix_link(v)

    def announce_pid(self, v):
        a = self.ix.announce_id(self.ix.lb(v), self.ix.rb(v))
        return -1 if a is None else a

    def chain(self, x):
        return [self.ix.marks.payload(b) for b in self.ix.marks.marked_chain(x)]


def _reference_scan(ops, text_arr, best_len, best_id):
    """Same machine as the kernels, one observable step at a time, with the
    loop-state invariants asserted. Returns (comparisons, links)."""
    n = len(text_arr)
    st = MatchState()
    ncmp = 0
    links = 0
    el = 0
    mdepth = 0
    prev_cursor = 0

    def emit(e, pid, dm):
        if dm > best_len[e]:
            best_len[e] = dm
            best_id[e] = pid

    def checkpoint(x, cursor):
        for pid, dm in ops.chain(x):
            emit(cursor - mdepth + dm - 1, pid, dm)

    def relocate(cursor):
        nonlocal el
        st.skipcount = el - st.cur_node_index
        w = ops.slink(st.cur_node)
        elw = ops.edge_len(w)
        while st.skipcount >= elw and w != ROOT:
            st.skipcount -= elw
            w = ops.parent(w)
            elw = ops.edge_len(w)
        st.cur_node = w
        st.cur_node_index = elw - st.skipcount
        st.skipcount = 0
        st.used_skip_count = st.cur_node_index < elw
        st.text_index = cursor - st.cur_node_index
        el = elw

    while True:
        cursor = st.text_index + st.cur_node_index
        assert cursor >= prev_cursor and cursor <= n
        assert 0 <= st.cur_node_index <= el
        prev_cursor = cursor
        if cursor >= n:
            break
        c = int(text_arr[cursor])
        if c < 2:
            raise _reserved_error(text_arr, cursor)
        if st.cur_node_index == el:
            ncmp += 1
            w = ops.child(st.cur_node, c, mdepth)
            if w >= 0:
                st.text_index = cursor
                st.cur_node = w
                st.cur_node_index = 1
                st.used_skip_count = False
                el = ops.edge_len(w)
                mdepth += 1
                continue
            x = st.cur_node
        else:
            ncmp += 1
            st.used_skip_count = False
            ec = ops.edge_char(st.cur_node, st.cur_node_index)
            if ec == c:
                st.cur_node_index += 1
                mdepth += 1
                continue
            if ec == DELIMITER:
                pid = ops.announce_pid(st.cur_node)
                if pid >= 0:
                    emit(cursor - 1, pid, mdepth)
            x = ops.parent(st.cur_node)
        checkpoint(x, cursor)
        if mdepth == 0:
            st.text_index = cursor + 1
            st.cur_node_index = 0
        elif mdepth == 1:
            st.cur_node = ROOT
            st.cur_node_index = 0
            st.text_index = cursor
            el = 0
            mdepth = 0
        else:
            links += 1
            relocate(cursor)
            mdepth -= 1
    cursor = n
    while mdepth > 0:
        if st.cur_node_index < el:
            if ops.edge_char(st.cur_node, st.cur_node_index) == DELIMITER:
                pid = ops.announce_pid(st.cur_node)
                if pid >= 0:
                    emit(cursor - 1, pid, mdepth)
            x = ops.parent(st.cur_node)
        else:
            x = st.cur_node
        checkpoint(x, cursor)
        if mdepth == 1:
            break
        links += 1
        relocate(cursor)
        mdepth -= 1
    return ncmp, links


# --- public API ----------------------------------------------------------------


def _as_byte_array(text):
    if isinstance(text, np.ndarray):
        return np.ascontiguousarray(text, np.uint8)
    return np.frombuffer(memoryview(text), np.uint8)


def search(index, text, emit=None, *, counters=None, engine="kernel"):
    """Scan text against a frozen index, reporting the longest pattern
    occurrence ending at each text position, in position order.

    emit is called once per occurrence; the return value is the occurrence
    count. counters, when given, receives the comparison and suffix-link
    tallies. engine selects the array kernels (default) or the pure-Python
    reference loop.
    """
    text_arr = _as_byte_array(text)
    n = len(text_arr)
    best_len = np.zeros(n, np.int32)
    best_id = np.zeros(n, np.int32)
    if engine == "reference":
        ops = _GstOps(index) if isinstance(index, GstIndex) else _CstOps(index)
        ncmp, links = _reference_scan(ops, text_arr, best_len, best_id)
    elif isinstance(index, GstIndex):
        ncmp, links, err = _scan_gst(
            text_arr, index.child_ptr, index.child_chr, index.child_id,
            index.parent, index.slink, index.edge_start, index.edge_end,
            index.concat, index.depth, index.mark_pat, index.announce_id,
            index.nma, best_len, best_id)
        if err >= 0:
            raise _reserved_error(text_arr, int(err))
    elif isinstance(index, CstIndex):
        marks = index.marks
        dbv = marks.D.bv
        ncmp, links, err = _scan_cst(
            text_arr, index.bp_pack(), index.leaves_pack(),
            index.csa.kernel_pack(), index.lcp.kernel_pack(),
            marks.M.words, marks.M.sup, marks.M.cum,
            dbv.words, dbv.sup, dbv.cum, marks.D.tminb, marks.D.ttot,
            np.int64(marks.D.ptree), np.int64(marks.D.log2p),
            np.int64(dbv.nbits), marks.pat_id, marks.pat_len,
            index.start_ranks, index.start_ids, best_len, best_id)
        if err >= 0:
            raise _reserved_error(text_arr, int(err))
    else:
        raise TypeError(f"not a searchable index: {type(index).__name__}")
    if counters is not None:
        counters.comparisons = int(ncmp)
        counters.links = int(links)
    count = 0
    for e in np.nonzero(best_len > 0)[0]:
        count += 1
        if emit is not None:
            emit(Occurrence(int(e), int(best_id[e]), int(best_len[e])))
    return count


def find_occurrences(index, text, *, counters=None, engine="kernel"):
    """search() with the occurrences collected into a list."""
    out = []
    search(index, text, out.append, counters=counters, engine=engine)
    return out
