"""Pointer-based generalized suffix tree over the pattern set.

Built online by Ukkonen's algorithm, one run per pattern (active point reset
at each pattern boundary), over global offsets into the shared concatenation.
A pattern whose suffixes are all suffixes of earlier patterns adds no nodes;
the tree indexes exactly the distinct pattern suffixes, each ending with the
delimiter, so the delimiter only ever appears as the final byte of a leaf
edge.

After construction the tree is frozen into flat arrays:

* children in CSR form, sorted by first edge byte per node;
* suffix links for every node: internal links from Ukkonen's pending-link
  bookkeeping, leaf links chained in suffix order per construction run
  (leaves created in one run are the suffixes 0..K of that pattern, in
  order; leaf K links to the pre-existing leaf of suffix K+1, or to the
  root when its label is just the delimiter);
* per-pattern annotations found by re-descending each pattern: the locus
  node (exactly at pattern depth) gets a mark, and the leaf whose label is
  pattern-plus-delimiter gets the announce id and the first-suffix flag;
* one DFS fills string depth, node depth, and the nearest marked
  ancestor-or-self pointer used for checkpoint chains.

This backend keeps the original text around (it is the space baseline and
is never serialized).
"""

from __future__ import annotations

import numpy as np

from ._dispatch import maybe_njit, new_child_map
from .textindex import DELIMITER, ConcatDictionary

ROOT = 0


@maybe_njit
def _build_gst(concat, starts, boundaries, cmap, parent, slink, edge_start,
               edge_end, leaf_order):
    nnodes = 1
    parent[ROOT] = -1
    slink[ROOT] = ROOT
    edge_start[ROOT] = 0
    edge_end[ROOT] = 0
    for pid in range(len(starts)):
        run_start = starts[pid]
        run_end = boundaries[pid] + 1  # one past this pattern's delimiter
        anode = ROOT
        aedge = np.int64(0)
        alen = np.int64(0)
        remainder = 0
        nleaves = 0
        for gp in range(run_start, run_end):
            c = concat[gp]
            remainder += 1
            pending = -1
            while remainder > 0:
                if alen == 0:
                    aedge = gp
                key = np.int64(anode) * 256 + np.int64(concat[aedge])
                if key not in cmap:
                    leaf = nnodes
                    nnodes += 1
                    parent[leaf] = anode
                    edge_start[leaf] = gp
                    edge_end[leaf] = -1
                    slink[leaf] = -1
                    cmap[key] = leaf
                    leaf_order[nleaves] = leaf
                    nleaves += 1
                    if pending != -1:
                        slink[pending] = anode
                        pending = -1
                else:
                    child = np.int64(cmap[key])
                    ee = edge_end[child]
                    if ee < 0:
                        ee = gp + 1
                    el = ee - edge_start[child]
                    if alen >= el:
                        anode = child
                        aedge += el
                        alen -= el
                        continue
                    if concat[edge_start[child] + alen] == c:
                        alen += 1
                        if pending != -1:
                            slink[pending] = anode
                            pending = -1
                        break
                    split = nnodes
                    nnodes += 1
                    parent[split] = anode
                    edge_start[split] = edge_start[child]
                    edge_end[split] = edge_start[child] + alen
                    slink[split] = -1
                    cmap[key] = split
                    edge_start[child] += alen
                    parent[child] = split
                    cmap[np.int64(split) * 256 + np.int64(concat[edge_start[child]])] = child
                    leaf = nnodes
                    nnodes += 1
                    parent[leaf] = split
                    edge_start[leaf] = gp
                    edge_end[leaf] = -1
                    slink[leaf] = -1
                    cmap[np.int64(split) * 256 + np.int64(c)] = leaf
                    leaf_order[nleaves] = leaf
                    nleaves += 1
                    if pending != -1:
                        slink[pending] = split
                    pending = split
                remainder -= 1
                if anode == ROOT and alen > 0:
                    alen -= 1
                    aedge = gp - remainder + 1
                elif anode != ROOT:
                    anode = slink[anode]
        for t in range(nleaves):
            edge_end[leaf_order[t]] = run_end
        for t in range(nleaves - 1):
            slink[leaf_order[t]] = leaf_order[t + 1]
        if nleaves > 0:
            # Leaves of this run are the pattern's suffixes 0..nleaves-1 in
            # order; the next suffix already exists, find its leaf by a
            # skip-count descent (or it is empty and links to the root).
            last = leaf_order[nleaves - 1]
            pos = run_start + nleaves
            if pos >= run_end:
                slink[last] = ROOT
            else:
                v = np.int64(ROOT)
                while pos < run_end:
                    v = np.int64(cmap[v * 256 + np.int64(concat[pos])])
                    pos += edge_end[v] - edge_start[v]
                slink[last] = v
    return nnodes


@maybe_njit
def _dump_children(cmap, keys, vals):
    i = 0
    for k, v in cmap.items():
        keys[i] = k
        vals[i] = v
        i += 1


@maybe_njit
def _gst_child(child_ptr, child_chr, child_id, v, c):
    lo = child_ptr[v]
    hi = child_ptr[v + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        b = child_chr[mid]
        if b == c:
            return np.int64(child_id[mid])
        if b < c:
            lo = mid + 1
        else:
            hi = mid
    return np.int64(-1)


@maybe_njit
def _annotate_patterns(child_ptr, child_chr, child_id, edge_start, edge_end,
                       concat, starts, boundaries, mark_pat, announce_id,
                       first_leaf):
    for pid in range(len(starts)):
        pos = starts[pid]
        plen = boundaries[pid] - starts[pid]
        left = plen
        v = np.int64(ROOT)
        k = np.int64(0)
        while left > 0:
            v = _gst_child(child_ptr, child_chr, child_id, v, concat[pos + plen - left])
            el = edge_end[v] - edge_start[v]
            if left >= el:
                left -= el
                k = el
            else:
                k = left
                left = 0
        if k == edge_end[v] - edge_start[v] or v == ROOT:
            mark_pat[v] = pid
            leaf = _gst_child(child_ptr, child_chr, child_id, v, DELIMITER)
            announce_id[leaf] = pid
            first_leaf[leaf] = 1
        else:
            # Mid-edge locus: the edge must continue with the delimiter,
            # making v the leaf for this exact pattern.
            announce_id[v] = pid
            first_leaf[v] = 1


@maybe_njit
def _dfs_depth_nma(child_ptr, child_id, edge_start, edge_end, mark_pat,
                   depth, node_depth, nma, stack):
    depth[ROOT] = 0
    node_depth[ROOT] = 0
    nma[ROOT] = -1
    top = 0
    stack[top] = ROOT
    while top >= 0:
        v = stack[top]
        top -= 1
        for e in range(child_ptr[v], child_ptr[v + 1]):
            c = child_id[e]
            depth[c] = depth[v] + (edge_end[c] - edge_start[c])
            node_depth[c] = node_depth[v] + 1
            nma[c] = c if mark_pat[c] >= 0 else nma[v]
            top += 1
            stack[top] = c


class GstIndex:
    """Frozen suffix tree: CSR children plus per-node annotation arrays."""

    __slots__ = ("dictionary", "concat", "nnodes", "parent", "slink",
                 "edge_start", "edge_end", "depth", "node_depth", "nma",
                 "mark_pat", "announce_id", "first_leaf", "child_ptr",
                 "child_chr", "child_id")

    def __init__(self, dictionary: ConcatDictionary):
        self.dictionary = dictionary
        self.concat = dictionary.concat
        cap = 2 * dictionary.ell + 2
        parent = np.full(cap, -1, np.int32)
        slink = np.full(cap, -1, np.int32)
        edge_start = np.zeros(cap, np.int64)
        edge_end = np.zeros(cap, np.int64)
        leaf_order = np.zeros(dictionary.ell + 2, np.int32)
        cmap = new_child_map()
        n = int(_build_gst(dictionary.concat, dictionary.starts,
                           dictionary.boundaries, cmap, parent, slink,
                           edge_start, edge_end, leaf_order))
        self.nnodes = n
        self.parent = parent[:n].copy()
        self.slink = slink[:n].copy()
        self.edge_start = edge_start[:n].copy()
        self.edge_end = edge_end[:n].copy()

        nedges = len(cmap)
        keys = np.empty(nedges, np.int64)
        vals = np.empty(nedges, np.int64)
        _dump_children(cmap, keys, vals)
        order = np.argsort(keys)
        keys = keys[order]
        self.child_chr = (keys & 255).astype(np.uint8)
        self.child_id = vals[order].astype(np.int32)
        counts = np.bincount((keys >> 8).astype(np.int64), minlength=n)
        self.child_ptr = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=self.child_ptr[1:])

        self.mark_pat = np.full(n, -1, np.int32)
        self.announce_id = np.full(n, -1, np.int32)
        self.first_leaf = np.zeros(n, np.uint8)
        _annotate_patterns(self.child_ptr, self.child_chr, self.child_id,
                           self.edge_start, self.edge_end, self.concat,
                           dictionary.starts, dictionary.boundaries,
                           self.mark_pat, self.announce_id, self.first_leaf)

        self.depth = np.zeros(n, np.int64)
        self.node_depth = np.zeros(n, np.int32)
        self.nma = np.full(n, -1, np.int32)
        _dfs_depth_nma(self.child_ptr, self.child_id, self.edge_start,
                       self.edge_end, self.mark_pat, self.depth,
                       self.node_depth, self.nma, np.zeros(n + 1, np.int32))
        for a in (self.parent, self.slink, self.edge_start, self.edge_end,
                  self.depth, self.node_depth, self.nma, self.mark_pat,
                  self.announce_id, self.first_leaf, self.child_ptr,
                  self.child_chr, self.child_id):
            a.setflags(write=False)

    @classmethod
    def build(cls, dictionary):
        return cls(dictionary)

    # --- navigation -------------------------------------------------------

    def child(self, v, c):
        w = int(_gst_child(self.child_ptr, self.child_chr, self.child_id, v, c))
        return None if w < 0 else w

    def children(self, v):
        return [int(c) for c in self.child_id[self.child_ptr[v]:self.child_ptr[v + 1]]]

    def suffix_link(self, v):
        return int(self.slink[v])

    def is_leaf(self, v):
        return self.child_ptr[v] == self.child_ptr[v + 1]

    def edge_len(self, v):
        return int(self.edge_end[v] - self.edge_start[v])

    def edge_char(self, v, k):
        return int(self.concat[self.edge_start[v] + k])

    def edge_ref(self, v):
        """Edge label as (pattern id, offset within that pattern, length)."""
        gs = int(self.edge_start[v])
        pid = self.dictionary.pattern_id(gs)
        return pid, gs - int(self.dictionary.starts[pid]), self.edge_len(v)

    def label(self, v):
        """Root path label, delimiters included (test helper, O(depth))."""
        parts = []
        while v != ROOT:
            parts.append(self.concat[self.edge_start[v]:self.edge_end[v]].tobytes())
            v = int(self.parent[v])
        return b"".join(reversed(parts))

    def mark(self, v):
        m = int(self.nma[v])
        return None if m < 0 else m

    def descend(self, s):
        """Locus of byte string s as (node, chars matched on its edge),
        or None when s is not in the tree. Root is (0, 0)."""
        v, k = ROOT, 0
        for c in s:
            if k == self.edge_len(v):
                w = self.child(v, c)
                if w is None:
                    return None
                v, k = w, 0
            if self.edge_char(v, k) != c:
                return None
            k += 1
        return v, k

    # --- stats ------------------------------------------------------------

    def leaf_count(self):
        return int(np.sum(self.child_ptr[1:] == self.child_ptr[:-1]))

    def marked_count(self):
        return int(np.sum(self.mark_pat >= 0))

    def memory_bytes(self):
        arrays = (self.parent, self.slink, self.edge_start, self.edge_end,
                  self.depth, self.node_depth, self.nma, self.mark_pat,
                  self.announce_id, self.first_leaf, self.child_ptr,
                  self.child_chr, self.child_id)
        return sum(a.nbytes for a in arrays) + self.concat.nbytes
