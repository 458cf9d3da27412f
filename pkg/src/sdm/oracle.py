"""Brute-force matching oracle.

Shares no code with the index structures: every pattern is located with
bytes.find, then the hits are reduced to the longest pattern ending at
each text position, which is exactly the engine's output contract. Used
by the test suite and by the verify command; quadratic in the worst case,
so keep inputs moderate.
"""

from __future__ import annotations


def longest_matches(patterns, text):
    """(end_pos, pattern_id, length) triples, one per end position where
    any pattern ends, keeping the longest; ascending end_pos."""
    text = bytes(text)
    best = {}
    for pid, pat in enumerate(patterns):
        pat = bytes(pat)
        m = len(pat)
        if m == 0 or m > len(text):
            continue
        at = text.find(pat)
        while at != -1:
            end = at + m - 1
            cur = best.get(end)
            if cur is None or m > cur[0]:
                best[end] = (m, pid)
            at = text.find(pat, at + 1)
    return [(end, pid, m) for end, (m, pid) in sorted(best.items())]
