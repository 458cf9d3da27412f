"""Index file format: save and load compressed suffix-tree indexes.

Layout (little-endian throughout):

    header   magic "SDMX", version u16, backend u8, csa u8, lcp u8,
             pad[3], sample_rate u32, ell u64, d u64, nsections u32, pad u32
    table    per section: name char[12], offset u64, length u64, crc32 u32,
             pad u32
    body     sections, each 8-byte aligned

Every section body is an array bundle: u32 count, u32 pad, then per array
a dtype code u8, pad[7], element count u64, raw data padded to 8 bytes.
Section payloads carry only the essential arrays; rank directories, the
range-min tree, and other derived support structures are rebuilt on load.

The pointer-based tree backend is deliberately not serializable: it exists
as the in-memory baseline, and rebuilding it from the dictionary is cheap.
"""

import struct
import zlib

import numpy as np

from .bitseq import BalancedParens, BitVector
from .cst import CstIndex
from .gst import GstIndex
from .lma import MarkedAncestorIndex
from .textindex import CompactLcp, PlainCsa, PlainLcp, SampledCsa, SuffixArray

MAGIC = b"SDMX"
VERSION = 1

_BACKEND_CST = 1
_CSA_TAGS = {"plain": 0, "sampled": 1}
_LCP_TAGS = {"plain": 0, "compact": 1}
_CSA_NAMES = {v: k for k, v in _CSA_TAGS.items()}
_LCP_NAMES = {v: k for k, v in _LCP_TAGS.items()}

_HEADER = struct.Struct("<4sHBBB3xIQQI4x")
_ENTRY = struct.Struct("<12sQQI4x")

_DTYPES = {1: "<u1", 2: "<i4", 3: "<i8", 4: "<u8"}
_DTYPE_CODES = {np.dtype(np.uint8): 1, np.dtype(np.int32): 2,
                np.dtype(np.int64): 3, np.dtype(np.uint64): 4}
_NATIVE = {1: np.uint8, 2: np.int32, 3: np.int64, 4: np.uint64}

SECTION_NAMES = ("B", "leaves", "csa", "lcp", "M", "D", "payload")


class IndexFormatError(ValueError):
    """Raised when an index file is malformed, corrupt, or unsupported."""


def _pad8(n):
    return (-n) % 8


# --- array bundles ------------------------------------------------------------


def _pack_bundle(arrays):
    parts = [struct.pack("<II", len(arrays), 0)]
    for a in arrays:
        a = np.ascontiguousarray(a)
        code = _DTYPE_CODES[a.dtype]
        raw = a.astype(_DTYPES[code]).tobytes()
        parts.append(struct.pack("<B7xQ", code, len(a)))
        parts.append(raw)
        parts.append(b"\x00" * _pad8(len(raw)))
    return b"".join(parts)


def _unpack_bundle(buf, section):
    def bad(why):
        return IndexFormatError(f"section '{section}': {why}")

    if len(buf) < 8:
        raise bad("truncated bundle header")
    count, _ = struct.unpack_from("<II", buf, 0)
    off = 8
    arrays = []
    for _ in range(count):
        if off + 16 > len(buf):
            raise bad("truncated array header")
        code, n = struct.unpack_from("<B7xQ", buf, off)
        off += 16
        if code not in _DTYPES:
            raise bad(f"unknown dtype code {code}")
        nbytes = n * np.dtype(_DTYPES[code]).itemsize
        if off + nbytes > len(buf):
            raise bad("array data runs past section end")
        a = np.frombuffer(buf, _DTYPES[code], count=n, offset=off)
        a = a.astype(_NATIVE[code])
        a.setflags(write=False)
        arrays.append(a)
        off += nbytes + _pad8(nbytes)
    return arrays


def _scalar(a, section, what):
    if len(a) != 1:
        raise IndexFormatError(f"section '{section}': bad {what} field")
    return int(a[0])


def _pack_bv(bv):
    return [np.array([bv.nbits], np.int64), bv.words]


def _unpack_bv(arrays, section):
    if len(arrays) != 2:
        raise IndexFormatError(f"section '{section}': expected 2 arrays")
    nbits = _scalar(arrays[0], section, "bit length")
    try:
        return BitVector.from_words(arrays[1], nbits)
    except ValueError as e:
        raise IndexFormatError(f"section '{section}': {e}") from None


# --- per-section encoders -----------------------------------------------------


def _csa_arrays(csa):
    if isinstance(csa, PlainCsa):
        return [csa.sa, csa.isa, csa.C]
    m = csa.marked
    return [csa.C, csa.psi_base, csa.psi_off, csa.psi_bits,
            np.array([m.nbits], np.int64), m.words, csa.sa_samp, csa.isa_samp]


def _restore_csa(profile, arrays, ell, sample_rate):
    if profile == "plain":
        if len(arrays) != 3:
            raise IndexFormatError("section 'csa': expected 3 arrays")
        sa, isa, C = arrays
        if len(sa) != ell or len(isa) != ell or len(C) != 257:
            raise IndexFormatError("section 'csa': array lengths disagree "
                                   "with header")
        return PlainCsa(SuffixArray(sa.astype(np.int32), isa.astype(np.int32)),
                        C)
    if len(arrays) != 8:
        raise IndexFormatError("section 'csa': expected 8 arrays")
    C, psi_base, psi_off, psi_bits, mk_nbits, mk_words, sa_samp, isa_samp = arrays
    csa = SampledCsa.__new__(SampledCsa)
    csa.C = C
    csa.ell = ell
    csa.sample_rate = sample_rate
    csa.psi_base = psi_base.astype(np.int32)
    csa.psi_off = psi_off
    csa.psi_bits = psi_bits
    csa.marked = BitVector.from_words(mk_words,
                                      _scalar(mk_nbits, "csa", "marked bits"))
    csa.sa_samp = sa_samp.astype(np.int32)
    csa.isa_samp = isa_samp.astype(np.int32)
    for a in (csa.psi_base, csa.sa_samp, csa.isa_samp):
        a.setflags(write=False)
    return csa


def _lcp_arrays(lcp):
    if isinstance(lcp, PlainLcp):
        return [lcp.arr]
    return [lcp.small, lcp.esc_pos, lcp.esc_val]


def _restore_lcp(profile, arrays, ell):
    if profile == "plain":
        if len(arrays) != 1:
            raise IndexFormatError("section 'lcp': expected 1 array")
        return PlainLcp(arrays[0].astype(np.int32))
    if len(arrays) != 3:
        raise IndexFormatError("section 'lcp': expected 3 arrays")
    small, esc_pos, esc_val = arrays
    if len(small) != ell:
        raise IndexFormatError("section 'lcp': length disagrees with header")
    lcp = CompactLcp.__new__(CompactLcp)
    lcp.small = small
    lcp.esc_pos = esc_pos
    lcp.esc_val = esc_val.astype(np.int32)
    lcp.esc_val.setflags(write=False)
    lcp.n = ell
    return lcp


def _restore_marks(bp, m_bv, d_bv, pat_id, pat_len):
    marks = MarkedAncestorIndex.__new__(MarkedAncestorIndex)
    marks.bp = bp
    marks.M = m_bv
    marks.D = BalancedParens(d_bv)
    marks.pat_id = pat_id.astype(np.int32)
    marks.pat_len = pat_len
    marks.nmarked = len(pat_id)
    marks.pat_id.setflags(write=False)
    if marks.D.bv.nbits != marks.nmarked * 2 or marks.M.popcount() != marks.D.bv.nbits:
        raise IndexFormatError("sections 'M', 'D', 'payload' disagree on "
                               "marked node count")
    return marks


# --- public api ---------------------------------------------------------------


def dumps(index):
    """Serialize a compressed index to bytes."""
    if isinstance(index, GstIndex):
        raise TypeError("the pointer-based tree backend is not serializable; "
                        "rebuild it from the dictionary instead")
    if not isinstance(index, CstIndex):
        raise TypeError(f"cannot serialize {type(index).__name__}")

    marks = index.marks
    bodies = {
        "B": _pack_bundle(_pack_bv(index.bp.bv)),
        "leaves": _pack_bundle(_pack_bv(index.leaves)),
        "csa": _pack_bundle(_csa_arrays(index.csa)),
        "lcp": _pack_bundle(_lcp_arrays(index.lcp)),
        "M": _pack_bundle(_pack_bv(marks.M)),
        "D": _pack_bundle(_pack_bv(marks.D.bv)),
        "payload": _pack_bundle([marks.pat_id, marks.pat_len,
                                 index.start_ranks, index.start_ids]),
    }

    offset = _HEADER.size + len(SECTION_NAMES) * _ENTRY.size
    table = []
    chunks = []
    for name in SECTION_NAMES:
        body = bodies[name]
        table.append(_ENTRY.pack(name.encode("ascii"), offset, len(body),
                                 zlib.crc32(body)))
        chunks.append(body)
        pad = _pad8(len(body))
        chunks.append(b"\x00" * pad)
        offset += len(body) + pad

    header = _HEADER.pack(MAGIC, VERSION, _BACKEND_CST,
                          _CSA_TAGS[index.csa_profile],
                          _LCP_TAGS[index.lcp_profile],
                          index.csa.sample_rate, index.ell, index.d,
                          len(SECTION_NAMES))
    return b"".join([header, *table, *chunks])


def loads(buf):
    """Deserialize bytes produced by dumps back into a searchable index."""
    buf = bytes(buf)
    if len(buf) < _HEADER.size:
        raise IndexFormatError("file too short to hold a header")
    magic, version, backend, csa_tag, lcp_tag, sample_rate, ell, d, nsec = \
        _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}; not an index file")
    if version != VERSION:
        raise IndexFormatError(f"unsupported index format version {version} "
                               f"(expected {VERSION})")
    if backend != _BACKEND_CST:
        raise IndexFormatError(f"unknown backend tag {backend}")
    if csa_tag not in _CSA_NAMES or lcp_tag not in _LCP_NAMES:
        raise IndexFormatError(f"unknown profile tags ({csa_tag}, {lcp_tag})")

    sections = {}
    for i in range(nsec):
        at = _HEADER.size + i * _ENTRY.size
        if at + _ENTRY.size > len(buf):
            raise IndexFormatError("section table runs past end of file")
        raw_name, offset, length, crc = _ENTRY.unpack_from(buf, at)
        name = raw_name.rstrip(b"\x00").decode("ascii")
        if offset + length > len(buf):
            raise IndexFormatError(f"section '{name}' runs past end of file")
        body = buf[offset:offset + length]
        if zlib.crc32(body) != crc:
            raise IndexFormatError(f"checksum mismatch in section '{name}'")
        sections[name] = body

    missing = [n for n in SECTION_NAMES if n not in sections]
    if missing:
        raise IndexFormatError(f"missing sections: {', '.join(missing)}")

    def bundle(name):
        return _unpack_bundle(sections[name], name)

    bp = BalancedParens(_unpack_bv(bundle("B"), "B"))
    leaves = _unpack_bv(bundle("leaves"), "leaves")
    csa_profile = _CSA_NAMES[csa_tag]
    lcp_profile = _LCP_NAMES[lcp_tag]
    csa = _restore_csa(csa_profile, bundle("csa"), ell, sample_rate)
    lcp = _restore_lcp(lcp_profile, bundle("lcp"), ell)

    payload = bundle("payload")
    if len(payload) != 4:
        raise IndexFormatError("section 'payload': expected 4 arrays")
    pat_id, pat_len, start_ranks, start_ids = payload
    if len(start_ranks) != d or len(start_ids) != d:
        raise IndexFormatError("section 'payload': pattern count disagrees "
                               "with header")
    marks = _restore_marks(bp, _unpack_bv(bundle("M"), "M"),
                           _unpack_bv(bundle("D"), "D"), pat_id, pat_len)

    return CstIndex(bp, leaves, csa, lcp, marks, start_ranks,
                    start_ids.astype(np.int32), ell, d,
                    csa_profile, lcp_profile)


def save_index(index, path):
    """Write the index to path; returns the number of bytes written."""
    blob = dumps(index)
    with open(path, "wb") as fh:
        fh.write(blob)
    return len(blob)


def load_index(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
