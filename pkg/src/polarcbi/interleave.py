"""LDPC-to-polar bit routing: direct packing, blind (transpose) and
correlation-breaking interleaving.

A map routes every bit of a frame of LDPC codewords to one information
position of one polar block. Coordinates in the public tables are 1-based;
internally a map stores flat 0-based indices so that applying and inverting
it is a single fancy-indexing operation.

CBI layout
----------
With ``K_n = K_c + 1`` LDPC blocks per frame, a round of ``K_n`` polar blocks
consumes ``K`` bits of every LDPC block. In round ``j`` (offset
``o = (j - 1) K``) LDPC block ``b`` spends

* bits ``o+1 .. o+b-1`` on correlated slot ``b - 1`` of polar blocks ``1 .. b-1``,
* bits ``o+b .. o+b+K_uc-1`` as the uncorrelated run of polar block ``b``,
* bits ``o+b+K_uc .. o+K`` on correlated slot ``b`` of polar blocks ``b+1 .. K_n``.

Polar block ``i`` therefore takes each correlated slot from a different LDPC
block, none of them its own run source. The trailing ``N_l mod K`` bits of
every LDPC block use the same pattern cut off after bit ``o + mo``; polar
positions left empty are padding.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class InterleaverMap:
    scheme: str
    n_l: int
    K: int
    ldpc_blocks: int
    polar_blocks: int
    #: flat polar index (block * K + pos) of flat LDPC index (block * n_l + bit)
    forward: np.ndarray
    #: flat polar indices carrying filler
    padding: np.ndarray
    average_delay: int

    def __post_init__(self):
        self.forward.setflags(write=False)
        self.padding.setflags(write=False)

    @property
    def span(self) -> int:
        """Largest number of polar blocks any single LDPC block is spread over."""
        src = (np.arange(self.forward.size) // self.n_l)
        dst = self.forward // self.K
        return max(np.unique(dst[src == b]).size for b in range(self.ldpc_blocks))

    def entries(self):
        """Yield ``(ldpc_block, ldpc_bit, polar_block, polar_pos)``, all 1-based."""
        for flat, tgt in enumerate(self.forward):
            b, bit = divmod(flat, self.n_l)
            p, pos = divmod(int(tgt), self.K)
            yield b + 1, bit + 1, p + 1, pos + 1

    def padding_entries(self):
        for tgt in self.padding:
            p, pos = divmod(int(tgt), self.K)
            yield p + 1, pos + 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# scheme={self.scheme} n_l={self.n_l} K={self.K} "
                  f"ldpc_blocks={self.ldpc_blocks} polar_blocks={self.polar_blocks} "
                  f"average_delay={self.average_delay}\n")
        buf.write("ldpc_block,ldpc_bit,polar_block,polar_pos\n")
        for row in self.entries():
            buf.write(",".join(map(str, row)) + "\n")
        buf.write("# padding\n")
        buf.write("polar_block,polar_pos\n")
        for row in self.padding_entries():
            buf.write(",".join(map(str, row)) + "\n")
        return buf.getvalue()


def _finish(scheme, n_l, K, L, P, forward, delay) -> InterleaverMap:
    forward = np.asarray(forward, dtype=np.int64)
    if forward.size != L * n_l or np.unique(forward).size != forward.size:
        raise AssertionError("interleaver routing is not injective")
    if forward.size and (forward.min() < 0 or forward.max() >= P * K):
        raise AssertionError("interleaver routing leaves the frame")
    used = np.zeros(P * K, dtype=bool)
    used[forward] = True
    return InterleaverMap(scheme, n_l, K, L, P, forward, np.flatnonzero(~used), delay)


def _check(n_l: int, K: int):
    if n_l < 1 or K < 1:
        raise ValueError("N_l and K must be positive")


def build_bi_map(n_l: int, K: int) -> InterleaverMap:
    """Bit ``i`` of LDPC block ``b`` goes to polar block ``i``, position ``b``."""
    _check(n_l, K)
    b, i = np.divmod(np.arange(K * n_l), n_l)
    return _finish("bi", n_l, K, K, n_l, i * K + b, n_l)


def build_direct_map(n_l: int, K: int) -> InterleaverMap:
    """Concatenate ``K`` LDPC blocks and cut the stream into K-bit chunks."""
    _check(n_l, K)
    P = math.ceil(K * n_l / K)
    return _finish("direct", n_l, K, K, P, np.arange(K * n_l), math.ceil(P / K))


def build_cbi_map(n_l: int, K: int, correlated_positions) -> InterleaverMap:
    """Correlation-breaking interleaver.

    ``correlated_positions`` are the 1-based positions, within the K-bit polar
    information vector, of the correlated information bits; the remaining
    positions (in increasing order) take the uncorrelated runs.
    """
    _check(n_l, K)
    corr = [int(p) - 1 for p in correlated_positions]
    if len(set(corr)) != len(corr) or any(not 0 <= p < K for p in corr):
        raise ValueError("correlated positions must be distinct and lie in 1..K")
    K_c = len(corr)
    if K_c >= K:
        raise ValueError(f"need K_c < K, got K_c={K_c}, K={K}")
    cset = set(corr)
    uncorr = [p for p in range(K) if p not in cset]
    K_uc = K - K_c
    K_n = K_c + 1
    n_d, mo = divmod(n_l, K)
    # a partial round never needs more polar blocks than LDPC blocks
    tail = min(mo, K_n)
    P = n_d * K_n + tail

    forward = np.empty(K_n * n_l, dtype=np.int64)
    for b in range(1, K_n + 1):
        for t0 in range(n_l):
            j, t = divmod(t0, K)
            t += 1
            if t < b:
                i, slot = t, corr[b - 2]
            elif t < b + K_uc:
                i, slot = b, uncorr[t - b]
            else:
                i, slot = t - K_uc + 1, corr[b - 1]
            forward[(b - 1) * n_l + t0] = (j * K_n + i - 1) * K + slot
    return _finish("cbi", n_l, K, K_n, P, forward, math.ceil(P / K_n))


def apply_map(imap: InterleaverMap, ldpc_codewords, pad_value: int = 0) -> np.ndarray:
    """Route a frame ``(..., ldpc_blocks, n_l)`` to ``(..., polar_blocks, K)``."""
    c = np.asarray(ldpc_codewords)
    if c.shape[-2:] != (imap.ldpc_blocks, imap.n_l):
        raise ValueError(f"expected frame shape (..., {imap.ldpc_blocks}, {imap.n_l}), "
                         f"got {c.shape}")
    lead = c.shape[:-2]
    out = np.full(lead + (imap.polar_blocks * imap.K,), pad_value, dtype=c.dtype)
    out[..., imap.forward] = c.reshape(lead + (-1,))
    return out.reshape(lead + (imap.polar_blocks, imap.K))


def invert_map(imap: InterleaverMap, polar_info) -> np.ndarray:
    """Collect ``(..., polar_blocks, K)`` back into ``(..., ldpc_blocks, n_l)``."""
    v = np.asarray(polar_info)
    if v.shape[-2:] != (imap.polar_blocks, imap.K):
        raise ValueError(f"expected shape (..., {imap.polar_blocks}, {imap.K}), got {v.shape}")
    lead = v.shape[:-2]
    flat = v.reshape(lead + (-1,))
    return flat[..., imap.forward].reshape(lead + (imap.ldpc_blocks, imap.n_l))
