"""The (155, 64, 20) quasi-cyclic Tanner LDPC code.

Parity-check construction from 31x31 circulants, systematic-style encoding
through a precomputed row reduction, sum-product decoding, and alist I/O.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .gf2 import as_bits, row_reduce

CIRCULANT = 31
#: Message magnitude clamp for the check-node update.
MSG_CAP = 30.0


def tanner_shift(i: int, j: int, p: int = CIRCULANT) -> int:
    """Circulant offset ``5^i 2^j mod p`` of block (i, j), both 0-based."""
    return (pow(5, i, p) * pow(2, j, p)) % p


def circulant(shift: int, p: int = CIRCULANT) -> np.ndarray:
    """Identity with row ``r`` moved to column ``(r + shift) mod p``."""
    return np.roll(np.eye(p, dtype=np.uint8), shift % p, axis=1)


def tanner_h(rows: int = 3, cols: int = 5, p: int = CIRCULANT) -> np.ndarray:
    return np.block([[circulant(tanner_shift(i, j, p), p) for j in range(cols)]
                     for i in range(rows)])


@dataclass(frozen=True, eq=False)
class LdpcCodeSpec:
    """A binary LDPC code given by its parity-check matrix.

    ``info_positions`` are the non-pivot columns of the reduced H (0-based);
    the encoder writes data there and solves for the pivot columns.
    """

    H: np.ndarray

    def __post_init__(self):
        H = as_bits(self.H, 2).copy()
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @cached_property
    def _reduced(self):
        return row_reduce(self.H)

    @property
    def rank(self) -> int:
        return self._reduced.rank

    @property
    def k(self) -> int:
        return self.n - self.rank

    @cached_property
    def parity_positions(self) -> np.ndarray:
        return np.asarray(self._reduced.pivots, dtype=np.int64)

    @cached_property
    def info_positions(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n), self.parity_positions)

    @cached_property
    def solve_data(self) -> np.ndarray:
        """Rows of reduced H restricted to info columns: parity = solve_data @ info."""
        R = self._reduced.matrix[: self.rank]
        return R[:, self.info_positions]

    @cached_property
    def _edges(self):
        chk, var = np.nonzero(self.H)  # edges sorted by check
        chk_starts = np.flatnonzero(np.r_[True, chk[1:] != chk[:-1]])
        by_var = np.argsort(var, kind="stable")
        var_sorted = var[by_var]
        var_starts = np.flatnonzero(np.r_[True, var_sorted[1:] != var_sorted[:-1]])
        return _Edges(chk, var, chk_starts, by_var, var_starts, var_sorted[var_starts])


@dataclass(frozen=True)
class _Edges:
    chk: np.ndarray
    var: np.ndarray
    chk_starts: np.ndarray
    by_var: np.ndarray
    var_starts: np.ndarray
    var_ids: np.ndarray

    def var_sums(self, msgs: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros((msgs.shape[0], n))
        if self.var.size:
            out[:, self.var_ids] = np.add.reduceat(msgs[:, self.by_var], self.var_starts, axis=1)
        return out

    def check_totals(self, vals: np.ndarray) -> np.ndarray:
        """Per-edge totals of ``vals`` over the edge's check."""
        sums = np.add.reduceat(vals, self.chk_starts, axis=1)
        return np.repeat(sums, np.diff(np.r_[self.chk_starts, self.chk.size]), axis=1)


def build_tanner_h() -> LdpcCodeSpec:
    return LdpcCodeSpec(tanner_h())


def ldpc_encode(spec: LdpcCodeSpec, info) -> np.ndarray:
    """Place ``info`` on the info positions and fill in the parity positions.

    Accepts a single length-k vector or a batch of rows.
    """
    info = as_bits(info)
    if info.shape[-1] != spec.k:
        raise ValueError(f"info must have length {spec.k}, got {info.shape[-1]}")
    c = np.zeros(info.shape[:-1] + (spec.n,), dtype=np.uint8)
    c[..., spec.info_positions] = info
    parity = (info.astype(np.int64) @ spec.solve_data.T.astype(np.int64)) & 1
    c[..., spec.parity_positions] = parity
    return c


def syndrome(spec: LdpcCodeSpec, c) -> np.ndarray:
    c = as_bits(c)
    return ((c.astype(np.int64) @ spec.H.T.astype(np.int64)) & 1).astype(np.uint8)


def _phi(x: np.ndarray) -> np.ndarray:
    """``-log tanh(x/2)``, its own inverse on (0, inf)."""
    x = np.clip(x, 1e-12, MSG_CAP)
    return -np.log(np.tanh(x / 2))


@dataclass
class BpResult:
    codeword: np.ndarray
    info: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def bp_decode(spec: LdpcCodeSpec, llr, max_iters: int = 50) -> BpResult:
    """Flooding sum-product decoding in the LLR domain.

    The check update is the tanh product rule written as
    ``sign * phi(sum phi(|m|))`` with magnitudes clamped to ``MSG_CAP``.
    Decoding of a word stops once its hard decision satisfies every check and
    no posterior LLR is exactly zero; ``converged`` reports that condition.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    L = np.asarray(llr, dtype=float)
    if L.shape[-1] != spec.n:
        raise ValueError(f"llr must have length {spec.n}, got {L.shape[-1]}")
    single = L.ndim == 1
    L = np.atleast_2d(L)
    B = L.shape[0]
    edges = spec._edges
    H_T = spec.H.T.astype(np.float32)

    def satisfied(hard, post):
        # float32 sums of at most a few hundred ones are exact
        checks = (hard.astype(np.float32) @ H_T).astype(np.int64) & 1
        return ~checks.any(axis=1) & (post != 0).all(axis=1)

    out = (L < 0).astype(np.uint8)
    done = satisfied(out, L)
    iters = np.zeros(B, dtype=np.int64)
    active = np.flatnonzero(~done)
    c2v = np.zeros((active.size, edges.chk.size))
    for it in range(1, max_iters + 1):
        if active.size == 0:
            break
        La = L[active]
        v2c = (La + edges.var_sums(c2v, spec.n))[:, edges.var] - c2v
        mag = _phi(np.abs(v2c))
        neg = (v2c < 0).astype(np.int64)
        sign = 1 - 2 * ((edges.check_totals(neg) - neg) & 1)
        c2v = sign * _phi(edges.check_totals(mag) - mag)
        # an exactly-zero input carries no information; the clamp in _phi would
        # otherwise turn it into a tiny positive message
        zero = (v2c == 0).astype(np.int64)
        c2v[(edges.check_totals(zero) - zero) > 0] = 0.0
        post = La + edges.var_sums(c2v, spec.n)
        hard = (post < 0).astype(np.uint8)
        ok = satisfied(hard, post)
        out[active] = hard
        iters[active] = it
        done[active] = ok
        active, c2v = active[~ok], c2v[~ok]
    res = BpResult(out, out[:, spec.info_positions], done, iters)
    if single:
        res = BpResult(res.codeword[0], res.info[0], bool(res.converged[0]), int(res.iterations[0]))
    return res


def write_alist(H, path) -> None:
    """Write H in MacKay's alist format."""
    H = as_bits(H, 2)
    m, n = H.shape
    col_w = H.sum(axis=0)
    row_w = H.sum(axis=1)
    lines = [f"{n} {m}", f"{col_w.max()} {row_w.max()}",
             " ".join(map(str, col_w)), " ".join(map(str, row_w))]
    for j in range(n):
        rows = list(np.flatnonzero(H[:, j]) + 1)
        lines.append(" ".join(map(str, rows + [0] * (col_w.max() - len(rows)))))
    for i in range(m):
        cols = list(np.flatnonzero(H[i]) + 1)
        lines.append(" ".join(map(str, cols + [0] * (row_w.max() - len(cols)))))
    Path(path).write_text("\n".join(lines) + "\n")


def read_alist(path) -> np.ndarray:
    tokens = [[int(t) for t in line.split()] for line in Path(path).read_text().splitlines()
              if line.strip()]
    n, m = tokens[0]
    col_w = tokens[2]
    H = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        for r in tokens[4 + j][: col_w[j]]:
            if r:
                H[r - 1, j] = 1
    # cross-check against the row lists
    row_w = tokens[3]
    for i in range(m):
        cols = [c for c in tokens[4 + n + i][: row_w[i]] if c]
        if sorted(c - 1 for c in cols) != list(np.flatnonzero(H[i])):
            raise ValueError(f"alist row {i + 1} disagrees with the column lists")
    return H
