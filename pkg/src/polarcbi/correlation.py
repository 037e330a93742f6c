"""Correlated-bit structure of polar codes under SC decoding.

The errors of SC estimates ``u_hat[j]`` for ``j`` in the support of an
information column ``i`` of ``G`` are coupled. Information positions whose
row in ``G[A, A]`` has Hamming weight above one form the correlated set; the
rest are uncorrelated.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, rng_stream
from .gf2 import as_bits, submatrix
from .polar import PolarCodeSpec, encode, sc_decode


def column_support(G, i: int) -> tuple[int, ...]:
    """1-based row indices of the nonzero entries of column ``i`` (1-based)."""
    G = as_bits(G, 2)
    if not 1 <= i <= G.shape[1]:
        raise IndexError(f"column {i} outside 1..{G.shape[1]}")
    return tuple(int(j) + 1 for j in np.flatnonzero(G[:, i - 1]))


@dataclass(frozen=True)
class CorrelationProfile:
    info_set: tuple[int, ...]
    supports: dict[int, tuple[int, ...]]
    correlated: tuple[int, ...]
    uncorrelated: tuple[int, ...]
    #: positions of ``correlated`` relative to ``info_set`` (1-based)
    correlated_relative: tuple[int, ...] = field(default=())

    @property
    def K_c(self) -> int:
        return len(self.correlated)

    @property
    def K_uc(self) -> int:
        return len(self.uncorrelated)

    @property
    def uncorrelated_relative(self) -> tuple[int, ...]:
        c = set(self.correlated_relative)
        return tuple(p for p in range(1, len(self.info_set) + 1) if p not in c)


def correlated_split(G, A) -> CorrelationProfile:
    A = tuple(int(i) for i in A)
    G_AA = submatrix(G, A, A)
    heavy = np.flatnonzero(G_AA.sum(axis=1) > 1)
    rel = tuple(int(r) + 1 for r in heavy)
    corr = tuple(A[r - 1] for r in rel)
    cset = set(corr)
    return CorrelationProfile(
        info_set=A,
        supports={i: column_support(G, i) for i in A},
        correlated=corr,
        uncorrelated=tuple(i for i in A if i not in cset),
        correlated_relative=rel,
    )


def profile_of(spec: PolarCodeSpec) -> CorrelationProfile:
    return correlated_split(spec.G, spec.info_set)


@dataclass
class CouplingReport:
    """Per-column coupling estimates.

    ``events[i]`` counts trials with ``u_hat[i]`` in error; ``coupled[i]`` those
    among them where another position of ``supp(i) & A`` is also wrong.
    ``baseline_coupled[i]`` is the same count for a random set of equal size
    drawn from the information positions outside the support.
    """

    trials: int
    columns: tuple[int, ...]
    events: dict[int, int]
    coupled: dict[int, int]
    baseline_coupled: dict[int, int]

    def coefficient(self, i: int) -> float:
        """Conditional coupling probability, NaN when there were no events."""
        e = self.events[i]
        return self.coupled[i] / e if e else float("nan")

    def baseline(self, i: int) -> float:
        e = self.events[i]
        return self.baseline_coupled[i] / e if e else float("nan")

    def merge(self, other: CouplingReport) -> CouplingReport:
        return CouplingReport(
            self.trials + other.trials,
            self.columns,
            {i: self.events[i] + other.events[i] for i in self.columns},
            {i: self.coupled[i] + other.coupled[i] for i in self.columns},
            {i: self.baseline_coupled[i] + other.baseline_coupled[i] for i in self.columns},
        )

    def to_csv(self) -> str:
        lines = ["column,events,coupled,coefficient,baseline"]
        for i in self.columns:
            lines.append(f"{i},{self.events[i]},{self.coupled[i]},"
                         f"{self.coefficient(i):.6f},{self.baseline(i):.6f}")
        return "\n".join(lines) + "\n"


def _coupling_chunk(spec, channel, columns, support_sets, others, n, seed, stream):
    rng = rng_stream(seed, stream)
    info = rng.integers(0, 2, (n, spec.K), dtype=np.uint8)
    u = np.broadcast_to(spec.u_template, (n, spec.N)).copy()
    u[:, spec.info_idx] = info
    llr = channel.transmit(encode(spec, info), rng)
    u_hat, _ = sc_decode(spec, llr)
    err = u_hat != u
    events, coupled, base = {}, {}, {}
    for i in columns:
        hit = err[:, i - 1]
        rows = err[hit]
        partners = np.asarray(support_sets[i], dtype=np.int64) - 1
        events[i] = int(hit.sum())
        coupled[i] = int(rows[:, partners].any(axis=1).sum()) if partners.size else 0
        pool = np.asarray(others[i], dtype=np.int64) - 1
        size = min(partners.size, pool.size)
        if size and rows.shape[0]:
            # one uniformly random size-subset of the pool per conditioning event
            picks = np.argsort(rng.random((rows.shape[0], pool.size)), axis=1)[:, :size]
            sampled = np.take_along_axis(rows[:, pool], picks, axis=1)
            base[i] = int(sampled.any(axis=1).sum())
        else:
            base[i] = 0
    return CouplingReport(n, tuple(columns), events, coupled, base)


def measure_coupling(spec: PolarCodeSpec, channel: ChannelParams, target_columns, trials: int,
                     seed: int = 0, chunk: int = 20000) -> CouplingReport:
    """Monte-Carlo coupling coefficients of SC decoding errors.

    For each target column ``i`` the partner set is ``supp(i) & A`` minus
    ``i`` itself. Trials are split into fixed chunks, each with its own RNG
    stream, so results depend only on ``seed`` and ``chunk``.
    """
    columns = tuple(int(i) for i in target_columns)
    if trials < 1:
        raise ValueError("trials must be positive")
    A = set(spec.info_set)
    if not set(columns) <= A:
        raise ValueError("target columns must be information positions")
    support_sets, others = {}, {}
    for i in columns:
        S = [j for j in column_support(spec.G, i) if j in A]
        support_sets[i] = [j for j in S if j != i]
        others[i] = [j for j in spec.info_set if j not in S]
    report = None
    done, stream = 0, 0
    while done < trials:
        n = min(chunk, trials - done)
        part = _coupling_chunk(spec, channel, columns, support_sets, others, n, seed, stream)
        report = part if report is None else report.merge(part)
        done += n
        stream += 1
    return report
