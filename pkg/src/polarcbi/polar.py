"""Polar codes with generator ``G = F^{(x)n}`` (no bit-reversal permutation).

Construction (BEC Bhattacharyya recursion, AWGN Gaussian approximation),
non-systematic and systematic encoding, and successive-cancellation decoding.

LLR convention: positive favours bit 0, an erasure is exactly 0, and a
decision LLR of exactly 0 decides bit 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .gf2 import as_bits, gf2_invert, mat_vec_mul, polar_kernel, submatrix

#: Saturation of LLR magnitudes inside the decoder (natural-log units).
LLR_CAP = 40.0

#: Eb/N0 (dB) used by :func:`construct_awgn` when no design point is given.
DEFAULT_DESIGN_SNR_DB = 0.0


def _log2_exact(N: int) -> int:
    n = N.bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise ValueError(f"N must be a power of two, got {N}")
    return n


@dataclass(frozen=True)
class PolarCodeSpec:
    """A polar code: block length, 1-based information set and frozen bit values.

    ``frozen_values`` lists the bits of the frozen positions in increasing
    index order. Construction rejects information sets whose induced
    ``G[frozen, info]`` block is nonzero, since systematic encoding and the
    correlated-bit analysis rely on it vanishing.
    """

    N: int
    info_set: tuple[int, ...]
    frozen_values: tuple[int, ...] = ()

    def __post_init__(self):
        _log2_exact(self.N)
        A = tuple(int(i) for i in self.info_set)
        if list(A) != sorted(set(A)):
            raise ValueError("information set must be sorted and duplicate free")
        if A and (A[0] < 1 or A[-1] > self.N):
            raise ValueError(f"information indices must lie in 1..{self.N}")
        if not A:
            raise ValueError("information set must be non-empty")
        object.__setattr__(self, "info_set", A)
        n_frozen = self.N - len(A)
        fv = tuple(int(b) for b in self.frozen_values) or (0,) * n_frozen
        if len(fv) != n_frozen or any(b not in (0, 1) for b in fv):
            raise ValueError(f"frozen_values must be {n_frozen} bits")
        object.__setattr__(self, "frozen_values", fv)
        if n_frozen and submatrix(self.G, self.frozen_set, A).any():
            raise ValueError("G restricted to (frozen rows, info columns) is not all-zero")

    @property
    def n(self) -> int:
        return _log2_exact(self.N)

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @cached_property
    def frozen_set(self) -> tuple[int, ...]:
        info = set(self.info_set)
        return tuple(i for i in range(1, self.N + 1) if i not in info)

    @cached_property
    def G(self) -> np.ndarray:
        return polar_kernel(self.N)

    @cached_property
    def info_idx(self) -> np.ndarray:
        return np.asarray(self.info_set, dtype=np.int64) - 1

    @cached_property
    def frozen_idx(self) -> np.ndarray:
        return np.asarray(self.frozen_set, dtype=np.int64) - 1

    @cached_property
    def u_template(self) -> np.ndarray:
        """Source vector with frozen values filled in and zeros at info positions."""
        u = np.zeros(self.N, dtype=np.uint8)
        u[self.frozen_idx] = self.frozen_values
        return u

    @cached_property
    def _info_prefix(self) -> np.ndarray:
        mask = np.zeros(self.N + 1, dtype=np.int64)
        mask[self.info_idx + 1] = 1
        return np.cumsum(mask)

    def _all_frozen(self, lo: int, size: int) -> bool:
        return self._info_prefix[lo + size] == self._info_prefix[lo]

    @cached_property
    def G_AA_inv(self) -> np.ndarray:
        return gf2_invert(submatrix(self.G, self.info_set, self.info_set))

    @cached_property
    def frozen_offset_A(self) -> np.ndarray:
        """``u_frozen G[frozen, A]``; zero whenever the code passed validation."""
        if not self.frozen_set:
            return np.zeros(self.K, dtype=np.uint8)
        return mat_vec_mul(np.asarray(self.frozen_values, dtype=np.uint8),
                           submatrix(self.G, self.frozen_set, self.info_set))


def _rank_indices(scores: np.ndarray, K: int, larger_is_better: bool) -> tuple[int, ...]:
    """Pick K indices by score; equal scores prefer the larger index."""
    N = len(scores)
    if not 1 <= K <= N:
        raise ValueError(f"K must lie in 1..{N}, got {K}")
    idx = np.arange(N)
    key = -scores if larger_is_better else scores
    # lexsort: last key is primary
    order = np.lexsort((-idx, key))
    return tuple(sorted(int(i) + 1 for i in order[:K]))


def bec_bhattacharyya(N: int, epsilon: float) -> np.ndarray:
    """Bhattacharyya parameters of the N bit channels of a BEC(epsilon).

    Position ``i`` (0-based) is reached from the root by reading the bits of
    ``i`` from the most significant end: 0 takes ``2z - z^2``, 1 takes ``z^2``.
    """
    n = _log2_exact(N)
    z = np.array([float(epsilon)])
    for _ in range(n):
        z = np.stack([2 * z - z * z, z * z], axis=1).ravel()
    return z


def construct_bec(N: int, epsilon: float, K: int) -> PolarCodeSpec:
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    z = bec_bhattacharyya(N, epsilon)
    return PolarCodeSpec(N, _rank_indices(z, K, larger_is_better=False))


_PHI_A, _PHI_B, _PHI_C = 0.4527, 0.86, 0.0218


def _log_phi(x: np.ndarray) -> np.ndarray:
    """Log of the Gaussian-approximation function phi (Chung et al. fit)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    small = (x > 0) & (x < 10)
    big = x >= 10
    out[small] = -_PHI_A * x[small] ** _PHI_B + _PHI_C
    xb = x[big]
    out[big] = 0.5 * np.log(np.pi / xb) - xb / 4 + np.log1p(-10 / (7 * xb))
    return out


def _inv_log_phi(y: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_log_phi` by bisection (phi is decreasing)."""
    y = np.asarray(y, dtype=float)
    lo = np.zeros_like(y)
    hi = np.full_like(y, 1.0)
    while np.any(_log_phi(hi) > y):
        hi = np.where(_log_phi(hi) > y, hi * 2, hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        above = _log_phi(mid) > y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def ga_mean_llr(N: int, design_snr_db: float, rate: float) -> np.ndarray:
    """Mean LLR of each bit channel under the Gaussian approximation.

    Root mean is ``2 / sigma^2`` for BPSK with ``sigma^2 = 1 / (2 rate Eb/N0)``.
    Children follow the same bit order as :func:`bec_bhattacharyya`.
    """
    n = _log2_exact(N)
    sigma2 = 1.0 / (2 * rate * 10 ** (design_snr_db / 10))
    m = np.array([2.0 / sigma2])
    for _ in range(n):
        lp = _log_phi(m)
        # 1 - (1 - phi)^2 = phi (2 - phi), kept in the log domain
        minus = _inv_log_phi(lp + np.log(2 - np.exp(lp)))
        m = np.stack([minus, 2 * m], axis=1).ravel()
    return m


def construct_awgn(N: int, design_snr_db: float = DEFAULT_DESIGN_SNR_DB, K: int = 1,
                   rate: float | None = None) -> PolarCodeSpec:
    """Information set of size K ranked by Gaussian-approximation mean LLR.

    ``design_snr_db`` is Eb/N0 in dB; ``rate`` converts it to a noise level and
    defaults to ``K / N``.
    """
    _log2_exact(N)
    if not 1 <= K <= N:
        raise ValueError(f"K must lie in 1..{N}, got {K}")
    m = ga_mean_llr(N, design_snr_db, K / N if rate is None else rate)
    return PolarCodeSpec(N, _rank_indices(m, K, larger_is_better=True))


def polar_transform(u) -> np.ndarray:
    """``u F^{(x)n}`` by the butterfly network; accepts a batch of rows."""
    x = np.array(as_bits(u), dtype=np.uint8)
    N = x.shape[-1]
    _log2_exact(N)
    lead = x.shape[:-1]
    h = 1
    while h < N:
        v = x.reshape(*lead, N // (2 * h), 2, h)
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def _check_len(arr: np.ndarray, n: int, what: str):
    if arr.shape[-1] != n:
        raise ValueError(f"{what} must have length {n}, got {arr.shape[-1]}")


def assemble_u(spec: PolarCodeSpec, info_bits) -> np.ndarray:
    info = as_bits(info_bits)
    _check_len(info, spec.K, "info_bits")
    u = np.broadcast_to(spec.u_template, info.shape[:-1] + (spec.N,)).copy()
    u[..., spec.info_idx] = info
    return u


def encode(spec: PolarCodeSpec, info_bits) -> np.ndarray:
    """Non-systematic encoding ``x = u G``."""
    return polar_transform(assemble_u(spec, info_bits))


def encode_systematic(spec: PolarCodeSpec, info_bits) -> np.ndarray:
    """Systematic encoding with the codeword carrying ``info_bits`` on positions A."""
    x_A = as_bits(info_bits)
    _check_len(x_A, spec.K, "info_bits")
    u_A = mat_vec_mul(x_A ^ spec.frozen_offset_A, spec.G_AA_inv)
    return encode(spec, u_A)


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Check-node combine ``2 atanh(tanh(a/2) tanh(b/2))`` in a stable form."""
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    out += np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return np.clip(out, -LLR_CAP, LLR_CAP, out=out)


def _g(a: np.ndarray, b: np.ndarray, bits: np.ndarray) -> np.ndarray:
    out = np.where(bits.astype(bool), b - a, b + a)
    return np.clip(out, -LLR_CAP, LLR_CAP, out=out)


def _sc_node(spec: PolarCodeSpec, L: np.ndarray, lo: int, u: np.ndarray) -> np.ndarray:
    size = L.shape[1]
    if spec._all_frozen(lo, size):
        seg = spec.u_template[lo:lo + size]
        u[:, lo:lo + size] = seg
        return np.broadcast_to(polar_transform(seg), L.shape)
    if size == 1:
        u[:, lo] = L[:, 0] < 0
        return u[:, lo:lo + 1]
    h = size // 2
    a, b = L[:, :h], L[:, h:]
    left = _sc_node(spec, _f(a, b), lo, u)
    right = _sc_node(spec, _g(a, b, left), lo + h, u)
    return np.concatenate([left ^ right, right], axis=1)


def sc_decode(spec: PolarCodeSpec, llr) -> tuple[np.ndarray, np.ndarray]:
    """Successive-cancellation decoding.

    ``llr`` is a length-N vector or a ``(batch, N)`` array. Returns the
    estimated source vector ``u_hat`` and its information part.
    """
    L = np.asarray(llr, dtype=float)
    _check_len(L, spec.N, "llr")
    single = L.ndim == 1
    L = np.clip(np.atleast_2d(L), -LLR_CAP, LLR_CAP)
    u = np.zeros(L.shape, dtype=np.uint8)
    _sc_node(spec, L, 0, u)
    if single:
        u = u[0]
    return u, u[..., spec.info_idx]


def sc_decode_systematic(spec: PolarCodeSpec, llr) -> tuple[np.ndarray, np.ndarray]:
    """SC decoding followed by re-encoding: returns ``x_hat = u_hat G`` and ``x_hat[A]``."""
    u_hat, _ = sc_decode(spec, llr)
    x_hat = polar_transform(u_hat)
    return x_hat, x_hat[..., spec.info_idx]


def format_code_spec(spec: PolarCodeSpec) -> str:
    return (
        f"N={spec.N}\n"
        f"K={spec.K}\n"
        f"A={','.join(map(str, spec.info_set))}\n"
        f"frozen={''.join(map(str, spec.frozen_values))}\n"
    )


def parse_code_spec(text: str) -> PolarCodeSpec:
    fields = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed code-spec line: {line!r}")
        fields[key.strip()] = value.strip()
    missing = {"N", "K", "A"} - fields.keys()
    if missing:
        raise ValueError(f"code spec is missing {sorted(missing)}")
    N, K = int(fields["N"]), int(fields["K"])
    A = tuple(int(t) for t in fields["A"].split(",") if t)
    if len(A) != K:
        raise ValueError(f"K={K} but A lists {len(A)} indices")
    frozen = tuple(int(c) for c in fields.get("frozen", ""))
    return PolarCodeSpec(N, A, frozen)


def write_code_spec(spec: PolarCodeSpec, path) -> None:
    Path(path).write_text(format_code_spec(spec))


def read_code_spec(path) -> PolarCodeSpec:
    return parse_code_spec(Path(path).read_text())

