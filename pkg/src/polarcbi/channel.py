"""Memoryless BEC and BPSK-AWGN channels producing decoder LLRs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import as_bits
from .polar import LLR_CAP


def rng_stream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for stream ``index`` of master ``seed``.

    Streams are keyed by ``(seed, *index)`` alone, so work split across any
    number of workers draws the same numbers.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.PCG64(ss))


def noise_variance(ebn0_db: float, rate: float) -> float:
    """BPSK noise variance ``1 / (2 R Eb/N0)``."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def bec_transmit(codeword, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Erase each bit with probability ``epsilon``; known bits get LLR +/-cap."""
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    x = as_bits(codeword)
    llr = LLR_CAP * (1.0 - 2.0 * x)
    llr[rng.random(x.shape) < epsilon] = 0.0
    return llr


def awgn_transmit(codeword, ebn0_db: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) over AWGN; returns ``2 y / sigma^2``."""
    sigma2 = noise_variance(ebn0_db, rate)
    x = as_bits(codeword)
    y = (1.0 - 2.0 * x) + np.sqrt(sigma2) * rng.standard_normal(x.shape)
    return 2.0 * y / sigma2


@dataclass(frozen=True)
class ChannelParams:
    """A channel and its operating point.

    ``value`` is the erasure probability for ``"bec"`` and Eb/N0 in dB for
    ``"awgn"``; ``rate`` is the information rate used to normalise Eb/N0.
    """

    kind: str
    value: float
    rate: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bec", "awgn"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == "bec" and not 0 <= self.value <= 1:
            raise ValueError(f"erasure probability must lie in [0, 1], got {self.value}")
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")

    def transmit(self, codeword, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "bec":
            return bec_transmit(codeword, self.value, rng)
        return awgn_transmit(codeword, self.value, self.rate, rng)

    @property
    def noiseless(self) -> bool:
        return self.kind == "bec" and self.value == 0
