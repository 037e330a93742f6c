"""Monte-Carlo BER/BLER driver for polar and LDPC+polar concatenations."""
from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelParams, rng_stream
from .correlation import profile_of
from .interleave import InterleaverMap, apply_map, build_bi_map, build_cbi_map, build_direct_map, invert_map
from .ldpc import LdpcCodeSpec, bp_decode, build_tanner_h, ldpc_encode
from .polar import (DEFAULT_DESIGN_SNR_DB, PolarCodeSpec, construct_awgn, construct_bec, encode, encode_systematic,
                    format_code_spec, read_code_spec, sc_decode, sc_decode_systematic)

log = logging.getLogger(__name__)

SCHEMES = ("polar-only", "ldpc-direct-polar", "ldpc-bi-polar", "ldpc-cbi-polar")
CSV_HEADER = "scheme,channel_param,frames,bits,bit_errors,ber,ber_ci,block_errors,bler,seed"
#: Stream slot reserved for the reliability pilot of each sweep point.
PILOT_STREAM = 1 << 31
PILOT_BLOCKS = 4000


@dataclass
class ExperimentConfig:
    scheme: str = "ldpc-cbi-polar"
    n: int = 256
    rate: float = 0.25
    channel: str = "awgn"
    params: list[float] = field(default_factory=lambda: [1.0])
    seed: int = 1
    min_frames: int = 100
    max_frames: int = 100_000
    target_errors: int = 100
    bp_iters: int = 50
    systematic: bool = False
    spec_path: str | None = None
    #: construction point; defaults to the worst sweep point
    design_param: float | None = None
    chunk_frames: int = 16
    #: fixed LLR magnitude fed to the LDPC decoder; None estimates it per point
    ldpc_llr: float | None = None
    workers: int = 1

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; pick one of {SCHEMES}")
        if self.channel not in ("bec", "awgn"):
            raise ValueError(f"unknown channel {self.channel!r}")
        if min(self.min_frames, self.max_frames, self.target_errors, self.chunk_frames,
               self.bp_iters, self.workers) < 1:
            raise ValueError("frame budget, error target, chunk size, BP iterations and "
                             "workers must all be positive")
        if self.min_frames > self.max_frames:
            raise ValueError("min_frames exceeds max_frames")
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")

    def digest(self) -> str:
        """Hash of every setting that can change the numbers (not ``workers``)."""
        d = asdict(self)
        d.pop("workers")
        if self.spec_path:
            d["spec_path"] = Path(self.spec_path).read_text()
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class PointResult:
    channel_param: float
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    block_errors: int = 0
    blocks: int = 0
    wall_time: float = 0.0

    @property
    def ber(self) -> float:
        return estimate_stats(self.bit_errors, self.bits)[0]

    @property
    def ber_ci(self) -> float:
        return estimate_stats(self.bit_errors, self.bits)[1]

    @property
    def bler(self) -> float:
        return estimate_stats(self.block_errors, self.blocks)[0]

    @property
    def bler_ci(self) -> float:
        return estimate_stats(self.block_errors, self.blocks)[1]

    def add(self, frames, bits, bit_errors, blocks, block_errors):
        self.frames += frames
        self.bits += bits
        self.bit_errors += bit_errors
        self.blocks += blocks
        self.block_errors += block_errors


@dataclass
class SweepResult:
    config: ExperimentConfig
    points: list[PointResult]
    code: PolarCodeSpec
    overall_rate: float
    rate_convention: str


def estimate_stats(errors: int, total: int) -> tuple[float, float]:
    """Rate and 95% normal-approximation half-width ``1.96 sqrt(p(1-p)/n)``."""
    if total < 1:
        raise ValueError("total must be at least 1")
    p = errors / total
    return p, 1.96 * math.sqrt(p * (1 - p) / total)


def design_code(cfg: ExperimentConfig, overall_rate: float | None = None) -> PolarCodeSpec:
    if cfg.spec_path:
        return read_code_spec(cfg.spec_path)
    K = round(cfg.n * cfg.rate)
    if cfg.channel == "bec":
        eps = cfg.design_param if cfg.design_param is not None else max(cfg.params, default=0.5)
        if not 0 < eps < 1:
            eps = 0.5
        return construct_bec(cfg.n, eps, K)
    if cfg.design_param is not None:
        snr = cfg.design_param
    else:
        snr = min(cfg.params) if cfg.params else DEFAULT_DESIGN_SNR_DB
    return construct_awgn(cfg.n, snr, K, rate=overall_rate)


@dataclass(eq=False)
class Pipeline:
    """Everything one worker needs to simulate chunks of frames."""

    scheme: str
    code: PolarCodeSpec
    systematic: bool
    bp_iters: int
    ldpc: LdpcCodeSpec | None = None
    imap: InterleaverMap | None = None

    @property
    def concatenated(self) -> bool:
        return self.ldpc is not None

    @property
    def overall_rate(self) -> float:
        r = self.code.rate
        return r * self.ldpc.k / self.ldpc.n if self.concatenated else r

    def _polar_tx_rx(self, info: np.ndarray, channel: ChannelParams, rng) -> np.ndarray:
        if self.systematic:
            llr = channel.transmit(encode_systematic(self.code, info), rng)
            return sc_decode_systematic(self.code, llr)[1]
        llr = channel.transmit(encode(self.code, info), rng)
        return sc_decode(self.code, llr)[1]

    def pilot_llr(self, channel: ChannelParams, rng) -> float:
        """LLR magnitude for hard SC outputs, from a pilot estimate of their error rate."""
        info = rng.integers(0, 2, (PILOT_BLOCKS, self.code.K), dtype=np.uint8)
        errs = int((self._polar_tx_rx(info, channel, rng) != info).sum())
        p = (errs + 0.5) / (info.size + 1)
        return math.log((1 - p) / p)

    def run_chunk(self, channel: ChannelParams, frames: int, rng, llr_mag: float):
        """Simulate ``frames`` frames; returns (bits, bit_errors, blocks, block_errors)."""
        K = self.code.K
        if not self.concatenated:
            info = rng.integers(0, 2, (frames, K), dtype=np.uint8)
            wrong = self._polar_tx_rx(info, channel, rng) != info
            return info.size, int(wrong.sum()), frames, int(wrong.any(axis=1).sum())
        m = self.imap
        data = rng.integers(0, 2, (frames, m.ldpc_blocks, self.ldpc.k), dtype=np.uint8)
        cw = ldpc_encode(self.ldpc, data)
        polar_in = apply_map(m, cw).reshape(-1, K)
        polar_out = self._polar_tx_rx(polar_in, channel, rng)
        hard = invert_map(m, polar_out.reshape(frames, m.polar_blocks, K))
        llr = llr_mag * (1.0 - 2.0 * hard.reshape(-1, self.ldpc.n))
        est = bp_decode(self.ldpc, llr, self.bp_iters).info.reshape(data.shape)
        wrong = est != data
        return data.size, int(wrong.sum()), frames * m.ldpc_blocks, int(wrong.any(axis=2).sum())


def build_pipeline(cfg: ExperimentConfig) -> Pipeline:
    concatenated = cfg.scheme != "polar-only"
    ldpc = build_tanner_h() if concatenated else None
    overall = None
    if concatenated and cfg.channel == "awgn":
        overall = cfg.rate * ldpc.k / ldpc.n
    code = design_code(cfg, overall)
    imap = None
    if concatenated:
        if cfg.scheme == "ldpc-direct-polar":
            imap = build_direct_map(ldpc.n, code.K)
        elif cfg.scheme == "ldpc-bi-polar":
            imap = build_bi_map(ldpc.n, code.K)
        else:
            imap = build_cbi_map(ldpc.n, code.K, profile_of(code).correlated_relative)
    return Pipeline(cfg.scheme, code, cfg.systematic, cfg.bp_iters, ldpc, imap)


def _chunk_task(args):
    pipe, channel, frames, seed, point, chunk, llr_mag = args
    return pipe.run_chunk(channel, frames, rng_stream(seed, point, chunk), llr_mag)


def run_experiment(cfg: ExperimentConfig) -> SweepResult:
    """Run the sweep; counts depend on the config and seed, never on ``workers``."""
    cfg.validate()
    pipe = build_pipeline(cfg)
    rate = pipe.overall_rate
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    points = []
    try:
        for pi, param in enumerate(cfg.params):
            channel = ChannelParams(cfg.channel, float(param), rate)
            res = PointResult(float(param))
            t0 = time.perf_counter()
            llr_mag = cfg.ldpc_llr
            if pipe.concatenated and llr_mag is None:
                llr_mag = pipe.pilot_llr(channel, rng_stream(cfg.seed, pi, PILOT_STREAM))
            chunk = 0
            while not _finished(res, cfg):
                wave = []
                planned = res.frames
                for _ in range(cfg.workers):
                    n = min(cfg.chunk_frames, cfg.max_frames - planned)
                    if n <= 0:
                        break
                    wave.append((pipe, channel, n, cfg.seed, pi, chunk + len(wave), llr_mag))
                    planned += n
                outs = pool.map(_chunk_task, wave) if pool else map(_chunk_task, wave)
                for task, out in zip(wave, outs):
                    # later chunks of a wave are dropped once the stopping rule fires,
                    # which keeps totals identical for any worker count
                    if _finished(res, cfg):
                        break
                    res.add(task[2], *out)
                    chunk += 1
            res.wall_time = time.perf_counter() - t0
            log.info("%s %s=%g frames=%d ber=%.3e bler=%.3e", cfg.scheme, cfg.channel, param,
                     res.frames, res.ber, res.bler)
            points.append(res)
    finally:
        if pool:
            pool.shutdown()
    convention = (f"Eb/N0 normalised by overall rate {rate:.6f}"
                  + (" (polar rate x LDPC rate)" if pipe.concatenated else " (polar rate)")
                  if cfg.channel == "awgn" else "BEC erasure probability")
    return SweepResult(cfg, points, pipe.code, rate, convention)


def _finished(res: PointResult, cfg: ExperimentConfig) -> bool:
    if res.frames >= cfg.max_frames:
        return True
    return res.frames >= cfg.min_frames and res.block_errors >= cfg.target_errors


def format_results(result: SweepResult) -> str:
    cfg = result.config
    code_line = format_code_spec(result.code).strip().replace("\n", " ")
    lines = [
        f"# config_hash={cfg.digest()}",
        f"# scheme={cfg.scheme} channel={cfg.channel} systematic={cfg.systematic} "
        f"bp_iters={cfg.bp_iters}",
        f"# rate_convention={result.rate_convention}",
        f"# code {code_line}",
        CSV_HEADER,
    ]
    for p in result.points:
        lines.append(f"{cfg.scheme},{p.channel_param:g},{p.frames},{p.bits},{p.bit_errors},"
                     f"{p.ber:.6e},{p.ber_ci:.6e},{p.block_errors},{p.bler:.6e},{cfg.seed}")
    return "\n".join(lines) + "\n"


def emit_results(result: SweepResult, path) -> Path:
    """Write the CSV and a two-column ``<stem>.<scheme>.dat`` (param, BER) beside it."""
    path = Path(path)
    path.write_text(format_results(result))
    dat = path.with_name(f"{path.stem}.{result.config.scheme}.dat")
    dat.write_text("".join(f"{p.channel_param:g} {p.ber:.6e}\n" for p in result.points))
    return path


def read_results(path) -> list[dict]:
    """Parse the data rows of a results CSV back into dicts of typed values."""
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = rows[0].split(",")
    casts = dict(scheme=str, channel_param=float, frames=int, bits=int, bit_errors=int,
                 ber=float, ber_ci=float, block_errors=int, bler=float, seed=int)
    return [{k: casts[k](v) for k, v in zip(header, r.split(","))} for r in rows[1:]]
