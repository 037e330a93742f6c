"""Acceptance criteria, one test each; the terminal summary lists PASS/FAIL lines."""
import itertools
import math

import numpy as np
import pytest

from oracles import bitset_rank, encode_by_matrix, sc_oracle
from polarcbi.channel import ChannelParams, rng_stream
from polarcbi.correlation import correlated_split, measure_coupling, profile_of
from polarcbi.gf2 import mat_vec_mul, submatrix
from polarcbi.harness import ExperimentConfig, format_results, run_experiment
from polarcbi.interleave import apply_map, build_cbi_map, invert_map
from polarcbi.ldpc import bp_decode, build_tanner_h, ldpc_encode, syndrome
from polarcbi.polar import (DEFAULT_DESIGN_SNR_DB, LLR_CAP, construct_awgn, construct_bec,
                            encode, encode_systematic, polar_transform, sc_decode,
                            sc_decode_systematic)

Z95 = 1.959964
Z95_ONE_SIDED = 1.644854


def test_c01_encoder_exactness(criterion):
    U = np.array(list(itertools.product((0, 1), repeat=8)), dtype=np.uint8)
    mismatches = int((polar_transform(U) != encode_by_matrix(U)).any(axis=1).sum())
    criterion(1, "encoder exactness", mismatches == 0,
              f"{mismatches} of 256 inputs differ from u*F^(x)3")


def test_c02_frozen_rows_vanish(criterion):
    bad = []
    for N in (16, 64, 256):
        for spec in (construct_bec(N, 0.3, N // 2), construct_bec(N, 0.5, N // 4),
                     construct_awgn(N, 0.0, N // 4), construct_awgn(N, 2.0, N // 2)):
            if submatrix(spec.G, spec.frozen_set, spec.info_set).any():
                bad.append((N, spec.K))
    criterion(2, "frozen rows of G vanish on info columns", not bad,
              f"6 BEC and 6 AWGN codes at N=16,64,256; violations {bad}")


def test_c03_worked_example_vectors(criterion):
    spec = construct_bec(16, 0.2, 8)
    prof = correlated_split(spec.G, spec.info_set)
    ok = (spec.info_set == (8, 10, 11, 12, 13, 14, 15, 16)
          and prof.correlated == (12, 14, 15, 16) and prof.uncorrelated == (8, 10, 11, 13))
    criterion(3, "N=16 example sets", ok,
              f"A={spec.info_set} A_c={prof.correlated} A_uc={prof.uncorrelated}")


def test_c04_sc_matches_oracle(criterion):
    rng = rng_stream(404)
    cases = mismatches = 0
    for N in (2, 4, 8):
        patterns = [()] + [(i,) for i in range(N)] + list(itertools.combinations(range(N), 2))
        for K in range(1, N + 1):
            spec = construct_bec(N, 0.5, K)
            for _ in range(4):
                x = encode(spec, rng.integers(0, 2, K, dtype=np.uint8))
                for erased in patterns:
                    llr = LLR_CAP * (1.0 - 2.0 * x)
                    llr[list(erased)] = 0.0
                    cases += 1
                    if sc_decode(spec, llr)[0].tolist() != sc_oracle(llr, spec.info_set):
                        mismatches += 1
    criterion(4, "SC equals brute-force oracle", mismatches == 0,
              f"{mismatches} mismatches over {cases} (code, codeword, erasure) cases")


def test_c05_systematic_has_fewer_errors(criterion):
    spec = construct_bec(16, 0.2, 8)
    rng = rng_stream(505)
    blocks = 20000
    b = rng.integers(0, 2, (blocks, 8), dtype=np.uint8)
    x = encode_systematic(spec, b)
    u_A = mat_vec_mul(b, spec.G_AA_inv)
    llr = ChannelParams("bec", 0.2).transmit(x, rng)
    u_hat_A = sc_decode(spec, llr)[1]
    x_hat_A = sc_decode_systematic(spec, llr)[1]
    eu = (u_hat_A != u_A).sum(axis=1)
    ex = (x_hat_A != b).sum(axis=1)
    d = (eu - ex).astype(float)
    se = d.std(ddof=1) / math.sqrt(blocks)
    lower = d.mean() - Z95_ONE_SIDED * se
    criterion(5, "systematic readback has fewer errors", lower > 0,
              f"{blocks} blocks: mean errors x_A={ex.mean():.4f} u_A={eu.mean():.4f}, "
              f"one-sided 95% lower bound of difference {lower:.4f}")


@pytest.mark.slow
def test_c06_coupling_coefficients(criterion):
    spec = construct_bec(16, 0.2, 8)
    cols = (10, 11, 13)
    reference = {10: 0.76, 11: 0.74, 13: 0.74}
    r = measure_coupling(spec, ChannelParams("bec", 0.2), cols, 10_000_000, seed=606,
                         chunk=50_000)
    rows, ok = [], True
    for i in cols:
        c, base = r.coefficient(i), r.baseline(i)
        ok &= r.events[i] >= 100_000 and c >= 0.5 and c >= 2 * base
        rows.append(f"col {i}: events={r.events[i]} coef={c:.3f} (published {reference[i]:.2f}) "
                    f"baseline={base:.3f} ratio={c / base:.2f}")
    criterion(6, "coupling coefficients", ok, "; ".join(rows))


def test_c07_cbi_structure(criterion):
    prof = profile_of(construct_awgn(256, DEFAULT_DESIGN_SNR_DB, 64))
    corr = prof.correlated_relative[-36:]
    m = build_cbi_map(155, 64, corr)
    cset = {p - 1 for p in corr}
    src = np.full(m.polar_blocks * 64, -1)
    src[m.forward] = np.arange(m.forward.size) // 155
    src = src.reshape(m.polar_blocks, 64)
    breaking = True
    for p in range(m.polar_blocks):
        run = {int(s) for q, s in enumerate(src[p]) if q not in cset and s >= 0}
        cor = [int(s) for q, s in enumerate(src[p]) if q in cset and s >= 0]
        breaking &= len(run) <= 1 and len(set(cor)) == len(cor) and not run & set(cor)
    frames = rng_stream(707).integers(0, 2, (1000, m.ldpc_blocks, 155), dtype=np.uint8)
    round_trip = np.array_equal(invert_map(m, apply_map(m, frames)), frames)
    ok = ((m.ldpc_blocks, m.polar_blocks, m.padding.size, m.average_delay) == (37, 101, 729, 3)
          and breaking and round_trip)
    criterion(7, "CBI map structure", ok,
              f"{m.ldpc_blocks} LDPC -> {m.polar_blocks} polar blocks, padding "
              f"{m.padding.size}, delay {m.average_delay}, distinct sources {breaking}, "
              f"1000-frame round trip {round_trip}")


def test_c08_tanner_code(criterion):
    spec = build_tanner_h()
    H = spec.H.astype(np.int64)
    overlap = H.T @ H
    np.fill_diagonal(overlap, 0)
    regular = (H.sum(axis=0) == 3).all() and (H.sum(axis=1) == 5).all()
    rng = rng_stream(808)
    c = ldpc_encode(spec, rng.integers(0, 2, (1000, 64), dtype=np.uint8))
    codewords_ok = not syndrome(spec, c).any()
    llr = 8.0 * (1.0 - 2.0 * c)
    flips = rng.integers(0, 155, 1000)
    llr[np.arange(1000), flips] *= -1
    res = bp_decode(spec, llr)
    corrected = int((res.codeword == c).all(axis=1).sum())
    ok = (H.shape == (93, 155) and regular and bitset_rank(H) == 91 and overlap.max() <= 1
          and codewords_ok and corrected == 1000)
    criterion(8, "Tanner (155,64) code", ok,
              f"shape {H.shape}, (3,5)-regular {regular}, rank {bitset_rank(H)}, "
              f"max column overlap {overlap.max()}, codewords valid {codewords_ok}, "
              f"single flips corrected {corrected}/1000")


@pytest.mark.slow
def test_c09_ber_ordering(criterion):
    point = 6.0     # composite-rate Eb/N0 in dB, fixed before looking at CBI/BI results
    common = dict(n=256, rate=0.25, channel="awgn", params=[point], seed=909,
                  target_errors=100, min_frames=1, chunk_frames=32)
    budget = {"ldpc-direct-polar": 2000, "ldpc-cbi-polar": 8000, "ldpc-bi-polar": 2000}
    pts = {}
    for scheme, frames in budget.items():
        cfg = ExperimentConfig(scheme=scheme, max_frames=frames, **common)
        pts[scheme] = run_experiment(cfg).points[0]
    d, c, b = pts["ldpc-direct-polar"], pts["ldpc-cbi-polar"], pts["ldpc-bi-polar"]
    in_range = 1e-3 <= d.ber <= 1e-2
    enough = all(p.block_errors >= 100 for p in pts.values())
    separated = c.ber + c.ber_ci < d.ber - d.ber_ci
    close = abs(c.ber - b.ber) <= c.ber_ci + b.ber_ci
    detail = ", ".join(f"{s.split('-')[1]} BER={p.ber:.3e}+-{p.ber_ci:.1e} "
                       f"({p.block_errors} block errors / {p.blocks} blocks)"
                       for s, p in pts.items())
    criterion(9, "BER ordering at Eb/N0=6.0 dB", in_range and enough and separated and close,
              f"{detail}; direct in range {in_range}, >=100 events {enough}, "
              f"CBI<direct {separated}, CBI~BI {close}")


def test_c10_awgn_split_size(criterion):
    k_c = profile_of(construct_awgn(256, DEFAULT_DESIGN_SNR_DB, 64)).K_c
    criterion(10, "AWGN construction split size", 30 <= k_c <= 42,
              f"K_c={k_c} at design SNR {DEFAULT_DESIGN_SNR_DB:g} dB (published 36)")


def _data_rows(cfg):
    return [ln for ln in format_results(run_experiment(cfg)).splitlines()
            if not ln.startswith("#")]


def test_c11_determinism(criterion):
    base = dict(scheme="ldpc-cbi-polar", n=64, rate=0.25, channel="awgn", params=[2.0, 4.0],
                seed=1111, min_frames=4, max_frames=60, target_errors=5, chunk_frames=3)
    first = _data_rows(ExperimentConfig(**base))
    second = _data_rows(ExperimentConfig(**base))
    parallel = _data_rows(ExperimentConfig(workers=2, **base))
    polar = dict(base, scheme="polar-only", max_frames=3000, target_errors=20, chunk_frames=50)
    p1 = _data_rows(ExperimentConfig(**polar))
    p3 = _data_rows(ExperimentConfig(workers=3, **polar))
    ok = first == second == parallel and p1 == p3
    criterion(11, "determinism", ok,
              f"repeat identical {first == second}, workers 1 vs 2 identical "
              f"{first == parallel}, polar-only workers 1 vs 3 identical {p1 == p3}")
