import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarcbi.interleave import apply_map, build_bi_map, build_cbi_map, build_direct_map, invert_map


def _table(imap):
    return {(b, bit): (p, pos) for b, bit, p, pos in imap.entries()}


def test_cbi_hand_example_n16():
    # K=8, correlated positions (4,6,7,8), uncorrelated (1,2,3,5); N_l=16 gives two full rounds
    m = build_cbi_map(16, 8, (4, 6, 7, 8))
    assert (m.ldpc_blocks, m.polar_blocks, m.padding.size, m.average_delay) == (5, 10, 0, 2)
    t = _table(m)
    # LDPC block 1: run of four bits, then correlated slot 4 of polar blocks 2..5
    assert [t[1, k] for k in range(1, 9)] == [(1, 1), (1, 2), (1, 3), (1, 5),
                                             (2, 4), (3, 4), (4, 4), (5, 4)]
    # LDPC block 2: one bit to polar block 1, run in polar block 2, slot 6 of blocks 3..5
    assert [t[2, k] for k in range(1, 9)] == [(1, 4), (2, 1), (2, 2), (2, 3),
                                             (2, 5), (3, 6), (4, 6), (5, 6)]
    # LDPC block 5 only feeds earlier polar blocks before its run
    assert [t[5, k] for k in range(1, 9)] == [(1, 8), (2, 8), (3, 8), (4, 8),
                                             (5, 1), (5, 2), (5, 3), (5, 5)]
    # second round repeats the pattern shifted by five polar blocks
    assert t[1, 9] == (6, 1) and t[2, 9] == (6, 4)


def test_cbi_three_regime_example():
    corr = range(1, 37)     # 36 correlated positions among K=64
    m = build_cbi_map(155, 64, corr)
    assert m.ldpc_blocks == 37
    assert m.polar_blocks == 101
    assert m.padding.size == 729
    assert m.average_delay == 3
    t = _table(m)
    # polar block 38 opens round two; its run starts at bit 65 of LDPC block 1
    assert t[1, 65] == (38, 37)
    assert t[2, 65] == (38, 1)


def test_cbi_partial_round_layout():
    # N_l = 2K + 3: the last round only reaches polar blocks 1..3 of the round
    m = build_cbi_map(19, 8, (4, 6, 7, 8))
    assert m.polar_blocks == 2 * 5 + 3
    used = np.zeros(m.polar_blocks * 8, bool)
    used[m.forward] = True
    last = used.reshape(m.polar_blocks, 8)[10:]
    assert last.any(axis=1).all()


def _check_breaking(m, corr_rel):
    """Each polar block: one LDPC block feeds every uncorrelated slot, and
    the correlated slots come from distinct other LDPC blocks."""
    K = m.K
    corr = {p - 1 for p in corr_rel}
    src = np.full(m.polar_blocks * K, -1)
    src[m.forward] = np.arange(m.forward.size) // m.n_l
    src = src.reshape(m.polar_blocks, K)
    for p in range(m.polar_blocks):
        run = {int(s) for q, s in enumerate(src[p]) if q not in corr and s >= 0}
        cor = [int(s) for q, s in enumerate(src[p]) if q in corr and s >= 0]
        assert len(run) <= 1
        assert len(set(cor)) == len(cor)
        assert not run & set(cor)


def test_cbi_breaks_correlation_paper_sizes():
    corr = range(1, 37)
    _check_breaking(build_cbi_map(155, 64, corr), corr)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.integers(1, 60), st.data())
def test_cbi_random_sweep(K, n_l, data):
    K_c = data.draw(st.integers(0, K - 1))
    corr = sorted(data.draw(st.permutations(range(1, K + 1)))[:K_c])
    m = build_cbi_map(n_l, K, corr)
    n_d, mo = divmod(n_l, K)
    assert m.ldpc_blocks == K_c + 1
    assert m.polar_blocks == n_d * (K_c + 1) + min(mo, K_c + 1)
    assert m.padding.size == m.polar_blocks * K - m.ldpc_blocks * n_l
    assert m.average_delay == math.ceil(m.polar_blocks / (K_c + 1))
    _check_breaking(m, corr)
    rng = np.random.default_rng(n_l * 100 + K)
    frames = rng.integers(0, 2, (4, m.ldpc_blocks, n_l), dtype=np.uint8)
    polar = apply_map(m, frames, pad_value=0)
    assert np.array_equal(invert_map(m, polar), frames)
    assert not polar.reshape(4, -1)[:, m.padding].any()


def test_cbi_exact_rounds_and_no_correlated_bits():
    m = build_cbi_map(24, 8, (2, 5))
    assert (m.polar_blocks, m.padding.size) == (9, 0)
    m0 = build_cbi_map(10, 4, ())
    assert (m0.ldpc_blocks, m0.polar_blocks, m0.padding.size) == (1, 3, 2)


def test_cbi_rejects_bad_positions():
    with pytest.raises(ValueError):
        build_cbi_map(16, 4, (1, 2, 3, 4))
    with pytest.raises(ValueError):
        build_cbi_map(16, 4, (0,))
    with pytest.raises(ValueError):
        build_cbi_map(16, 4, (2, 2))
    with pytest.raises(ValueError):
        build_cbi_map(0, 4, ())


def test_single_flip_lands_in_one_place():
    m = build_cbi_map(155, 64, range(1, 37))
    frame = np.zeros((37, 155), np.uint8)
    rng = np.random.default_rng(0)
    for _ in range(50):
        b, bit = rng.integers(0, 37), rng.integers(0, 155)
        f = frame.copy()
        f[b, bit] = 1
        polar = apply_map(m, f)
        assert polar.sum() == 1
        back = invert_map(m, polar)
        assert back[b, bit] == 1 and back.sum() == 1


def test_padding_flips_are_ignored():
    m = build_cbi_map(155, 64, range(1, 37))
    polar = np.zeros((m.polar_blocks, 64), np.uint8)
    polar.reshape(-1)[m.padding] = 1
    assert not invert_map(m, polar).any()


def test_bi_map():
    m = build_bi_map(155, 64)
    assert (m.ldpc_blocks, m.polar_blocks, m.padding.size) == (64, 155, 0)
    assert m.span == 155
    t = _table(m)
    assert t[1, 1] == (1, 1) and t[3, 7] == (7, 3) and t[64, 155] == (155, 64)


def test_direct_map():
    m = build_direct_map(155, 64)
    assert (m.ldpc_blocks, m.polar_blocks, m.padding.size) == (64, 155, 0)
    assert m.span == 4
    t = _table(m)
    assert t[1, 65] == (2, 1) and t[2, 1] == (3, 28)


def test_csv_dump():
    m = build_cbi_map(19, 8, (4, 6, 7, 8))
    lines = m.to_csv().splitlines()
    assert lines[1] == "ldpc_block,ldpc_bit,polar_block,polar_pos"
    assert len(lines) == 2 + m.forward.size + 2 + m.padding.size


def test_apply_map_shape_errors():
    m = build_bi_map(5, 3)
    with pytest.raises(ValueError):
        apply_map(m, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        invert_map(m, np.zeros((5, 2)))
