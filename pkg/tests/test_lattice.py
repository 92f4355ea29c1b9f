import numpy as np
import pytest
from hypothesis import given, settings

from boxball.errors import MalformedPathError, UndecidableError
from boxball.lattice import (Boundary, Configuration, PathEncoding, canonical_config,
                             config_to_text, decode, encode, encoding_to_csv, height,
                             height_via_projection, make_config, parse_config_text,
                             permute_counts, permute_zero_i)
from boxball.simplex import build_simplex_basis

from conftest import configurations


def test_encode_counts_simple_window():
    p = encode(make_config(2, [1, 2, 0]))
    assert p.counts_at(1).tolist() == [0, 1, 0]
    assert p.counts_at(2).tolist() == [0, 1, 1]
    assert p.counts_at(3).tolist() == [1, 1, 1]
    assert p.counts_at(0).tolist() == [0, 0, 0]


def test_encode_negative_window_backward_tally():
    # cells (1, 0) at sites -1, 0: walking left of the anchor subtracts steps
    cfg = Configuration(kappa=2, offset=-1, cells=(1, 0))
    p = encode(cfg)
    assert p.counts_at(-1).tolist() == [-1, 0, 0]
    assert p.counts_at(-2).tolist() == [-1, -1, 0]


def test_encode_empty_finite_support():
    cfg = Configuration(kappa=2, offset=1, cells=())
    p = encode(cfg)
    assert p.counts_at(5).tolist() == [5, 0, 0]
    assert p.counts_at(-3).tolist() == [-3, 0, 0]


def test_row_sums_equal_index():
    p = encode(make_config(3, [0, 1, 2, 0, 3, 1], offset=-2))
    for n in range(p.span_lo, p.span_hi + 1):
        assert p.counts_at(n).sum() == n


def test_windowed_window_must_touch_anchor():
    cfg = Configuration(kappa=1, offset=3, cells=(1, 0), boundary=Boundary.WINDOWED)
    with pytest.raises(UndecidableError):
        encode(cfg)
    cfg2 = Configuration(kappa=1, offset=-4, cells=(1, 0), boundary=Boundary.WINDOWED)
    with pytest.raises(UndecidableError):
        encode(cfg2)


def test_decode_intro_prefix():
    cells = (0, 1, 2, 0, 3, 1, 3, 2)
    cfg = make_config(3, cells)
    assert decode(encode(cfg)).cells == cells


def test_decode_rejects_double_step():
    good = encode(make_config(2, [1, 2, 0]))
    counts = good.counts.copy()
    counts[2] = counts[1] + np.array([1, 1, 0])  # two tallies at once
    counts[3] = counts[2] + np.array([1, 0, 0])
    bad = PathEncoding(kappa=2, window_lo=1, window_hi=3,
                       boundary=Boundary.FINITE_SUPPORT, counts=counts, span_lo=0)
    with pytest.raises(MalformedPathError):
        decode(bad)


def test_height_hand_tally():
    p = encode(make_config(2, [1, 2, 0, 0, 1, 0]))
    assert [height(p, 1, n) for n in range(1, 7)] == [-1, -1, 0, 1, 0, 1]
    assert height(p, 1, -1) == -1
    assert height(p, 2, 6) == 2  # 3 empties minus one color-2 ball


def test_height_empty_config():
    p = encode(Configuration(kappa=2, offset=1, cells=()))
    for n in (0, 3, 17):
        assert height(p, 1, n) == n


def test_height_windowed_out_of_range():
    cfg = make_config(2, [1, 0, 2], boundary=Boundary.WINDOWED)
    p = encode(cfg)
    with pytest.raises(UndecidableError):
        height(p, 1, 10)


def test_height_via_projection_examples():
    basis = build_simplex_basis(2)
    p = encode(make_config(2, [1, 2, 0]))
    assert height_via_projection(p, basis, 1, 3) == pytest.approx(0.0, abs=1e-9)
    assert height_via_projection(p, basis, 1, 0) == pytest.approx(0.0, abs=1e-9)
    empty = encode(Configuration(kappa=2, offset=1, cells=()))
    assert height_via_projection(empty, basis, 2, 5) == pytest.approx(5.0, abs=1e-9)


def test_permute_swaps_cells():
    cfg = make_config(2, [1, 2, 0])
    assert permute_zero_i(cfg, 1).cells == (0, 2, 1)
    assert permute_zero_i(cfg, 2).cells == (1, 0, 2)
    assert permute_zero_i(permute_zero_i(cfg, 1), 1) == cfg


def test_permute_counts_matches_cell_swap():
    cfg = make_config(3, [0, 1, 3, 2, 0, 1], offset=-1)
    assert decode(permute_counts(encode(cfg), 1)) == permute_zero_i(cfg, 1)


def test_tau_projection_identity():
    # tau S_n = S_n + A_i S_n (e_i - e_0) at every index
    basis = build_simplex_basis(3)
    cfg = make_config(3, [0, 1, 3, 2, 0, 1, 1, 0], offset=-2)
    p = encode(cfg)
    q = permute_counts(p, 2)
    for n in range(p.span_lo, p.span_hi + 1):
        s = p.counts_at(n).astype(float) @ basis.vectors
        ts = q.counts_at(n).astype(float) @ basis.vectors
        expected = s + height(p, 2, n) * basis.step_difference(2)
        assert np.abs(ts - expected).max() < 1e-9


def test_tau_flips_height_sign_and_shifts_others():
    cfg = make_config(3, [0, 1, 3, 2, 0, 1, 1, 0])
    p = encode(cfg)
    q = permute_counts(p, 1)
    for n in range(p.span_lo, p.span_hi + 1):
        assert height(q, 1, n) == -height(p, 1, n)
        # for j outside {0, i}: A_j tau S = a_i - a_j
        a = p.counts_at(n)
        assert height(q, 3, n) == a[1] - a[3]
    assert np.array_equal(q.counts[:, 3], p.counts[:, 3])


@settings(max_examples=150, deadline=None)
@given(configurations())
def test_encode_decode_roundtrip(cfg):
    assert decode(encode(cfg)) == cfg


@settings(max_examples=100, deadline=None)
@given(configurations(kappas=(1, 2, 3, 5), max_len=25))
def test_height_forms_agree(cfg):
    basis = build_simplex_basis(cfg.kappa)
    p = encode(cfg)
    for i in range(1, cfg.kappa + 1):
        for n in range(p.span_lo, p.span_hi + 1):
            assert abs(height(p, i, n) - height_via_projection(p, basis, i, n)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(configurations(boundaries=(Boundary.FINITE_SUPPORT,), max_len=20))
def test_finite_support_height_extension(cfg):
    p = encode(cfg)
    for i in range(1, cfg.kappa + 1):
        assert height(p, i, p.span_hi + 4) == height(p, i, p.span_hi) + 4
        assert height(p, i, p.span_lo - 3) == height(p, i, p.span_lo) - 3


def test_canonical_trims_zeros():
    cfg = Configuration(kappa=2, offset=-3, cells=(0, 0, 1, 2, 0, 0, 0))
    out = canonical_config(cfg)
    assert out.offset == -1 and out.cells == (1, 2)
    empty = canonical_config(Configuration(kappa=2, offset=5, cells=(0, 0)))
    assert empty.cells == () and empty.offset == 1


def test_text_format_roundtrip():
    cfg = Configuration(kappa=12, offset=-4, cells=(0, 11, 3, 12, 1),
                        boundary=Boundary.WINDOWED)
    text = config_to_text(cfg)
    assert "cells=0b3c1" in text
    assert parse_config_text(text) == cfg
    assert parse_config_text("kappa=2 offset=1 cells=120") == make_config(2, [1, 2, 0])


def test_text_format_bad_symbol():
    with pytest.raises(ValueError):
        parse_config_text("kappa=2 offset=0 cells=1!0")


def test_csv_export_columns():
    csv = encoding_to_csv(encode(make_config(2, [1, 2, 0])))
    lines = csv.strip().split("\n")
    assert lines[0] == "n,a_0,a_1,a_2,A_1,A_2"
    assert lines[1] == "0,0,0,0,0,0"
    assert lines[-1] == "3,1,1,1,0,0"
