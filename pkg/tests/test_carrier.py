import itertools

import numpy as np
import pytest

from boxball.carrier import apply_Ti_direct, carrier_from_heights, run_carrier
from boxball.errors import UndecidableError
from boxball.lattice import Boundary, Configuration, encode, make_config


def test_carrier_hand_example():
    trace = run_carrier(make_config(2, [1, 2, 0, 0, 1, 0]), 1)
    assert trace.loads.tolist() == [1, 1, 0, 0, 1, 0]


def test_carrier_all_empty():
    trace = run_carrier(make_config(2, [0] * 6), 1)
    assert trace.loads.tolist() == [0] * 6


def test_carrier_pure_pickups():
    trace = run_carrier(make_config(3, [2, 2, 2]), 2)
    assert trace.loads.tolist() == [1, 2, 3]


def test_carrier_from_heights_hand_example():
    cfg = make_config(2, [1, 2, 0, 0, 1, 0])
    assert carrier_from_heights(encode(cfg), 1) == run_carrier(cfg, 1)


def test_carrier_trace_structure():
    rng = np.random.default_rng(5)
    for _ in range(100):
        kappa = int(rng.integers(1, 4))
        cells = rng.integers(0, kappa + 1, size=30)
        cfg = make_config(kappa, cells, offset=int(rng.integers(-20, 20)))
        i = int(rng.integers(1, kappa + 1))
        loads = run_carrier(cfg, i).loads
        assert (loads >= 0).all()
        assert np.abs(np.diff(loads)).max(initial=0) <= 1
        picked = np.asarray(cfg.cells) == i
        assert (np.diff(np.concatenate([[0], loads]))[picked] == 1).all()


def test_windowed_needs_explicit_load():
    cfg = make_config(2, [1, 0, 2], boundary=Boundary.WINDOWED)
    with pytest.raises(UndecidableError):
        run_carrier(cfg, 1)
    trace = run_carrier(cfg, 1, initial_load=2)
    assert trace.loads.tolist() == [3, 2, 2]


def test_direct_action_hand_example():
    out = apply_Ti_direct(make_config(2, [1, 2, 0, 0, 1, 0]), 1)
    assert out.cells == (0, 2, 1, 0, 0, 1)
    assert out.offset == 1


def test_direct_action_intro_three_color():
    eta = make_config(3, [0, 1, 2, 0, 3, 1, 3, 2, 0, 3, 0, 1, 1, 2, 3, 0])
    out = apply_Ti_direct(eta, 1)
    shown = (0, 0, 2, 1, 3, 0, 3, 2, 1, 3, 0, 0, 0, 2, 3, 1, 1, 0)
    assert out.cells_range(1, len(shown)) == shown


def test_direct_action_empty():
    cfg = Configuration(kappa=2, offset=1, cells=())
    assert apply_Ti_direct(cfg, 1) == cfg


def test_color_counts_conserved_and_others_fixed():
    rng = np.random.default_rng(11)
    for _ in range(200):
        kappa = int(rng.integers(1, 5))
        cells = rng.integers(0, kappa + 1, size=int(rng.integers(1, 40)))
        cfg = make_config(kappa, cells)
        i = int(rng.integers(1, kappa + 1))
        out = apply_Ti_direct(cfg, i)
        assert np.array_equal(np.bincount(cells, minlength=kappa + 1)[1:],
                              out.color_counts()[1:])
        for site, sym in ((cfg.offset + k, c) for k, c in enumerate(cfg.cells)
                          if c not in (0, i)):
            assert out.cell(site) == sym


def test_soliton_moves_its_own_length():
    # a lone block of L balls travels L sites per step
    for length in (1, 2, 3, 5):
        cfg = Configuration(kappa=1, offset=1,
                            cells=tuple([1] * length + [0] * (4 * length)))
        out = apply_Ti_direct(cfg, 1)
        positions = [n for n in range(out.n_min, out.n_max + 1) if out.cell(n) == 1]
        assert positions == list(range(1 + length, 2 * length + 1))


def test_one_color_intro_soliton_collision():
    # three-ball soliton overtakes the single ball and recovers its shape
    cells = [0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]
    cfg = make_config(1, cells)
    states = [cfg]
    for _ in range(4):
        states.append(apply_Ti_direct(states[-1], 1))
    shown = [
        "011100000010000000000",
        "000011100001000000000",
        "000000011100100000000",
        "000000000011011000000",
        "000000000000100111000",
    ]
    for state, line in zip(states, shown):
        got = "".join(str(state.cell(n)) for n in range(1, 22))
        assert got == line


@pytest.mark.parametrize("kappa,max_len", [(1, 9), (2, 7), (3, 5)])
def test_carrier_forms_agree_exhaustively(kappa, max_len):
    # both carrier constructions, every window up to max_len
    for length in range(max_len + 1):
        for cells in itertools.product(range(kappa + 1), repeat=length):
            cfg = Configuration(kappa=kappa, offset=1, cells=cells)
            path = encode(cfg)
            for i in range(1, kappa + 1):
                assert run_carrier(cfg, i) == carrier_from_heights(path, i)


def test_carrier_forms_agree_on_long_random(rng):
    for _ in range(300):
        kappa = int(rng.integers(1, 4))
        cells = rng.integers(0, kappa + 1, size=200)
        cfg = make_config(kappa, cells, offset=int(rng.integers(-100, 100)))
        i = int(rng.integers(1, kappa + 1))
        assert run_carrier(cfg, i) == carrier_from_heights(encode(cfg), i)
