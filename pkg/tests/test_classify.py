import numpy as np
import pytest

from boxball.carrier import run_carrier
from boxball.classify import (example_a_epoch_ends, example_config, good_set_check,
                              reversibility_report, subcriticality_ratio)
from boxball.decision import Decision
from boxball.dynamics import apply_Ti, apply_word
from boxball.lattice import Boundary, Configuration, decode, encode, make_config
from boxball.sampling import ColorLaw, sample_iid


def test_reversibility_finite_support_always_yes():
    path = encode(make_config(2, [1, 2, 0, 0, 1, 0]))
    rep = reversibility_report(path, 1)
    assert rep.exact
    assert rep.forward_then_back is Decision.YES
    assert rep.back_then_forward is Decision.YES
    assert rep.reversible is Decision.YES


def test_reversibility_all_empty():
    rep = reversibility_report(encode(Configuration(kappa=2, offset=1, cells=())), 1)
    assert rep.reversible is Decision.YES
    assert rep.m0 == 0 and rep.i0 == 0


def test_reversibility_windowed_undecidable():
    # a window that never re-attains its running sup still cannot decide
    cfg = make_config(2, [1, 1, 1, 0], boundary=Boundary.WINDOWED)
    rep = reversibility_report(encode(cfg), 1)
    assert not rep.exact
    assert rep.forward_then_back is Decision.UNDECIDABLE
    assert rep.reversible is Decision.UNDECIDABLE


def test_ratio_all_empty_is_one():
    idx, ratios = subcriticality_ratio(encode(Configuration(kappa=1, offset=1,
                                                            cells=(0,) * 10)), 1)
    past_anchor = idx >= 1
    assert np.allclose(ratios[past_anchor], 1.0)
    assert np.isnan(ratios[idx == 0])  # running sup still 0 at the anchor


def test_ratio_horizon_restriction():
    path = encode(make_config(1, [0] * 20))
    idx, ratios = subcriticality_ratio(path, 1, horizon=(5, 10))
    assert idx.tolist() == list(range(5, 11))
    assert np.allclose(ratios, 1.0)


def test_iid_sample_ratio_near_one():
    law = ColorLaw(2, (0.5, 0.3, 0.2))
    cfg = sample_iid(law, (-10 ** 5, 10 ** 5), seed=2024)
    path = encode(cfg)
    for i in (1, 2):
        idx, ratios = subcriticality_ratio(path, i)
        assert abs(ratios[-1] - 1.0) < 0.05


def test_iid_sample_good_set():
    law = ColorLaw(2, (0.5, 0.3, 0.2))
    cfg = sample_iid(law, (-10 ** 5, 10 ** 5), seed=99)
    rep = good_set_check(encode(cfg))
    assert rep.all_good
    assert all(rep.positive.values()) and all(rep.negative.values())


def test_all_empty_good():
    rep = good_set_check(encode(make_config(2, [0, 0, 0])))
    assert rep.all_good


# ---------------------------------------------------------------------------
# example family (a): sub-critical per color, but the color scales separate
# ---------------------------------------------------------------------------


def test_example_a_expansion():
    cfg = example_config("a", 2)
    want = (0, 0, 2, 0, 1, 0, 0, 1, 0, 1, 0, 2, 2, 2, 0, 1, 0, 1, 0, 1)
    assert cfg.cells[:20] == want
    assert cfg.offset == 0
    assert cfg.boundary is Boundary.FINITE_SUPPORT


def test_example_a_epoch_ends():
    ends = example_a_epoch_ends(3)
    assert ends.tolist() == [9, 28, 57]
    cfg = example_config("a", 3)
    assert cfg.offset + len(cfg.cells) - 1 == 57


def test_example_a_pre_ratios_healthy():
    path = encode(example_config("a", 40))
    for i in (1, 2):
        _, ratios = subcriticality_ratio(path, i)
        assert ratios[-1] > 0.9


def test_example_a_ratio_after_t2_dips_to_half():
    epochs = 40
    path = encode(example_config("a", epochs))
    t2 = apply_Ti(path, 2)
    idx, ratios = subcriticality_ratio(t2, 1)
    lookup = dict(zip(idx.tolist(), ratios.tolist()))
    end_ratios = [lookup[int(n)] for n in example_a_epoch_ends(epochs)]
    assert sum(1 for r in end_ratios if r < 0.6) >= epochs - 5
    assert abs(end_ratios[-1] - 0.5) < 0.05
    rep = good_set_check(t2)
    assert rep.positive[1] is False


def test_example_a_carrier_unbounded():
    epochs = 30
    cfg = example_config("a", epochs)
    loads = run_carrier(cfg, 2).loads
    ends = example_a_epoch_ends(epochs)
    per_epoch = [int(loads[:e].max()) for e in ends]
    assert per_epoch == [2 * m - 1 for m in range(1, epochs + 1)]


# ---------------------------------------------------------------------------
# example families (b) and (c): periodic windows
# ---------------------------------------------------------------------------


def test_example_b_window_and_action():
    cfg = example_config("b", 4)
    mid = cfg.cells_range(-5, 6)
    assert mid == (0, 1, 2, 0, 1, 2, 0, 2, 1, 0, 1, 2)
    t2 = decode(apply_Ti(encode(cfg), 2, assume_empty_left_tail=True))
    # interior: repeating (210) with the defect block mapped to (201)
    interior = t2.cells_range(-2, 9)
    assert interior == (2, 1, 0, 2, 0, 1, 2, 1, 0, 2, 1, 0)


def test_example_c_pattern():
    cfg = example_config("c", 2)
    assert cfg.cells == (0, 1, 2) * 5
    assert cfg.cells_range(1, 3) == (0, 1, 2)


def test_example_c_closed_under_words():
    # every short word keeps the interior repeating (012) or (021), up to
    # cyclic phase
    words = [(1,), (2,), (1, 2), (2, 1), (1, 2, 1), (2, 2), (1, 1, 2, 2)]
    for word in words:
        cfg = example_config("c", 30)
        path = encode(cfg)
        out = decode(apply_word(path, word, assume_empty_left_tail=True))
        margin = 15
        interior = "".join(map(str, out.cells[margin:-margin]))
        candidates = ["012" * 60, "021" * 60]
        assert any(interior in c for c in candidates), (word, interior[:30])


def test_example_unknown_name():
    with pytest.raises(ValueError):
        example_config("z", 3)
    with pytest.raises(ValueError):
        example_config("a", 0)
