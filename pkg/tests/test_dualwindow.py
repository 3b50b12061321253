import csv
from fractions import Fraction as F

import numpy as np
import pytest

from b2gabor.splinecore import LatticeParams, eval_b2
from b2gabor.dualsystem import build_G
from b2gabor.dualwindow import (SingularSystemError, boundary_limits,
                                build_dual, cramer_h, cramer_h_shifted,
                                discontinuity_report, solve_dual_at)
from tests_support import sample_gamma3, sample_lambda3

GAMMA3_PT = LatticeParams("3/10", "3/2")


def test_solve_m1_center():
    p = LatticeParams("1/2", "3/4")
    G = build_G(1, p)
    assert solve_dual_at(F(0), G) == [F(3, 4)]  # h(0) = b / w(0) = b


def test_solve_frozen_vector():
    # exact solution of the 5x5 system at x = -1/10 for (3/10, 3/2)
    G = build_G(3, GAMMA3_PT)
    v = solve_dual_at(F(-1, 10), G)
    assert v == [F(675, 674), F(-7425, 1348), F(2760, 337), F(-2415, 674), F(0)]


def test_solve_last_component_vanishes(rng):
    G = build_G(3, GAMMA3_PT)
    a = GAMMA3_PT.a
    for _ in range(25):
        x = -a / 2 + F(rng.randint(1, 999), 1000) * (a / 2)
        assert solve_dual_at(x, G)[-1] == 0


def test_solve_satisfies_duality_rows(rng):
    # substituting the solved vector back into each row is the oracle
    p = GAMMA3_PT
    G = build_G(3, p)
    a, b = p.a, p.b
    for _ in range(10):
        x = -a / 2 + F(rng.randint(1, 999), 1000) * (a / 2)
        v = solve_dual_at(x, G)
        for l in range(-2, 3):
            s = sum(eval_b2(x - l / b + k * a) * v[k + 2] for k in range(-2, 3))
            assert s == (b if l == 0 else 0)


def test_cramer_matches_solve(rng):
    G = build_G(3, GAMMA3_PT)
    a = GAMMA3_PT.a
    for _ in range(10):
        x = -a / 2 + F(rng.randint(1, 999), 1000) * (a / 2)
        v = solve_dual_at(x, G)
        assert cramer_h(x, G) == v[2]
        assert cramer_h_shifted(x, G) == v[3]


def test_cramer_requires_m3():
    with pytest.raises(ValueError):
        cramer_h(F(0), build_G(1, LatticeParams("1/2", "3/4")))


# ---------------------------------------------------------------------------
# assembled window
# ---------------------------------------------------------------------------

def test_build_dual_support_and_evenness():
    p = LatticeParams("1/4", "3/2")
    h = build_dual(3, p)
    assert h.support_radius == F(5, 8)
    assert h(F(7, 10)) == 0 and h(F(-7, 10)) == 0
    # evenness holds away from the jump set; the right-limit convention at
    # the half-cell points deliberately picks one side there
    jumps = {d.location for d in h.discontinuities} | {-d.location for d in h.discontinuities}
    for i in range(80):
        x = F(i, 80) * h.support_radius
        if x in jumps:
            continue
        assert h(x) == h(-x)
    assert h.bound() < 1e3


def test_build_dual_m1_closed_form():
    p = LatticeParams("1/2", "3/4")
    h = build_dual(1, p)
    assert h(F(0)) == F(3, 4)
    assert h(F(1, 4)) == 1 and h(F(-1, 4)) == 1
    for i in range(1, 20):
        x = F(i, 80)  # inside (0, a/2)
        assert h(x) == F(3, 4) / eval_b2(x)


def test_build_dual_m2_prop2d_point():
    p = LatticeParams("1/8", "3/2")
    h = build_dual(2, p)
    assert h.support_radius == F(3, 16)
    jumps = {d.location for d in h.discontinuities} | {-d.location for d in h.discontinuities}
    for i in range(20):
        x = F(i, 20) * h.support_radius
        if x not in jumps:
            assert h(x) == h(-x)


def test_dual_vanishes_on_inner_gap_not_outer():
    # the solved system forces h = 0 on (3a/2, 2a]; the printed claim that it
    # vanishes on (2a, 5a/2) contradicts the system itself (see ledger)
    h = build_dual(3, GAMMA3_PT)
    a = F(GAMMA3_PT.a)
    for t in (F(5, 10), F(52, 100), F(55, 100), F(6, 10)):
        assert 3 * a / 2 < t <= 2 * a
        assert h(t) == 0 and h(-t) == 0
    assert h(F(65, 100)) == F(3, 17)   # strictly inside (2a, 5a/2)
    assert h(F(7, 10)) == F(675, 674)


def test_dual_zero_interval_endpoints():
    # outer vanishing stretch is [1 - 2/b - a, -3a/2) and its mirror
    p = GAMMA3_PT
    a, b = F(p.a), F(p.b)
    h = build_dual(3, p)
    edge = 1 - 2 / b - a  # = -19/30
    assert h(edge) == 0
    assert h(edge - F(1, 100)) != 0
    assert h(-edge - F(1, 1000)) == 0  # just inside the mirrored stretch


def test_duality_identity_across_support(rng):
    p = GAMMA3_PT
    a, b = F(p.a), F(p.b)
    h = build_dual(3, p)
    for _ in range(30):
        x = -a / 2 + F(rng.randint(1, 1999), 2000) * a
        for l in range(-2, 3):
            s = sum(eval_b2(x - l / b + k * a) * h(x + k * a) for k in range(-2, 3))
            assert s == (b if l == 0 else 0)


def test_random_certified_points_build(rng):
    for sampler in (sample_gamma3, sample_lambda3):
        for _ in range(3):
            p = sampler(rng)
            h = build_dual(3, p)
            a, b = F(p.a), F(p.b)
            x = -a / 2 + F(7, 16) * a
            s = sum(eval_b2(x + k * a) * h(x + k * a) for k in range(-2, 3))
            assert s == b


# ---------------------------------------------------------------------------
# discontinuities
# ---------------------------------------------------------------------------

def test_jump_at_half_a_matches_block_limits():
    p = GAMMA3_PT
    G = build_G(3, p)
    h = build_dual(3, p)
    a = F(p.a)
    left, right = boundary_limits(G)
    assert left == F(-4345, 1149) and right == F(11455, 1149)
    at = {d.location: d for d in discontinuity_report(h)}
    assert -a / 2 in at
    assert at[-a / 2].left == left and at[-a / 2].right == right
    # mirrored jump at +a/2
    assert at[a / 2].left == right and at[a / 2].right == left


def test_jumps_mirror(rng):
    for _ in range(3):
        p = sample_gamma3(rng)
        h = build_dual(3, p)
        discs = {d.location: d for d in h.discontinuities}
        for loc, d in discs.items():
            assert -loc in discs
            assert discs[-loc].left == d.right and discs[-loc].right == d.left


def test_m1_no_interior_jumps():
    h = build_dual(1, LatticeParams("1/2", "3/4"))
    a = F(1, 2)
    assert all(abs(d.location) >= a / 2 for d in h.discontinuities)


def test_obstruction_point_has_no_bounded_dual():
    with pytest.raises(SingularSystemError):
        build_dual(3, LatticeParams("2/7", "7/4"))


def test_solve_guard_outside_domain():
    G = build_G(3, GAMMA3_PT)
    with pytest.raises(ValueError):
        solve_dual_at(F(1), G)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def test_csv_export(tmp_path):
    h = build_dual(3, GAMMA3_PT, resolution=64)
    out = tmp_path / "dual.csv"
    h.write_csv(out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "h", "piece_index", "is_discontinuity_adjacent"]
    assert len(rows) == 66  # header + resolution + 1 samples
    xs = [float(r[0]) for r in rows[1:]]
    assert xs[0] == -0.75 and xs[-1] == 0.75


def test_float_mode_build():
    p = LatticeParams(0.3, 1.5)
    h = build_dual(3, p)
    xs = np.random.default_rng(13).uniform(-0.74, 0.74, 200)
    for x in xs:
        assert abs(h(float(x)) - h(float(-x))) <= 1e-12
