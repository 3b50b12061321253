import json
import random
from fractions import Fraction as F

import numpy as np
import pytest

from b2gabor.splinecore import LatticeParams, PiecewisePoly
from b2gabor.dualsystem import build_G, reduce_to_block
from b2gabor.certify import (certify_nonvanishing, certify_params,
                             certify_system, check_closed_forms,
                             count_roots_open, det_piecewise, deter1_printed,
                             gamma3_case_label, isolate_roots, minor_report)
from tests_support import sample_gamma3, sample_lambda3


def _identity_pp(n, lo, hi):
    one = PiecewisePoly.constant(1, lo, hi)
    zero = PiecewisePoly.zero(lo, hi)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def test_det_identity_matrix():
    det = det_piecewise(_identity_pp(4, F(0), F(1)))
    assert det.pieces == ((F(1),),)


def test_det_matches_numeric_exact(rng):
    p = LatticeParams("3/10", "3/2")
    G = build_G(3, p)
    D, _, _ = reduce_to_block(G)
    det = det_piecewise(D)
    a = p.a
    for _ in range(200):
        x = -a / 2 + F(rng.randint(0, 1000), 1000) * (a / 2)
        M = [[e(x) for e in row] for row in D]
        expected = _det4_fraction(M)
        assert det(x) == expected


def _det4_fraction(M):
    # independent textbook Laplace expansion along the first row
    def det3(R):
        return (R[0][0] * (R[1][1] * R[2][2] - R[1][2] * R[2][1])
                - R[0][1] * (R[1][0] * R[2][2] - R[1][2] * R[2][0])
                + R[0][2] * (R[1][0] * R[2][1] - R[1][1] * R[2][0]))
    total = 0
    for j in range(4):
        sub = [[M[r][c] for c in range(4) if c != j] for r in range(1, 4)]
        total += (-1) ** j * M[0][j] * det3(sub)
    return total


def test_det_matches_numeric_float():
    p = LatticeParams(0.3, 1.5)
    G = build_G(3, p)
    D, _, _ = reduce_to_block(G)
    det = det_piecewise(D)
    xs = np.random.default_rng(11).uniform(-0.15, 0.0, 1000)
    for x in xs:
        M = np.array([[e(float(x)) for e in row] for row in D], dtype=float)
        want = float(np.linalg.det(M))
        got = det(float(x))
        assert abs(got - want) <= 1e-12 * max(abs(want), 1.0)


# ---------------------------------------------------------------------------
# exact root isolation
# ---------------------------------------------------------------------------

def test_count_roots_basic():
    # x^2 - 2 on (0, 2): one root
    assert count_roots_open([F(-2), F(0), F(1)], F(0), F(2)) == 1
    # (x - 1/3)^2: double root counted once
    sq = [F(1, 9), F(-2, 3), F(1)]
    assert count_roots_open(sq, F(0), F(1)) == 1
    # no roots
    assert count_roots_open([F(1), F(0), F(1)], F(-1), F(1)) == 0
    # endpoint roots are excluded from the open count
    assert count_roots_open([F(0), F(1)], F(0), F(1)) == 0


def test_isolate_roots_locations():
    roots = isolate_roots([F(-2), F(0), F(1)], F(0), F(2))
    assert len(roots) == 1
    assert abs(roots[0] - 2 ** 0.5) < 1e-10
    # cubic with three rational roots in (-1, 1)
    # (x + 1/2) x (x - 1/2) = x^3 - x/4
    roots = isolate_roots([F(0), F(-1, 4), F(0), F(1)], F(-1), F(1))
    assert len(roots) == 3
    assert max(abs(r - e) for r, e in zip(roots, (-0.5, 0.0, 0.5))) < 1e-10


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def test_certify_gamma3_example():
    cert = certify_params(LatticeParams("3/10", "3/2"))
    assert cert.overall and cert.certified
    assert cert.case_label == "Gamma3[a in (2/7, 1/3]]"
    assert all(p.status == "strictly-positive" for p in cert.per_piece)


def test_certify_lambda3_example():
    cert = certify_params(LatticeParams("3/5", "23/20"))
    assert cert.overall and cert.certified
    assert cert.case_label == "Lambda3"


def test_certify_endpoint_root_flagged_not_fatal():
    det = PiecewisePoly(F(-1, 10), F(0), [], [[F(0), F(1)]])  # det = x
    cert = certify_nonvanishing(det)
    assert cert.overall
    assert cert.endpoint_roots == (0.0,)


def test_certify_interior_root_fails():
    det = PiecewisePoly(F(-1, 10), F(0), [], [[F(1, 20), F(1)]])  # root at -1/20
    cert = certify_nonvanishing(det)
    assert not cert.overall
    bad = [p for p in cert.per_piece if p.status == "vanishes"]
    assert len(bad) == 1 and abs(bad[0].interior_roots[0] + 0.05) < 1e-10


def test_certify_identically_zero_piece_fails():
    det = PiecewisePoly(F(0), F(1), [F(1, 2)], [[F(0)], [F(1)]])
    cert = certify_nonvanishing(det)
    assert not cert.overall
    assert cert.per_piece[0].status == "identically-zero"


def test_certificate_json_roundtrip():
    cert = certify_params(LatticeParams("3/10", "3/2"))
    doc = json.loads(cert.to_json())
    assert doc["overall_nonvanishing"] is True
    assert doc["certified"] is True
    assert doc["params"]["a"] == "3/10"
    assert len(doc["pieces"]) == len(doc["partition"]) - 1


def test_float_mode_certificate_not_certified():
    cert = certify_params(LatticeParams(0.3, 1.5))
    assert cert.overall
    assert not cert.certified


def test_obstruction_point_boundary_root():
    # the known non-frame rational point sits on the strip edge: the system
    # determinant vanishes exactly at x = -a/2 and nowhere inside
    cert = certify_system(3, LatticeParams("2/7", "7/4"))
    assert cert.overall
    assert len(cert.endpoint_roots) == 1
    assert abs(cert.endpoint_roots[0] + 1 / 7) < 1e-12


# ---------------------------------------------------------------------------
# printed closed forms (a <= 2/13)
# ---------------------------------------------------------------------------

def test_closed_forms_first_segment_off_by_minus_one_over_b():
    p = LatticeParams("1/10", "7/4")
    rep = check_closed_forms(p)
    assert rep.second_segment.matches          # the factored second form is right
    assert not rep.first_segment.matches       # the printed first form is not
    assert rep.first_segment.ratio == -F(4, 7)  # computed/printed = -1/b


def test_closed_forms_true_first_segment_relation(rng):
    # computed determinant == -(1/b) * printed form, coefficient by coefficient
    for _ in range(5):
        p = sample_gamma3(rng, a_hi=F(2, 13), a_hi_open=False)
        rep = check_closed_forms(p)
        printed = deter1_printed(p)
        scaled = [-c / F(p.b) for c in printed]
        comp = list(rep.first_segment.computed)
        n = max(len(scaled), len(comp))
        scaled += [F(0)] * (n - len(scaled))
        comp += [F(0)] * (n - len(comp))
        assert comp == scaled
        assert rep.second_segment is None or rep.second_segment.matches


def test_closed_forms_boundary_a():
    # at a = 2/13 the band is (13/8, 26/15]; 1.73 is inside, 1.74 is not
    rep = check_closed_forms(LatticeParams("2/13", "173/100"))
    assert rep.second_segment.matches
    assert rep.first_segment.ratio == -F(1) / F(173, 100)


def test_closed_forms_guard():
    with pytest.raises(ValueError):
        check_closed_forms(LatticeParams("3/10", "3/2"))  # a > 2/13
    with pytest.raises(ValueError):
        check_closed_forms(LatticeParams("1/10", "5/4"))  # below the band


def test_gamma3_case_labels():
    assert gamma3_case_label(F(1, 10)) == "(0, 2/13]"
    assert gamma3_case_label(F(2, 13)) == "(0, 2/13]"
    assert gamma3_case_label(F(1, 5)) == "[1/5, 2/9]"
    assert gamma3_case_label(F(23, 100)) == "(2/9, 1/4]"
    assert gamma3_case_label(F(26, 100)) == "(1/4, 4/15]"
    assert gamma3_case_label(F(27, 100)) == "(4/15, 2/7]"
    assert gamma3_case_label(F(3, 10)) == "(2/7, 1/3]"
    assert gamma3_case_label(F(35, 100)) == "(1/3, 2/5)"
    assert gamma3_case_label(F(2, 5)) == "[2/5, 1/2)"
    assert gamma3_case_label(F(1, 2)) is None


# ---------------------------------------------------------------------------
# minor inequalities on the wide band
# ---------------------------------------------------------------------------

def test_minor_report_example():
    rep = minor_report(LatticeParams("3/5", "23/20"), F(-1, 10))
    assert rep.ok
    assert rep.d32 > 0 and rep.d33 > 0 and rep.d34 > 0


def test_minor_report_zero_region():
    p = LatticeParams("3/5", "23/20")
    # 1/b - 1 = -3/23; inside [-a/2, -3/23] the third minor vanishes
    rep = minor_report(p, F(-1, 5))
    assert rep.ok and rep.d34 == 0
    rep = minor_report(p, F(-3, 23))
    assert rep.ok and rep.d34 == 0


def test_minor_report_boundary_equality():
    p = LatticeParams("3/5", "23/20")
    rep = minor_report(p, -F(p.a) / 2)
    assert rep.ok
    assert rep.entry_gaps[1] == 0  # w(x) = w(x+a) exactly at x = -a/2


def test_minor_report_random_lambda3(rng):
    for _ in range(10):
        p = sample_lambda3(rng)
        a = F(p.a)
        for _ in range(5):
            x = -a / 2 + F(rng.randint(0, 100), 100) * (a / 2)
            rep = minor_report(p, x)
            assert rep.ok, (p, x, rep.checks)


def test_minor_report_guard():
    with pytest.raises(ValueError):
        minor_report(LatticeParams("3/10", "3/2"), F(-1, 10))  # narrow band


# ---------------------------------------------------------------------------
# the construction gap: a published claim the certificates refute
# ---------------------------------------------------------------------------

def test_construction_gap_counterexample():
    # (1/4, 8/5) sits inside the printed narrow band, yet the block
    # determinant vanishes at an interior point; the exact certificate must
    # find exactly one root near -0.12008 (a simple root of an irreducible
    # quartic, confirmed symbolically and by a sign change of the raw
    # floating determinant)
    from b2gabor.certify import in_construction_gap
    from b2gabor.frameset import in_gamma3

    p = LatticeParams("1/4", "8/5")
    assert in_gamma3(p)
    assert in_construction_gap(p)
    cert = certify_params(p)
    assert not cert.overall
    roots = [r for pc in cert.per_piece for r in pc.interior_roots]
    assert len(roots) == 1
    assert abs(roots[0] + 0.1200761136) < 1e-9


def test_construction_gap_membership_box():
    from b2gabor.certify import in_construction_gap
    assert in_construction_gap(LatticeParams("49/200", "641/400"))
    assert not in_construction_gap(LatticeParams("1/4", "3/2"))   # below the slice
    assert not in_construction_gap(LatticeParams("3/10", "8/5"))  # outside in a


def test_construction_gap_point_still_shows_frame_spectrum():
    # the failure is about the short-support dual, not the frame property:
    # the independent spectral route stays bounded away from zero
    from b2gabor.zibulski import rank_sweep
    p = LatticeParams("1/4", "8/5")
    coarse = rank_sweep(p, 80, 80)
    fine = rank_sweep(p, 160, 160)
    assert coarse.A_est > 2e-2 and fine.A_est > 2e-2
    assert abs(fine.A_est - coarse.A_est) < 0.1 * coarse.A_est
