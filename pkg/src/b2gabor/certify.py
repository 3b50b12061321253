"""Nonvanishing certificates for piecewise-polynomial determinants.

The invertibility of the duality system on the certified bands reduces to a
single univariate fact: the determinant of a small matrix of affine pieces
has no root strictly inside [-a/2, 0].  In exact mode the determinant is
extracted per piece by cofactor expansion over rational coefficients and
roots are counted with Sturm sequences, so the certificate does not depend
on floating-point rounding.  In float mode roots come from companion-matrix
eigenvalues and the certificate is flagged non-certified.

The module also reproduces two printed closed forms for the narrowest band
(a <= 2/13) and the minor inequalities used on the wide band (a >= 1/2).
The first printed factorization disagrees with the actual determinant by a
constant factor -1/b at every sampled parameter; ``check_closed_forms``
reports the discrepancy rather than reconciling it (the determinant itself,
which is what certificates consume, is positive there).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .splinecore import (LatticeParams, PiecewisePoly, poly_add, poly_deriv,
                         poly_eval, poly_is_zero, poly_mul, poly_neg,
                         poly_scale, shifted_b2_as_pp)
from .dualsystem import build_G, reduce_to_block

FLOAT_ROOT_TOL = 1e-10


# ---------------------------------------------------------------------------
# determinants of piecewise-polynomial matrices
# ---------------------------------------------------------------------------

def _dense_det(rows) -> list:
    """Determinant of a square matrix of coefficient lists, cofactor expansion.

    Expands along the row or column with the most zero entries; the matrices
    here are banded, so this keeps the term count small.
    """
    n = len(rows)
    if n == 1:
        return list(rows[0][0])
    zero_rows = [sum(poly_is_zero(p) for p in r) for r in rows]
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    zero_cols = [sum(poly_is_zero(p) for p in c) for c in cols]
    det = [0]
    if max(zero_rows) >= max(zero_cols):
        i = zero_rows.index(max(zero_rows))
        for j in range(n):
            if poly_is_zero(rows[i][j]):
                continue
            sub = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            term = poly_mul(rows[i][j], _dense_det(sub))
            det = poly_add(det, term if (i + j) % 2 == 0 else poly_neg(term))
    else:
        j = zero_cols.index(max(zero_cols))
        for i in range(n):
            if poly_is_zero(rows[i][j]):
                continue
            sub = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            term = poly_mul(rows[i][j], _dense_det(sub))
            det = poly_add(det, term if (i + j) % 2 == 0 else poly_neg(term))
    return det


def det_piecewise(matrix) -> PiecewisePoly:
    """Determinant of a square matrix of PiecewisePoly on the common domain.

    Exact mode: per-piece cofactor expansion in rational arithmetic.
    Float mode: interpolation of the numeric determinant at Chebyshev nodes
    (degree + 1 of them per piece).
    """
    n = len(matrix)
    entries = [p for row in matrix for p in row]
    exact = entries[0].exact
    lo = max(p.lo for p in entries)
    hi = min(p.hi for p in entries)
    if not lo < hi:
        raise ValueError("matrix entries have no common domain")
    bps = sorted({t for p in entries for t in p.breakpoints if lo < t < hi})
    if not exact:
        merged = []
        for t in bps:
            if merged and abs(t - merged[-1]) <= 1e-14:
                continue
            merged.append(t)
        bps = merged
    knots = [lo, *bps, hi]
    pieces = []
    for u, v in zip(knots[:-1], knots[1:]):
        mid = (u + v) / 2
        cell = [[list(matrix[i][j].pieces[matrix[i][j].piece_index(mid)])
                 for j in range(n)] for i in range(n)]
        if exact:
            pieces.append(_dense_det(cell))
        else:
            deg = sum(max(len(c) - 1 for c in row) for row in cell)
            ks = np.arange(deg + 1)
            nodes = 0.5 * (u + v) + 0.5 * (v - u) * np.cos(np.pi * (2 * ks + 1) / (2 * deg + 2))
            vals = [float(np.linalg.det(np.array(
                [[poly_eval(cell[i][j], t) for j in range(n)] for i in range(n)],
                dtype=float))) for t in nodes]
            coeffs = np.polynomial.polynomial.polyfit(nodes, vals, deg)
            pieces.append(list(coeffs))
    return PiecewisePoly(lo, hi, bps, pieces, exact=exact)


# ---------------------------------------------------------------------------
# exact root isolation (Sturm sequences on rational coefficients)
# ---------------------------------------------------------------------------

def _poly_divmod(num: list, den: list):
    num = list(num)
    out = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and not poly_is_zero(num):
        d = len(num) - len(den)
        c = num[-1] / den[-1]
        out[d] = c
        for i, v in enumerate(den):
            num[i + d] -= c * v
        while len(num) > 1 and num[-1] == 0:
            num.pop()
    return out, num


def _poly_gcd(p: list, q: list) -> list:
    a, b = list(p), list(q)
    while not poly_is_zero(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if poly_is_zero(a):
        return [Fraction(1)]
    return poly_scale(a, 1 / a[-1])


def sturm_chain(p: list) -> list:
    chain = [list(p), poly_deriv(p)]
    while not poly_is_zero(chain[-1]) and len(chain[-1]) > 1:
        _, r = _poly_divmod(chain[-2], chain[-1])
        if poly_is_zero(r):
            break
        chain.append(poly_neg(r))
    if poly_is_zero(chain[-1]):
        chain.pop()
    return chain


def _sign_variations(chain, x) -> int:
    signs = []
    for p in chain:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots_open(p: list, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi).

    Endpoint roots are deflated first, so p(lo) = 0 or p(hi) = 0 is allowed.
    """
    sqf = _poly_divmod(p, _poly_gcd(p, poly_deriv(p)))[0] if len(p) > 2 else list(p)
    for endpoint in (lo, hi):
        while len(sqf) > 1 and poly_eval(sqf, endpoint) == 0:
            sqf, _ = _poly_divmod(sqf, [-endpoint, Fraction(1)])
    if len(sqf) <= 1:
        return 0
    chain = sturm_chain(sqf)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def isolate_roots(p: list, lo: Fraction, hi: Fraction, refine: float = 1e-12) -> list[float]:
    """Approximate locations of the distinct roots of p inside (lo, hi)."""
    total = count_roots_open(p, lo, hi)
    if total == 0:
        return []
    out = []
    stack = [(Fraction(lo), Fraction(hi), total)]
    while stack:
        u, v, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            while float(v - u) > refine:
                mid = (u + v) / 2
                left = count_roots_open(p, u, mid)
                if poly_eval(p, mid) == 0:
                    u = v = mid
                    break
                if left == 1:
                    v = mid
                else:
                    u = mid
            out.append(float((u + v) / 2))
            continue
        mid = (u + v) / 2
        if poly_eval(p, mid) == 0:
            out.append(float(mid))
        nl = count_roots_open(p, u, mid)
        nr = count_roots_open(p, mid, v)
        stack.append((u, mid, nl))
        stack.append((mid, v, nr))
    return sorted(out)


def _roots_float(p: list, lo: float, hi: float, tol: float = FLOAT_ROOT_TOL) -> list[float]:
    coeffs = np.array([float(v) for v in p][::-1])
    nz = np.flatnonzero(np.abs(coeffs) > 0)
    if nz.size == 0 or coeffs.size - nz[-1] == coeffs.size:
        return []
    coeffs = coeffs[nz[0]:]
    if coeffs.size <= 1:
        return []
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= tol].real
    return sorted(float(r) for r in real if lo - tol <= r <= hi + tol)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

# Empirical gap in the printed case analysis, found and bisected by these
# certificates: for a in roughly (0.2344, 0.2546) with b in the top
# sixteenth of the narrow band, the block determinant has a genuine interior
# root (e.g. (1/4, 8/5) at x ~ -0.12008, an irreducible quartic's root where
# the system is rank-deficient and inconsistent).  No bounded dual supported
# on [-5a/2, 5a/2] exists there, although the spectral sweep still shows
# frame behaviour at the rational corner (lower bound ~2.4e-2).  The
# certificates, not this box, are the source of truth; the box is a
# conservative hull for reporting.
CONSTRUCTION_GAP_A = (Fraction(234, 1000), Fraction(255, 1000))
CONSTRUCTION_GAP_BAND_FRACTION = Fraction(7, 8)


def in_construction_gap(params: LatticeParams) -> bool:
    """Conservative membership test for the known certificate-failure sliver."""
    a, b = params.a, params.b
    lo_a, hi_a = CONSTRUCTION_GAP_A
    if not lo_a <= a <= hi_a:
        return False
    lo_b = 4 / (2 + 3 * a)
    hi_b = 2 / (1 + a)
    return b >= lo_b + (hi_b - lo_b) * CONSTRUCTION_GAP_BAND_FRACTION


GAMMA3_A_CASES = (
    ("(0, 2/13]", None, Fraction(2, 13), False, True),
    ("(2/13, 1/5)", Fraction(2, 13), Fraction(1, 5), False, False),
    ("[1/5, 2/9]", Fraction(1, 5), Fraction(2, 9), True, True),
    ("(2/9, 1/4]", Fraction(2, 9), Fraction(1, 4), False, True),
    ("(1/4, 4/15]", Fraction(1, 4), Fraction(4, 15), False, True),
    ("(4/15, 2/7]", Fraction(4, 15), Fraction(2, 7), False, True),
    ("(2/7, 1/3]", Fraction(2, 7), Fraction(1, 3), False, True),
    ("(1/3, 2/5)", Fraction(1, 3), Fraction(2, 5), False, False),
    ("[2/5, 1/2)", Fraction(2, 5), Fraction(1, 2), True, False),
)


def gamma3_case_label(a) -> str | None:
    a = Fraction(a) if not isinstance(a, float) else a
    for label, lo, hi, lo_closed, hi_closed in GAMMA3_A_CASES:
        if lo is None:
            below = a > 0
        else:
            below = a >= lo if lo_closed else a > lo
        above = a <= hi if hi_closed else a < hi
        if below and above:
            return label
    return None


@dataclass(frozen=True)
class PieceStatus:
    lo: object
    hi: object
    coeffs: tuple
    status: str               # "strictly-positive" | "strictly-negative" | "vanishes" | "identically-zero"
    interior_roots: tuple = ()
    endpoint_roots: tuple = ()


@dataclass(frozen=True)
class DetCertificate:
    params: LatticeParams | None
    partition: tuple
    per_piece: tuple[PieceStatus, ...]
    overall: bool
    certified: bool           # exact arithmetic was used end to end
    case_label: str | None
    endpoint_roots: tuple = ()

    def to_json(self) -> str:
        def num(v):
            if isinstance(v, Fraction):
                return str(v)
            return format(float(v), ".17g")

        doc = {
            "params": None if self.params is None else
            {"a": num(self.params.a), "b": num(self.params.b),
             "exact": self.params.exact},
            "case_label": self.case_label,
            "partition": [num(t) for t in self.partition],
            "pieces": [
                {"interval": [num(p.lo), num(p.hi)],
                 "coeffs": [num(c) for c in p.coeffs],
                 "status": p.status,
                 "interior_roots": [format(r, ".17g") for r in p.interior_roots],
                 "endpoint_roots": [format(r, ".17g") for r in p.endpoint_roots]}
                for p in self.per_piece],
            "endpoint_roots": [format(r, ".17g") for r in self.endpoint_roots],
            "overall_nonvanishing": self.overall,
            "certified": self.certified,
        }
        return json.dumps(doc, indent=2)


def certify_nonvanishing(det: PiecewisePoly,
                         params: LatticeParams | None = None,
                         case_label: str | None = None) -> DetCertificate:
    """Certify that det has no root strictly inside its domain.

    Roots exactly at the domain endpoints are reported separately; they do
    not void the certificate (the underlying identity only needs to hold
    almost everywhere).  Never raises on mathematical content: failures are
    recorded in the certificate.
    """
    lo, hi = det.lo, det.hi
    statuses = []
    endpoint_roots = []
    ok = True
    knots = det.knots()
    for i, coeffs in enumerate(det.pieces):
        u, v = knots[i], knots[i + 1]
        if poly_is_zero(coeffs):
            statuses.append(PieceStatus(u, v, tuple(coeffs), "identically-zero"))
            ok = False
            continue
        # a root at a piece knot voids the certificate unless the knot is the
        # global domain boundary (measure-zero report there)
        if det.exact:
            interior = isolate_roots(list(coeffs), Fraction(u), Fraction(v))
            for t in (u, v):
                if poly_eval(coeffs, t) == 0:
                    if t == lo or t == hi:
                        endpoint_roots.append(float(t))
                    else:
                        interior = sorted({*interior, float(t)})
        else:
            found = _roots_float(list(coeffs), float(u), float(v))
            interior, boundary = [], []
            for r in found:
                if abs(r - float(lo)) <= FLOAT_ROOT_TOL or abs(r - float(hi)) <= FLOAT_ROOT_TOL:
                    boundary.append(r)
                else:
                    interior.append(r)
            endpoint_roots.extend(boundary)
        piece_endpoints = tuple(r for r in endpoint_roots
                                if abs(r - float(u)) < 1e-9 or abs(r - float(v)) < 1e-9)
        if interior:
            ok = False
            statuses.append(PieceStatus(u, v, tuple(coeffs), "vanishes",
                                        tuple(interior), piece_endpoints))
            continue
        mid = (u + v) / 2
        sign = poly_eval(coeffs, mid)
        status = "strictly-positive" if sign > 0 else "strictly-negative"
        statuses.append(PieceStatus(u, v, tuple(coeffs), status,
                                    endpoint_roots=piece_endpoints))
    return DetCertificate(params=params, partition=tuple(knots),
                          per_piece=tuple(statuses), overall=ok,
                          certified=det.exact, case_label=case_label,
                          endpoint_roots=tuple(sorted(set(endpoint_roots))))


def certify_params(params: LatticeParams) -> DetCertificate:
    """End-to-end certificate for the 4 x 4 block of G_3 on [-a/2, 0]."""
    from .frameset import in_gamma3, in_lambda3
    if in_gamma3(params):
        label = f"Gamma3[a in {gamma3_case_label(params.a)}]"
    elif in_lambda3(params):
        label = "Lambda3"
    else:
        raise ValueError(f"{params!r} outside the certified bands")
    G = build_G(3, params)
    D, corner, _ = reduce_to_block(G)
    det = det_piecewise(D)
    return certify_nonvanishing(det, params=params, case_label=label)


def certify_system(m: int, params: LatticeParams) -> DetCertificate:
    """Nonvanishing certificate for det G_m itself on [-a/2, 0] (any strip)."""
    G = build_G(m, params)
    a = params.a
    det = det_piecewise([[p.restrict(-a / 2, 0 * a) for p in row] for row in G.entries])
    return certify_nonvanishing(det, params=params, case_label=f"strip m={m}")


# ---------------------------------------------------------------------------
# printed closed forms for a in (0, 2/13]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentComparison:
    interval: tuple
    computed: tuple
    printed: tuple
    matches: bool
    ratio: object | None  # computed/printed when proportional, else None
    coeff_diffs: tuple


@dataclass(frozen=True)
class ClosedFormReport:
    params: LatticeParams
    split_point: object
    first_segment: SegmentComparison | None
    second_segment: SegmentComparison | None

    @property
    def both_match(self) -> bool:
        return all(s is None or s.matches
                   for s in (self.first_segment, self.second_segment))


def _compare_segment(det: PiecewisePoly, lo, hi, printed: list) -> SegmentComparison:
    seg = det.restrict(lo, hi)
    # the printed forms are single polynomials; the computed det must not
    # kink inside the stated interval
    if seg.breakpoints:
        raise AssertionError(f"determinant kinks inside stated interval [{lo}, {hi}]")
    computed = list(seg.pieces[0])
    n = max(len(computed), len(printed))
    comp = computed + [Fraction(0)] * (n - len(computed))
    prnt = list(printed) + [Fraction(0)] * (n - len(printed))
    diffs = tuple(c - p for c, p in zip(comp, prnt))
    matches = all(d == 0 for d in diffs)
    ratio = None
    if not matches and not poly_is_zero(prnt):
        ratios = {c / p for c, p in zip(comp, prnt) if p != 0}
        if len(ratios) == 1 and all(c == 0 for c, p in zip(comp, prnt) if p == 0):
            ratio = ratios.pop()
    return SegmentComparison(interval=(lo, hi), computed=tuple(comp),
                             printed=tuple(prnt), matches=matches,
                             ratio=ratio, coeff_diffs=diffs)


def deter1_printed(params: LatticeParams) -> list:
    """(4a/b)(bx - b + 2)[(1-b)x + a(1-b)], ascending coefficients."""
    a, b = Fraction(params.a), Fraction(params.b)
    return poly_scale(poly_mul([2 - b, b], [a * (1 - b), 1 - b]), 4 * a / b)


def deter2_printed(params: LatticeParams) -> PiecewisePoly:
    """(4a(b-1)(x+a)/b) * w(x + 2/b - 2a) as a piecewise polynomial."""
    a, b = Fraction(params.a), Fraction(params.b)
    lo, hi = -a / 2, Fraction(0)
    linear = PiecewisePoly(lo, hi, [], [[4 * a * (b - 1) * a / b, 4 * a * (b - 1) / b]])
    return linear * shifted_b2_as_pp(2 / b - 2 * a, lo, hi)


def check_closed_forms(params: LatticeParams) -> ClosedFormReport:
    """Compare the block determinant against the two printed closed forms.

    Applies on the narrowest band only: a in (0, 2/13].  The split point is
    1 - 2/b + a; the first form is compared on [-a/2, split), the second on
    [split, 0].  Comparison is per-coefficient; when the polynomials are
    proportional rather than equal the constant ratio is reported.
    """
    from .frameset import in_gamma3
    if not params.exact:
        raise ValueError("closed-form comparison requires exact (rational) lattice constants")
    if not in_gamma3(params) or not Fraction(params.a) <= Fraction(2, 13):
        raise ValueError("closed forms require a in (0, 2/13] inside the certified band")
    a, b = Fraction(params.a), Fraction(params.b)
    split = 1 - 2 / b + a
    G = build_G(3, params)
    D, _, _ = reduce_to_block(G)
    det = det_piecewise(D)
    first = second = None
    if split > -a / 2:
        first = _compare_segment(det, -a / 2, split if split < 0 else Fraction(0),
                                 deter1_printed(params))
    if split < 0:
        printed = deter2_printed(params)
        seg = det.restrict(split, Fraction(0))
        ref = printed.restrict(split, Fraction(0))
        matches = seg == ref
        ratio = None
        comp = seg.pieces[0]
        prnt = ref.pieces[0]
        second = SegmentComparison(interval=(split, Fraction(0)),
                                   computed=comp, printed=prnt,
                                   matches=matches, ratio=ratio,
                                   coeff_diffs=tuple(
                                       c - p for c, p in zip(comp, prnt)))
    return ClosedFormReport(params=params, split_point=split,
                            first_segment=first, second_segment=second)


# ---------------------------------------------------------------------------
# minor inequalities on the wide band (a >= 1/2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinorReport:
    params: LatticeParams
    x: object
    d32: object
    d33: object
    d34: object
    det: object
    entry_gaps: tuple        # (w(x) - w(x-a), w(x+a) - w(x))
    d34_zero_region: tuple   # [-a/2, 1/b - 1]
    checks: dict = field(repr=False)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def minor_report(params: LatticeParams, x) -> MinorReport:
    """Evaluate the third-row minors of the 4 x 4 block and their inequalities.

    Verifies, at the given x in [-a/2, 0]:
      * the entry comparisons w(x) > w(x-a) and w(x) >= w(x+a) (equality only
        at x = -a/2),
      * |D32| > 0 and |D34| >= 0 with |D34| = 0 exactly on [-a/2, 1/b - 1],
      * the dominance |D33| > |D32| + |D34|,
      * the cofactor expansion |D| = -w(x-a)|D32| + w(x)|D33| - w(x+a)|D34|.
    """
    from .frameset import in_lambda3
    if not in_lambda3(params):
        raise ValueError(f"{params!r} outside the wide certified band")
    a, b = params.a, params.b
    if params.exact:
        a, b = Fraction(a), Fraction(b)
        x = Fraction(x)
    if not (-a / 2 <= x <= 0):
        raise ValueError(f"x={x} outside [-a/2, 0]")
    G = build_G(3, params)
    D, _, _ = reduce_to_block(G)
    Dx = [[p(x) for p in row] for row in D]

    def det3(rows):
        ((r, s, t), (u, v, w), (p, q, o)) = rows
        return r * (v * o - w * q) - s * (u * o - w * p) + t * (u * q - v * p)

    def minor(i, j):
        return det3([[Dx[r][c] for c in range(4) if c != j]
                     for r in range(4) if r != i])

    d32, d33, d34 = minor(2, 1), minor(2, 2), minor(2, 3)
    det4 = _det4(Dx)
    w0 = G.entry(0, 0)(x)
    wm = G.entry(0, -1)(x)
    wp = G.entry(0, 1)(x)
    boundary = x == -a / 2
    zero_hi = 1 / b - 1
    # NOTE: w(x) - w(x+a) = 2x + a >= 0 here, vanishing only at x = -a/2;
    # the dominance argument consumes exactly this direction
    checks = {
        "entry_gap_left": w0 > wm,
        "entry_gap_right": (w0 > wp) or (boundary and w0 == wp),
        "d32_positive": d32 > 0,
        "d34_nonnegative": d34 >= 0,
        "d34_zero_iff_early": (d34 == 0) == (x <= zero_hi),
        "dominance": d33 > abs(d32) + abs(d34),
        "cofactor_identity": det4 == -wm * d32 + w0 * d33 - wp * d34,
    }
    return MinorReport(params=params, x=x, d32=d32, d33=d33, d34=d34, det=det4,
                       entry_gaps=(w0 - wm, w0 - wp),
                       d34_zero_region=(-a / 2, zero_hi), checks=checks)


def _det4(M):
    tot = 0
    for j in range(4):
        if M[0][j] == 0:
            continue
        sub = [[M[r][c] for c in range(4) if c != j] for r in range(1, 4)]
        d3 = (sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
              - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
              + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]))
        tot += (1 if j % 2 == 0 else -1) * M[0][j] * d3
    return tot
