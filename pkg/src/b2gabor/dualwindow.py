"""Construction of the compactly supported dual window.

On the m-th strip the dual h is determined on (-a/2 + k a, k a],
k = -(m-1), ..., m-1, by solving the banded system at each x in (-a/2, 0]
and extended everywhere by evenness.  Each component is a ratio of a
center-row cofactor of the system matrix to its determinant, so h is stored
exactly as rational-function pieces (numerator, denominator pairs).  Values
at the half-lattice points k a/2 follow the global right-limit convention;
the underlying identity only constrains h almost everywhere.

The one-sided limits of the pieces expose the jump discontinuities; on the
certified bands the dual always jumps at -a/2 (and mirrored at a/2), which
is why it leaves the smoothness class of the window itself.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .splinecore import (LatticeParams, PiecewisePoly, eval_b2, poly_add,
                         poly_deriv, poly_eval, poly_mul, poly_neg)
from .dualsystem import DualityMatrix, build_G, reduce_to_block
from .certify import _roots_float, certify_nonvanishing, det_piecewise

JUMP_TOL_FLOAT = 1e-8


class SingularSystemError(ValueError):
    """The system determinant vanishes on an interval or at the request point."""


# ---------------------------------------------------------------------------
# pointwise solves
# ---------------------------------------------------------------------------

def _solve_dense(M, rhs, exact: bool):
    if not exact:
        return list(np.linalg.solve(np.array(M, dtype=float),
                                    np.array(rhs, dtype=float)))
    n = len(M)
    A = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(M)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if A[r][c] != 0), None)
        if pivot is None:
            raise SingularSystemError("singular system matrix")
        A[c], A[pivot] = A[pivot], A[c]
        pv = A[c][c]
        A[c] = [v / pv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [vr - f * vc for vr, vc in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def solve_dual_at(x, G: DualityMatrix) -> list:
    """The vector (h(x + k a))_k for k = -(m-1), ..., m-1 at one point.

    Solves G_m(x) v = b e_center; raises SingularSystemError when the matrix
    is singular at x (an exceptional point -- measure zero on certified
    lattices).
    """
    params = G.params
    if not (-params.a / 2 <= x <= params.a / 2):
        raise ValueError(f"x={x} outside [-a/2, a/2]")
    M = G.numeric(x)
    rhs = [0] * G.size
    rhs[G.m - 1] = params.b
    try:
        return _solve_dense(M, rhs, params.exact)
    except (SingularSystemError, np.linalg.LinAlgError) as exc:
        raise SingularSystemError(f"duality system singular at x={x}") from exc


def _center_cofactors(G: DualityMatrix):
    """Numerators b * (-1)^{center+j} minor_{center,j} and the determinant.

    Cramer's rule for the solve above, as piecewise polynomials on
    [-a/2, 0]; component j corresponds to the shift k = j - (m-1).
    """
    a = G.params.a
    lo, hi = -a / 2, 0 * a
    n = G.size
    center = G.m - 1
    rows = [[p.restrict(lo, hi) for p in row] for row in G.entries]
    det = det_piecewise(rows)
    numerators = []
    sub_rows = [row for i, row in enumerate(rows) if i != center]
    for j in range(n):
        minor = [[p for c, p in enumerate(row) if c != j] for row in sub_rows]
        cof = det_piecewise(minor) if n > 1 else PiecewisePoly.constant(
            1, lo, hi, exact=G.params.exact)
        sign = 1 if (center + j) % 2 == 0 else -1
        numerators.append(cof * (sign * G.params.b))
    return numerators, det


def _block_minor_data(G: DualityMatrix):
    """(corner, |D~33|, |D~34|, |G|) as piecewise polys on [-a/2, 0], m = 3."""
    D, corner, _ = reduce_to_block(G)
    a = G.params.a
    lo, hi = -a / 2, 0 * a
    rows = [[p.restrict(lo, hi) for p in row] for row in G.entries]
    detG = det_piecewise(rows)

    def dminor(i, j):
        sub = [[p for c, p in enumerate(row) if c != j]
               for r, row in enumerate(D) if r != i]
        return det_piecewise(sub)

    return corner, dminor(2, 2), dminor(2, 3), detG


def cramer_h(x, G: DualityMatrix):
    """h(x) = b corner(x) |D~33(x)| / |G(x)| on (-a/2, 0], m = 3.

    This is the closed form through the reduced block; it must agree with
    the center component of solve_dual_at wherever both are defined.
    """
    if G.m != 3:
        raise ValueError("the block closed form is specific to m = 3")
    corner, d33, d34, detG = _block_minor_data(G)
    d = detG(x)
    if d == 0:
        raise SingularSystemError(f"duality system singular at x={x}")
    return G.params.b * corner(x) * d33(x) / d


def cramer_h_shifted(x, G: DualityMatrix):
    """h(x + a) = -b corner(x) |D~34(x)| / |G(x)| on (-a/2, 0), m = 3."""
    if G.m != 3:
        raise ValueError("the block closed form is specific to m = 3")
    corner, d33, d34, detG = _block_minor_data(G)
    d = detG(x)
    if d == 0:
        raise SingularSystemError(f"duality system singular at x={x}")
    return -G.params.b * corner(x) * d34(x) / d


def boundary_limits(G: DualityMatrix):
    """One-sided limits of h at -a/2 from the block minors, m = 3.

    Right limit: b w(3a/2 - 2/b) |D~33(-a/2)| / |G(-a/2)|;
    left limit: -b w(3a/2 - 2/b) |D~34(-a/2)| / |G(-a/2)|.
    Evenness of |G| makes |G(-a/2)| = |G(a/2)|.
    """
    if G.m != 3:
        raise ValueError("the block closed form is specific to m = 3")
    a, b = G.params.a, G.params.b
    corner, d33, d34, detG = _block_minor_data(G)
    x0 = -a / 2
    scale = b * eval_b2(3 * a / 2 - 2 / b) / detG(x0)
    return -scale * d34(x0), scale * d33(x0)


# ---------------------------------------------------------------------------
# assembled dual window
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPiece:
    lo: object
    hi: object
    num: tuple
    den: tuple

    def __call__(self, x):
        return poly_eval(self.num, x) / poly_eval(self.den, x)


@dataclass(frozen=True)
class Discontinuity:
    location: object
    left: object
    right: object

    @property
    def jump(self):
        return self.right - self.left


@dataclass(frozen=True)
class DualWindow:
    m: int
    params: LatticeParams
    pieces: tuple[RationalPiece, ...]   # contiguous cover of [-R, R]
    discontinuities: tuple[Discontinuity, ...]
    resolution: int = 512               # default rasterization for export

    @property
    def support_radius(self):
        return (2 * self.m - 1) * self.params.a / 2

    def __call__(self, x):
        r = self.support_radius
        if x < -r or x > r:
            return 0 * x
        # pieces own their left endpoint; the last piece owns both ends
        for i, p in enumerate(self.pieces):
            if p.lo <= x < p.hi or (i == len(self.pieces) - 1 and x == p.hi):
                return p(x)
        raise AssertionError(f"piece cover has a gap at x={x}")

    def sample(self, resolution: int | None = None) -> list[tuple]:
        """Uniform table of (x, h(x), piece_index, near_jump) over the support."""
        resolution = resolution or self.resolution
        r = self.support_radius
        jumps = [d.location for d in self.discontinuities]
        rows = []
        for i in range(resolution + 1):
            if self.params.exact:
                x = -r + Fraction(2 * i, resolution) * r
            else:
                x = -r + (2.0 * i / resolution) * r
            idx = self._index(x)
            step = 2 * r / resolution
            near = any(abs(x - t) <= step for t in jumps)
            rows.append((x, self(x), idx, near))
        return rows

    def _index(self, x) -> int:
        for i, p in enumerate(self.pieces):
            if p.lo <= x < p.hi:
                return i
        return len(self.pieces) - 1

    def bound(self) -> float:
        """sup |h| over the support.

        Each piece is num/den with den nonvanishing on the closed piece, so
        extrema sit at piece endpoints or at roots of (num/den)'.
        """
        best = 0.0
        for p in self.pieces:
            num = [float(v) for v in p.num]
            den = [float(v) for v in p.den]
            crit = poly_add(poly_mul(poly_deriv(num), den),
                            poly_neg(poly_mul(num, poly_deriv(den))))
            pts = [float(p.lo), float(p.hi)]
            pts += _roots_float(crit, float(p.lo), float(p.hi))
            for t in pts:
                t = min(max(t, float(p.lo)), float(p.hi))
                v = abs(poly_eval(num, t) / poly_eval(den, t))
                best = max(best, v)
        return best

    def write_csv(self, path, resolution: int | None = None):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "h", "piece_index", "is_discontinuity_adjacent"])
            for x, hx, idx, near in self.sample(resolution):
                w.writerow([format(float(x), ".17g"), format(float(hx), ".17g"),
                            idx, int(near)])


def _ratio_subpieces(num: PiecewisePoly, den: PiecewisePoly) -> list[RationalPiece]:
    """Split a num/den pair at the union of both breakpoint sets."""
    bps = sorted(set(num.breakpoints) | set(den.breakpoints))
    knots = [num.lo, *bps, num.hi]
    out = []
    for u, v in zip(knots[:-1], knots[1:]):
        mid = (u + v) / 2
        out.append(RationalPiece(
            lo=u, hi=v,
            num=tuple(num.pieces[num.piece_index(mid)]),
            den=tuple(den.pieces[den.piece_index(mid)])))
    return out


def build_dual(m: int, params: LatticeParams, resolution: int = 512) -> DualWindow:
    """Assemble the dual window on [-R, R], R = (2m-1)a/2.

    Requires the determinant of the system to be nonvanishing on [-a/2, 0];
    this is certified before assembly (exact mode: Sturm counts; float mode:
    companion roots).  The pieces on (k a - a/2, k a] come from the Cramer
    ratios translated by k a; the complementary half-cells come from their
    even reflections.
    """
    G = build_G(m, params)
    numerators, det = _center_cofactors(G)
    cert = certify_nonvanishing(det, params=params)
    if not cert.overall:
        bad = [p for p in cert.per_piece if p.status in ("vanishes", "identically-zero")]
        raise SingularSystemError(
            f"system determinant vanishes inside [-a/2, 0] for {params!r}: "
            + "; ".join(f"[{p.lo}, {p.hi}] {p.status} roots={p.interior_roots}"
                        for p in bad))
    if cert.endpoint_roots:
        # a boundary zero makes the candidate blow up at the half-cell edges;
        # no bounded dual with this support exists (e.g. the obstruction point)
        raise SingularSystemError(
            f"system determinant vanishes at the domain boundary for {params!r} "
            f"(roots {cert.endpoint_roots}); bounded dual construction fails")
    a = params.a
    pieces: list[RationalPiece] = []
    for j, num in enumerate(numerators):
        k = j - (m - 1)
        # direct: h on (k a - a/2, k a], x = t - k a
        direct = _ratio_subpieces(num.translate(k * a), det.translate(k * a))
        # reflected: h on [-k a, -k a + a/2) via h(t) = h(-t)
        reflected = _ratio_subpieces(num.reflect().translate(-k * a),
                                     det.reflect().translate(-k * a))
        pieces.extend(direct)
        pieces.extend(reflected)
    pieces.sort(key=lambda p: (p.lo, p.hi))
    r = (2 * m - 1) * a / 2
    if pieces[0].lo != -r or pieces[-1].hi != r:
        raise AssertionError("assembled pieces do not span the support")
    for left, right in zip(pieces[:-1], pieces[1:]):
        if left.hi != right.lo:
            raise AssertionError(f"piece cover gap between {left.hi} and {right.lo}")
    discs = _detect_jumps(pieces, params, m)
    return DualWindow(m=m, params=params, pieces=tuple(pieces),
                      discontinuities=tuple(discs), resolution=resolution)


def _detect_jumps(pieces, params: LatticeParams, m: int):
    tol = 0 if params.exact else JUMP_TOL_FLOAT
    discs = []
    r = (2 * m - 1) * params.a / 2
    # interior junctions
    for left, right in zip(pieces[:-1], pieces[1:]):
        t = left.hi
        lv = left(t)
        rv = right(t)
        if abs(rv - lv) > tol:
            discs.append(Discontinuity(location=t, left=lv, right=rv))
    # support edges: outside value is exactly zero
    lv = pieces[0](pieces[0].lo)
    if abs(lv) > tol:
        discs.append(Discontinuity(location=-r, left=0 * lv, right=lv))
    rv = pieces[-1](pieces[-1].hi)
    if abs(rv) > tol:
        discs.append(Discontinuity(location=r, left=rv, right=0 * rv))
    discs.sort(key=lambda d: d.location)
    return discs


def discontinuity_report(h: DualWindow) -> list[Discontinuity]:
    """Jump points of h with one-sided limits, ordered by location."""
    return list(h.discontinuities)
