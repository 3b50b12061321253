"""Assembly of the banded duality system for the triangle window.

For lattice constants in the m-th hyperbolic strip the pointwise duality
condition couples the 2m-1 translates of the dual window through a
(2m-1) x (2m-1) matrix of shifted triangle windows,

    G_m(x)[i][j] = w(x + l/b + k a),   l = m-1, ..., -(m-1) (rows, descending)
                                       k = -(m-1), ..., m-1 (columns),

on the interval [-a/2, a/2].  For m = 3 on the certified regions the matrix
is block triangular after restriction to [-a/2, 0]: the bottom row vanishes
except for its corner entry, so invertibility reduces to the leading 4 x 4
block D(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .splinecore import LatticeParams, PiecewisePoly, shifted_b2_as_pp


class StripHypothesisError(ValueError):
    """Lattice constants violate the strip inequality required for size m."""


def strip_bounds(m: int, a) -> tuple:
    """Lower/upper hyperbola values 2(m-1)/(2+(2m-3)a), 2m/(2+(2m-1)a)."""
    if isinstance(a, Fraction):
        return (Fraction(2 * (m - 1), 1) / (2 + (2 * m - 3) * a),
                Fraction(2 * m, 1) / (2 + (2 * m - 1) * a))
    return (2.0 * (m - 1) / (2 + (2 * m - 3) * a),
            2.0 * m / (2 + (2 * m - 1) * a))


@dataclass(frozen=True)
class DualityMatrix:
    """The matrix-valued function G_m on [-a/2, a/2]."""

    m: int
    params: LatticeParams
    entries: tuple  # rows l = m-1 .. -(m-1), columns k = -(m-1) .. m-1

    @property
    def size(self) -> int:
        return 2 * self.m - 1

    @property
    def lo(self):
        return -self.params.a / 2

    @property
    def hi(self):
        return self.params.a / 2

    def entry(self, l: int, k: int) -> PiecewisePoly:
        """Entry for row shift l and column shift k (paper-layout indices)."""
        return self.entries[self.m - 1 - l][k + self.m - 1]

    def numeric(self, x):
        """Plain numeric matrix [G_m(x)] as nested lists."""
        return [[p(x) for p in row] for row in self.entries]


def build_G(m: int, params: LatticeParams) -> DualityMatrix:
    """Assemble G_m; requires 0 < a < 2 and b in the m-th strip."""
    if m < 1:
        raise ValueError("strip index m must be >= 1")
    a, b = params.a, params.b
    if not a < 2:
        raise StripHypothesisError(f"a={a} must lie in (0, 2)")
    lower, upper = strip_bounds(m, a)
    if not (lower < b <= upper):
        raise StripHypothesisError(
            f"b={b} outside strip {m}: need {lower} < b <= {upper}")
    lo, hi = -a / 2, a / 2
    one = Fraction(1) if params.exact else 1.0
    rows = []
    for l in range(m - 1, -m, -1):
        row = []
        for k in range(-(m - 1), m):
            offset = l * (one / b) + k * a
            row.append(shifted_b2_as_pp(offset, lo, hi, exact=params.exact))
        rows.append(tuple(row))
    return DualityMatrix(m=m, params=params, entries=tuple(rows))


# ---------------------------------------------------------------------------
# zero-pattern report (certified regions, m = 3)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntryStatus:
    l: int
    k: int
    status: str  # "zero" | "positive" | "mixed"
    witness: object | None = None  # x with entry(x) <= 0 when status == "mixed"


@dataclass(frozen=True)
class SparsityReport:
    params: LatticeParams
    entries: tuple[EntryStatus, ...]
    upper_row_zero: bool      # entries (l=2, k in {0,1,2}) vanish
    lower_row_zero: bool      # entries (l=-2, k in {-2,-1,0,1}) vanish
    antidiagonal_positive: bool
    extra_zeros_ok: bool | None  # narrow-region extras; None when not applicable
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _classify_entry(p: PiecewisePoly, lo, hi, samples: int = 64):
    """Exhaustive classification of an affine-piece entry on [lo, hi].

    Affine pieces attain extrema at knots, so checking knots plus midpoints
    decides zero/positive/mixed exactly in exact mode.
    """
    pts = []
    knots = [t for t in p.knots() if lo <= t <= hi]
    for u, v in zip(knots[:-1], knots[1:]):
        pts.extend((u, (u + v) / 2))
    pts.append(knots[-1])
    vals = [p(t) for t in pts]
    if all(v == 0 for v in vals) and p.restrict(lo, hi).is_zero():
        return "zero", None
    if all(v > 0 for v in vals):
        return "positive", None
    witness = next(t for t, v in zip(pts, vals) if v <= 0)
    return "mixed", witness


def check_sparsity(G: DualityMatrix) -> SparsityReport:
    """Verify the zero/positivity pattern of G_3 on [-a/2, 0].

    Checks that the top row dies for k >= 0, the bottom row dies for k <= 1,
    and the anti-diagonal entries w(x + k/b - k a) stay strictly positive.
    On the half-open region where the narrower certified band applies
    (a >= 1/2), additionally checks the extra vanishing entries
    w(x + 1/b + a) and w(x - 2a).
    """
    if G.m != 3:
        raise ValueError("sparsity pattern is specific to m = 3")
    a = G.params.a
    lo, hi = -a / 2, 0 * a
    statuses = []
    failures = []
    for l in range(2, -3, -1):
        for k in range(-2, 3):
            st, wit = _classify_entry(G.entry(l, k).restrict(lo, hi), lo, hi)
            statuses.append(EntryStatus(l=l, k=k, status=st, witness=wit))
    by_lk = {(s.l, s.k): s for s in statuses}

    upper = all(by_lk[(2, k)].status == "zero" for k in (0, 1, 2))
    if not upper:
        bad = next(k for k in (0, 1, 2) if by_lk[(2, k)].status != "zero")
        failures.append(f"entry (l=2, k={bad}) not identically zero on [-a/2, 0]")
    lower = all(by_lk[(-2, k)].status == "zero" for k in (-2, -1, 0, 1))
    if not lower:
        bad = next(k for k in (-2, -1, 0, 1) if by_lk[(-2, k)].status != "zero")
        failures.append(f"entry (l=-2, k={bad}) not identically zero on [-a/2, 0]")
    anti = True
    for k in range(-2, 3):
        s = by_lk[(k, -k)]
        if s.status != "positive":
            anti = False
            failures.append(f"anti-diagonal entry (l={k}, k={-k}) not strictly positive, "
                            f"witness x={s.witness}")
    extra = None
    if a >= Fraction(1, 2):
        extra = (by_lk[(1, 1)].status == "zero" and by_lk[(0, -2)].status == "zero")
        if not extra:
            failures.append("expected extra vanishing entries (l=1,k=1), (l=0,k=-2)")
    return SparsityReport(params=G.params, entries=tuple(statuses),
                          upper_row_zero=upper, lower_row_zero=lower,
                          antidiagonal_positive=anti, extra_zeros_ok=extra,
                          failures=tuple(failures))


class BlockStructureError(ValueError):
    """The corner entry is not strictly positive; not a certified region."""


def reduce_to_block(G: DualityMatrix):
    """Split G_3 restricted to [-a/2, 0] as [[D, v], [0, corner]].

    Returns (D, corner, v) where D is the leading 4 x 4 block, corner is the
    strictly positive entry w(x - 2/b + 2a) and v the trailing column above
    it.  Raises BlockStructureError when the corner fails positivity and
    ValueError when the bottom row is not otherwise zero.
    """
    if G.m != 3:
        raise ValueError("block reduction is specific to m = 3")
    a = G.params.a
    lo, hi = -a / 2, 0 * a
    corner = G.entry(-2, 2).restrict(lo, hi)
    status, wit = _classify_entry(corner, lo, hi)
    if status != "positive":
        raise BlockStructureError(
            f"corner entry w(x - 2/b + 2a) not strictly positive on [-a/2, 0] "
            f"(status {status}, witness {wit}); lattice outside certified band")
    for k in (-2, -1, 0, 1):
        if not G.entry(-2, k).restrict(lo, hi).is_zero():
            raise ValueError(f"bottom-row entry k={k} does not vanish on [-a/2, 0]")
    D = tuple(tuple(G.entry(l, k).restrict(lo, hi) for k in (-2, -1, 0, 1))
              for l in (2, 1, 0, -1))
    v = tuple(G.entry(l, 2).restrict(lo, hi) for l in (2, 1, 0, -1))
    return D, corner, v
