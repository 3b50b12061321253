"""Triangle-window evaluation and the piecewise-polynomial algebra under it.

Everything downstream (duality matrices, determinant certificates, dual
windows) is built from translated copies of the triangle window

    w(x) = max(1 - |x|, 0),

restricted to an interval and manipulated as piecewise polynomials.  Two
coefficient modes are supported and never mixed inside one object:

* exact mode: ``fractions.Fraction`` coefficients, used whenever the lattice
  constants are rational.  Determinant sign certificates are only issued in
  this mode.
* float mode: plain floats, a fallback for irrational lattice constants.
  Breakpoints closer than ``MERGE_TOL`` are merged to avoid zero-length
  pieces.

Piece ownership is left-closed: a piece owns its left endpoint, the final
piece also owns the right domain endpoint.  Evaluation at a breakpoint is
therefore the right-hand limit.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[Fraction, float, int]

MERGE_TOL = 1e-14


# ---------------------------------------------------------------------------
# dense polynomial helpers (coefficient lists, ascending degree)
# ---------------------------------------------------------------------------

def _trim(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    out = [0] * n
    for i, v in enumerate(p):
        out[i] = out[i] + v
    for i, v in enumerate(q):
        out[i] = out[i] + v
    return _trim(out)


def poly_neg(p: Sequence) -> list:
    return [-v for v in p]


def poly_mul(p: Sequence, q: Sequence) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b != 0:
                out[i + j] = out[i + j] + a * b
    return _trim(out)


def poly_scale(p: Sequence, c) -> list:
    return _trim([c * v for v in p])


def poly_eval(p: Sequence, x):
    acc = p[-1]
    for v in reversed(p[:-1]):
        acc = acc * x + v
    return acc


def poly_shift(p: Sequence, c) -> list:
    """Coefficients of x -> p(x + c), by Horner over (x + c)."""
    out = [p[-1]]
    for coeff in reversed(p[:-1]):
        nxt = [0] * (len(out) + 1)
        for i, v in enumerate(out):
            nxt[i] = nxt[i] + c * v
            nxt[i + 1] = nxt[i + 1] + v
        nxt[0] = nxt[0] + coeff
        out = nxt
    return _trim(out)


def poly_reflect(p: Sequence) -> list:
    """Coefficients of x -> p(-x)."""
    return _trim([(-1) ** i * v for i, v in enumerate(p)])


def poly_deriv(p: Sequence) -> list:
    if len(p) <= 1:
        return [0 * p[0]] if p else [0]
    return _trim([i * v for i, v in enumerate(p)][1:])


def poly_is_zero(p: Sequence) -> bool:
    return all(v == 0 for v in p)


# ---------------------------------------------------------------------------
# the triangle window
# ---------------------------------------------------------------------------

def eval_b2(x: Number) -> Number:
    """max(1 - |x|, 0); even, supported on [-1, 1], piecewise affine."""
    ax = -x if x < 0 else x
    if ax >= 1:
        return 0 * x  # preserves Fraction/float type
    return 1 - ax


def eval_b2_array(x: np.ndarray) -> np.ndarray:
    return np.maximum(1.0 - np.abs(x), 0.0)


class DomainMismatchError(ValueError):
    """Raised when two piecewise polynomials have no common domain."""


class PiecewisePoly:
    """Univariate piecewise polynomial on a closed interval.

    ``breakpoints`` are strictly increasing and strictly interior to
    ``[lo, hi]``; ``pieces[i]`` holds ascending-degree coefficients valid on
    the i-th subinterval.
    """

    __slots__ = ("lo", "hi", "breakpoints", "pieces", "exact")

    def __init__(self, lo: Number, hi: Number, breakpoints: Iterable[Number],
                 pieces: Iterable[Sequence[Number]], exact: bool = True):
        bps = list(breakpoints)
        pcs = [list(p) if p else [0] for p in pieces]
        if not lo < hi:
            raise ValueError(f"degenerate domain [{lo}, {hi}]")
        if len(pcs) != len(bps) + 1:
            raise ValueError("piece count must be breakpoint count + 1")
        prev = lo
        for t in bps:
            if not (prev < t < hi):
                raise ValueError("breakpoints must be strictly increasing and interior")
            prev = t
        if not exact:
            lo, hi = float(lo), float(hi)
            bps = [float(t) for t in bps]
            pcs = [[float(v) for v in p] for p in pcs]
        else:
            lo, hi = Fraction(lo), Fraction(hi)
            bps = [Fraction(t) for t in bps]
            pcs = [[Fraction(v) for v in p] for p in pcs]
        self.lo = lo
        self.hi = hi
        self.breakpoints = tuple(bps)
        self.pieces = tuple(tuple(_trim(p)) for p in pcs)
        self.exact = exact

    # -- construction helpers ------------------------------------------------

    @classmethod
    def constant(cls, value: Number, lo: Number, hi: Number, exact: bool = True) -> "PiecewisePoly":
        return cls(lo, hi, [], [[value]], exact=exact)

    @classmethod
    def zero(cls, lo: Number, hi: Number, exact: bool = True) -> "PiecewisePoly":
        return cls.constant(0, lo, hi, exact=exact)

    # -- basic queries ---------------------------------------------------------

    def piece_index(self, x: Number) -> int:
        if x < self.lo or x > self.hi:
            raise ValueError(f"{x} outside domain [{self.lo}, {self.hi}]")
        return bisect_right(self.breakpoints, x)

    def __call__(self, x: Number):
        return poly_eval(self.pieces[self.piece_index(x)], x)

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        bps = np.asarray([float(t) for t in self.breakpoints])
        idx = np.searchsorted(bps, x, side="right")
        out = np.empty_like(np.asarray(x, dtype=float))
        for i, coeffs in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                c = [float(v) for v in coeffs]
                out[mask] = np.polynomial.polynomial.polyval(np.asarray(x)[mask], c)
        return out

    def eval_piece(self, i: int, x: Number):
        """Evaluate piece i at x, regardless of ownership (for one-sided limits)."""
        return poly_eval(self.pieces[i], x)

    def left_limit(self, x: Number):
        """Limit from below; at interior breakpoints this is the left piece's value."""
        i = self.piece_index(x)
        if i > 0 and x == self.breakpoints[i - 1]:
            i -= 1
        return poly_eval(self.pieces[i], x)

    def right_limit(self, x: Number):
        return self(x)

    def knots(self) -> list:
        return [self.lo, *self.breakpoints, self.hi]

    def degree(self) -> int:
        return max(len(p) - 1 for p in self.pieces)

    def is_zero(self) -> bool:
        return all(poly_is_zero(p) for p in self.pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return (self.lo == other.lo and self.hi == other.hi
                and self.breakpoints == other.breakpoints
                and self.pieces == other.pieces)

    def __hash__(self):
        return hash((self.lo, self.hi, self.breakpoints, self.pieces))

    def __repr__(self):
        return (f"PiecewisePoly([{self.lo}, {self.hi}], "
                f"{len(self.pieces)} pieces, deg {self.degree()})")

    # -- algebra ---------------------------------------------------------------

    def _merged_breakpoints(self, other: "PiecewisePoly", lo, hi) -> list:
        cand = [t for t in (*self.breakpoints, *other.breakpoints) if lo < t < hi]
        cand.sort()
        merged: list = []
        for t in cand:
            if merged and self._close(merged[-1], t):
                continue
            merged.append(t)
        # drop candidates that collide with the domain edge after float merge
        return [t for t in merged if not (self._close(t, lo) or self._close(t, hi))]

    def _close(self, u, v) -> bool:
        if self.exact:
            return u == v
        return abs(u - v) <= MERGE_TOL

    def _binary(self, other: "PiecewisePoly", op) -> "PiecewisePoly":
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and float piecewise polynomials")
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if not lo < hi:
            raise DomainMismatchError(
                f"domains [{self.lo},{self.hi}] and [{other.lo},{other.hi}] do not overlap")
        bps = self._merged_breakpoints(other, lo, hi)
        pieces = []
        knots = [lo, *bps, hi]
        for u, v in zip(knots[:-1], knots[1:]):
            mid = (u + v) / 2
            pa = self.pieces[self.piece_index(mid)]
            pb = other.pieces[other.piece_index(mid)]
            pieces.append(op(pa, pb))
        return PiecewisePoly(lo, hi, bps, pieces, exact=self.exact)

    def __add__(self, other):
        if isinstance(other, PiecewisePoly):
            return self._binary(other, poly_add)
        return self._map(lambda p: poly_add(p, [other]))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PiecewisePoly):
            return self._binary(other, lambda p, q: poly_add(p, poly_neg(q)))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiecewisePoly):
            return self._binary(other, poly_mul)
        return self._map(lambda p: poly_scale(p, other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._map(poly_neg)

    def _map(self, f) -> "PiecewisePoly":
        return PiecewisePoly(self.lo, self.hi, self.breakpoints,
                             [f(list(p)) for p in self.pieces], exact=self.exact)

    def derivative(self) -> "PiecewisePoly":
        return self._map(poly_deriv)

    def restrict(self, lo: Number, hi: Number) -> "PiecewisePoly":
        if lo < self.lo or hi > self.hi or not lo < hi:
            raise ValueError(f"[{lo}, {hi}] is not a subinterval of [{self.lo}, {self.hi}]")
        bps = [t for t in self.breakpoints if lo < t < hi]
        pieces = []
        knots = [lo, *bps, hi]
        for u, v in zip(knots[:-1], knots[1:]):
            pieces.append(list(self.pieces[self.piece_index((u + v) / 2)]))
        return PiecewisePoly(lo, hi, bps, pieces, exact=self.exact)

    def translate(self, dx: Number) -> "PiecewisePoly":
        """The function x -> self(x - dx) on the shifted domain."""
        return PiecewisePoly(self.lo + dx, self.hi + dx,
                             [t + dx for t in self.breakpoints],
                             [poly_shift(list(p), -dx) for p in self.pieces],
                             exact=self.exact)

    def reflect(self) -> "PiecewisePoly":
        """The function x -> self(-x)."""
        return PiecewisePoly(-self.hi, -self.lo,
                             [-t for t in reversed(self.breakpoints)],
                             [poly_reflect(list(p)) for p in reversed(self.pieces)],
                             exact=self.exact)

    def as_float(self) -> "PiecewisePoly":
        if not self.exact:
            return self
        return PiecewisePoly(float(self.lo), float(self.hi),
                             [float(t) for t in self.breakpoints],
                             [[float(v) for v in p] for p in self.pieces], exact=False)


def pp_add(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    return p + q


def pp_mul(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    return p * q


def shifted_b2_as_pp(offset: Number, lo: Number, hi: Number,
                     exact: bool = True) -> PiecewisePoly:
    """Restriction of x -> max(1 - |x + offset|, 0) to [lo, hi].

    Breakpoints are the kinks {-1 - offset, -offset, 1 - offset} that fall
    strictly inside the domain.
    """
    if exact:
        offset = Fraction(offset)
        lo, hi = Fraction(lo), Fraction(hi)
    kinks = sorted({-1 - offset, -offset, 1 - offset})
    tol = 0 if exact else MERGE_TOL
    bps = [t for t in kinks if lo + tol < t < hi - tol]
    pieces = []
    knots = [lo, *bps, hi]
    for u, v in zip(knots[:-1], knots[1:]):
        t = (u + v) / 2 + offset
        if t <= -1 or t >= 1:
            pieces.append([0])
        elif t < 0:
            pieces.append([1 + offset, 1])
        else:
            pieces.append([1 - offset, -1])
    return PiecewisePoly(lo, hi, bps, pieces, exact=exact)


# ---------------------------------------------------------------------------
# lattice parameters
# ---------------------------------------------------------------------------

def _coerce(value) -> tuple[Number, bool]:
    """Parse a lattice constant; returns (value, is_exact)."""
    if isinstance(value, bool):
        raise TypeError("lattice constants must be numbers")
    if isinstance(value, Fraction):
        return value, True
    if isinstance(value, int):
        return Fraction(value), True
    if isinstance(value, str):
        return Fraction(value), True
    if isinstance(value, float):
        return value, False
    raise TypeError(f"unsupported lattice constant {value!r}")


class LatticeParams:
    """Time shift a and frequency shift b of a rectangular lattice.

    Rational inputs (Fraction, int, or strings like "1/4" and "0.3") keep
    exact arithmetic throughout; float inputs run the float fallback and any
    certificate derived from them is marked non-certified.  When both
    constants are rational, ``rational_form`` is the reduced fraction p/q of
    the product ab.
    """

    __slots__ = ("a", "b", "exact", "rational_form")

    def __init__(self, a, b, rational_form: tuple[int, int] | None = None):
        av, aex = _coerce(a)
        bv, bex = _coerce(b)
        self.exact = aex and bex
        if not self.exact:
            av, bv = float(av), float(bv)
        if not (av > 0 and bv > 0):
            raise ValueError(f"lattice constants must be positive, got a={av}, b={bv}")
        self.a = av
        self.b = bv
        if rational_form is None and self.exact:
            ab = Fraction(av) * Fraction(bv)
            rational_form = (ab.numerator, ab.denominator)
        if rational_form is not None:
            p, q = rational_form
            if p <= 0 or q <= 0 or math.gcd(p, q) != 1:
                raise ValueError(f"rational_form must be coprime positive integers, got {rational_form}")
            ab = self.a * self.b if not self.exact else Fraction(self.a) * Fraction(self.b)
            err = abs(ab - Fraction(p, q)) if self.exact else abs(ab - p / q)
            limit = 0 if self.exact else 1e-12
            if err > limit:
                raise ValueError(f"rational_form {p}/{q} does not match ab={ab}")
        self.rational_form = rational_form

    @property
    def ab(self) -> Number:
        return self.a * self.b

    def as_float(self) -> tuple[float, float]:
        return float(self.a), float(self.b)

    def __repr__(self):
        tag = "exact" if self.exact else "float"
        return f"LatticeParams(a={self.a}, b={self.b}, {tag})"

    def __eq__(self, other):
        if not isinstance(other, LatticeParams):
            return NotImplemented
        return (self.a, self.b, self.exact) == (other.a, other.b, other.exact)

    def __hash__(self):
        return hash((self.a, self.b, self.exact))
