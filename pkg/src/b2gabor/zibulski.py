"""Spectral analysis of rationally oversampled lattices.

For ab = p/q in lowest terms the frame property is equivalent to uniform
rank/spectral bounds of a p x q matrix-valued function on a fundamental
domain.  Two variants are swept:

    phi[k, l](x, v) = p^{1/2} sum_n w(x - (p/q) l - n/b) e^{2 pi i (n/b)(v + k/p)}
        on [0, 1)^2, and
    psi[k, l](x, v) = b^{-1/2} sum_n w(x + a q n + a l + k/b) e^{-2 pi i a q n v}
        on [0, a) x [0, 1/(a q)),

with columns l = 0..q-1 and rows k = 0..p-1; the n-sums are finite because
the window has compact support.  The essential infimum of the squared
smallest singular value is the lower frame bound, so grids of singular
values yield two-sided numerical evidence: bounded-away-from-zero minima
for frames, collapsing minima under refinement for non-frames.  Midpoint
sampling keeps the grid off the measure-zero singular loci.

The module also reproduces the two special-point arguments at ab = 3/4 and
ab = 9/16: the selected square submatrices, their diagonal phase scalings
and the block decomposition whose two determinants are phase-free
polynomials in x.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .splinecore import LatticeParams, eval_b2, eval_b2_array

EVIDENCE_SMALL = 1e-3
EVIDENCE_DECREASE = 10.0


class IrrationalLatticeError(ValueError):
    """The product ab admits no (known) reduced fraction p/q."""


def _rational(params: LatticeParams) -> tuple[int, int]:
    if params.rational_form is None:
        raise IrrationalLatticeError(
            f"ab for {params!r} has no rational form; spectral sweep undefined")
    return params.rational_form


# ---------------------------------------------------------------------------
# matrix assembly
# ---------------------------------------------------------------------------

def build_psi(x: float, v: float, params: LatticeParams) -> np.ndarray:
    """The p x q matrix at one point of [0, a) x [0, 1/(a q))."""
    p, q = _rational(params)
    a, b = params.as_float()
    aq = a * q
    n_lo = int(np.floor((-1 - a * (q - 1) - (p - 1) / b) / aq)) - 1
    n_hi = int(np.ceil(1.0 / aq)) + 1
    out = np.zeros((p, q), dtype=complex)
    for n in range(n_lo, n_hi + 1):
        phase = np.exp(-2j * np.pi * aq * n * v)
        args = x + aq * n + a * np.arange(q)[None, :] + np.arange(p)[:, None] / b
        out += eval_b2_array(args) * phase
    return out / np.sqrt(b)


def build_phi(x: float, v: float, params: LatticeParams) -> np.ndarray:
    """The p x q matrix at one point of [0, 1)^2."""
    p, q = _rational(params)
    a, b = params.as_float()
    out = np.zeros((p, q), dtype=complex)
    ls = np.arange(q)[None, :]
    ks = np.arange(p)[:, None]
    centers = x - (p / q) * np.arange(q)
    # window support forces |x - (p/q) l - n/b| < 1
    n_lo = int(np.floor((centers.min() - 1) * b)) - 1
    n_hi = int(np.ceil((centers.max() + 1) * b)) + 1
    for n in range(n_lo, n_hi + 1):
        vals = eval_b2_array(x - (p / q) * ls - n / b)
        out += vals * np.exp(2j * np.pi * (n / b) * (v + ks / p))
    return out * np.sqrt(p)


def build_p1_from_psi(x: float, v: float) -> np.ndarray:
    """Transpose of the psi matrix at ab = 3/4, for convention cross-checks.

    Reindexing the summation flips the phase sign, so this equals
    b^{-1/2} build_p1(x, v) entrywise.
    """
    return build_psi(x, v, J1_PARAMS).T


def _psi_stack(params: LatticeParams, nx: int, nv: int) -> np.ndarray:
    """All psi matrices over the midpoint grid, shape (nx, nv, p, q)."""
    p, q = _rational(params)
    a, b = params.as_float()
    aq = a * q
    xs = (np.arange(nx) + 0.5) * (a / nx)
    vs = (np.arange(nv) + 0.5) / (aq * nv)
    n_lo = int(np.floor((-1 - a * (q - 1) - (p - 1) / b) / aq)) - 1
    n_hi = int(np.ceil(1.0 / aq)) + 1
    ns = np.arange(n_lo, n_hi + 1)
    args = (xs[None, None, None, :] + aq * ns[:, None, None, None]
            + a * np.arange(q)[None, None, :, None]
            + (np.arange(p)[None, :, None, None] / b))
    bvals = eval_b2_array(args)                      # [n, k, l, x]
    phases = np.exp(-2j * np.pi * aq * np.outer(ns, vs))  # [n, v]
    return np.einsum("nklx,nv->xvkl", bvals, phases) / np.sqrt(b)


def _phi_stack(params: LatticeParams, nx: int, nv: int) -> np.ndarray:
    p, q = _rational(params)
    a, b = params.as_float()
    xs = (np.arange(nx) + 0.5) / nx
    vs = (np.arange(nv) + 0.5) / nv
    centers = -(p / q) * np.arange(q)
    n_lo = int(np.floor((centers.min() - 1) * b)) - 1
    n_hi = int(np.ceil((1 + centers.max() + 1) * b)) + 1
    ns = np.arange(n_lo, n_hi + 1)
    # [n, l, x]
    bvals = eval_b2_array(xs[None, None, :] - (p / q) * np.arange(q)[None, :, None]
                          - ns[:, None, None] / b)
    # [n, k, v]
    phases = np.exp(2j * np.pi * (ns[:, None, None] / b)
                    * (vs[None, None, :] + np.arange(p)[None, :, None] / p))
    return np.einsum("nlx,nkv->xvkl", bvals, phases) * np.sqrt(p)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZZSpectrum:
    p: int
    q: int
    kind: str                 # "psi" | "phi"
    nx: int
    nv: int
    xs: np.ndarray
    vs: np.ndarray
    smin: np.ndarray          # [nx, nv]
    smax: np.ndarray
    A_est: float
    B_est: float
    singular_cells: tuple     # (x, v) with smin below threshold
    threshold: float

    def summary(self) -> dict:
        return {
            "p": self.p, "q": self.q, "kind": self.kind,
            "grid": [self.nx, self.nv],
            "A_est": format(self.A_est, ".17g"),
            "B_est": format(self.B_est, ".17g"),
            "singular_cells": len(self.singular_cells),
            "threshold": self.threshold,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "nu", "smin", "smax"])
            for i, x in enumerate(self.xs):
                for j, v in enumerate(self.vs):
                    w.writerow([format(x, ".17g"), format(v, ".17g"),
                                format(self.smin[i, j], ".17g"),
                                format(self.smax[i, j], ".17g")])


def rank_sweep(params: LatticeParams, nx: int, nv: int,
               kind: str = "psi", threshold: float = 1e-8) -> ZZSpectrum:
    """Singular values over the midpoint grid of the fundamental domain.

    A_est / B_est are the grid minimum of smin^2 and maximum of smax^2; p < q
    (oversampling) is required for the frame question to be nontrivial.
    """
    p, q = _rational(params)
    if p >= q:
        raise IrrationalLatticeError(
            f"ab = {p}/{q} is not oversampled (need p < q)")
    if kind == "psi":
        stack = _psi_stack(params, nx, nv)
        a, b = params.as_float()
        xs = (np.arange(nx) + 0.5) * (a / nx)
        vs = (np.arange(nv) + 0.5) / (a * q * nv)
    elif kind == "phi":
        stack = _phi_stack(params, nx, nv)
        xs = (np.arange(nx) + 0.5) / nx
        vs = (np.arange(nv) + 0.5) / nv
    else:
        raise ValueError(f"unknown matrix kind {kind!r}")
    sv = np.linalg.svd(stack, compute_uv=False)
    smin = sv[..., -1]
    smax = sv[..., 0]
    bad = np.argwhere(smin < threshold)
    cells = tuple((float(xs[i]), float(vs[j])) for i, j in bad)
    return ZZSpectrum(p=p, q=q, kind=kind, nx=nx, nv=nv, xs=xs, vs=vs,
                      smin=smin, smax=smax,
                      A_est=float((smin ** 2).min()),
                      B_est=float((smax ** 2).max()),
                      singular_cells=cells, threshold=threshold)


def evidence(params: LatticeParams, base: tuple[int, int] = (200, 200),
             kind: str = "psi") -> dict:
    """Two-resolution evidence report: frame-like, non-frame-like, or unclear.

    Declares non-frame evidence when the lower estimate is below
    EVIDENCE_SMALL at the base grid and shrinks by at least
    EVIDENCE_DECREASE under 2x refinement; sampling cannot certify an
    essential infimum, so this is evidence, not a verdict.
    """
    coarse = rank_sweep(params, *base, kind=kind)
    fine = rank_sweep(params, 2 * base[0], 2 * base[1], kind=kind)
    ratio = coarse.A_est / fine.A_est if fine.A_est > 0 else float("inf")
    if coarse.A_est < EVIDENCE_SMALL and ratio >= EVIDENCE_DECREASE:
        label = "non-frame-evidence"
    elif coarse.A_est < EVIDENCE_SMALL and fine.A_est < coarse.A_est:
        label = "non-frame-evidence-weak"
    elif coarse.A_est >= EVIDENCE_SMALL and fine.A_est >= 0.5 * coarse.A_est:
        label = "frame-evidence"
    else:
        label = "unclear"
    return {
        "label": label,
        "A_coarse": coarse.A_est, "A_fine": fine.A_est,
        "B_coarse": coarse.B_est, "B_fine": fine.B_est,
        "decrease_ratio": ratio,
    }


# ---------------------------------------------------------------------------
# special point ab = 3/4  (a, b) = (1/2, 3/2)
# ---------------------------------------------------------------------------

J1_PARAMS = LatticeParams(Fraction(1, 2), Fraction(3, 2))
J1_SINGULAR_POINT = (1.0 / 6.0, 0.25)

# branch polynomials of |N1| on [0, 1/6], [1/6, 1/3] (|N1| = f - y g) and
# [1/3, 1/2] (|N1| = f y^2 - g y + h), ascending coefficients
J1_BRANCHES = (
    (Fraction(1, 6), (Fraction(-1, 3), Fraction(10, 9), -3, 2),
     (Fraction(1, 9), Fraction(4, 9), 1, 2), None),
    (Fraction(1, 3), (Fraction(-4, 9), Fraction(16, 9), -3, 2),
     (Fraction(2, 9), Fraction(-2, 9), 1, 2), None),
    (Fraction(1, 2), (0, Fraction(-1, 18), Fraction(1, 2), -1),
     (Fraction(5, 9), Fraction(-4, 3), 2),
     (Fraction(-5, 9), Fraction(37, 18), Fraction(-5, 2), 1)),
)


def build_p1(x: float, v: float) -> np.ndarray:
    """Transposed system matrix at ab = 3/4: 4 x 3, rows l = 0..3."""
    y = np.exp(4j * np.pi * v)
    out = np.zeros((4, 3), dtype=complex)
    for l in range(4):
        for k in range(3):
            out[l, k] = sum(eval_b2(x + l / 2 + 2 * k / 3 - 2 * n) * y ** n
                            for n in range(3))
    return out


def build_m1(x: float, v: float) -> np.ndarray:
    """The 3 x 3 submatrix from rows l = 0, 2, 3 of the displayed selection."""
    return build_p1(x, v)[[0, 2, 3], :]


@dataclass(frozen=True)
class CaseJ1Report:
    x: float
    branch: int
    f: float
    g: float
    h: float | None
    max_identity_error: float
    f_negative: bool | None
    g_positive: bool | None
    full_rank_smin: float
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def case_j1_check(x: float, y_samples: int = 8, tol: float = 1e-12) -> CaseJ1Report:
    """Verify the branch determinant identity of the 3 x 3 submatrix at x.

    The matrix factors as diag(1, y, y) N1 with y = e^{4 pi i v}; on the two
    lower branches |N1| = f(x) - y g(x) with f < 0 < g, on the upper branch
    |N1| = f y^2 - g y + h.  The identity is checked against direct complex
    determinants at y_samples points on the unit circle.
    """
    if not 0 <= x <= 0.5:
        raise ValueError(f"x={x} outside [0, 1/2]")
    for branch, (hi, fc, gc, hc) in enumerate(J1_BRANCHES):
        if x <= float(hi) or branch == len(J1_BRANCHES) - 1:
            break
    fv = float(np.polynomial.polynomial.polyval(x, [float(c) for c in fc]))
    gv = float(np.polynomial.polynomial.polyval(x, [float(c) for c in gc]))
    hv = (float(np.polynomial.polynomial.polyval(x, [float(c) for c in hc]))
          if hc is not None else None)
    err = 0.0
    for i in range(y_samples):
        v = (i + 0.37) / (2.0 * y_samples)  # v in [0, 1/2): y covers the circle
        y = np.exp(4j * np.pi * v)
        M = build_m1(x, v)
        detM = np.linalg.det(M)
        detN = detM / y ** 2
        expected = (fv - y * gv) if hv is None else (fv * y ** 2 - gv * y + hv)
        err = max(err, abs(detN - expected))
    smin_full = float(np.linalg.svd(build_p1(x, 0.25), compute_uv=False)[-1])
    checks = {"identity": err <= tol}
    f_neg = g_pos = None
    if hv is None:
        f_neg, g_pos = fv < 0, gv > 0
        checks["f_negative"] = f_neg
        checks["g_positive"] = g_pos
    return CaseJ1Report(x=x, branch=branch, f=fv, g=gv, h=hv,
                        max_identity_error=err, f_negative=f_neg,
                        g_positive=g_pos, full_rank_smin=smin_full,
                        checks=checks)


def m1_smin(x: float, v: float) -> float:
    return float(np.linalg.svd(build_m1(x, v), compute_uv=False)[-1])


# ---------------------------------------------------------------------------
# special point ab = 9/16  (a, b) = (3/8, 3/2)
# ---------------------------------------------------------------------------

J3_PARAMS = LatticeParams(Fraction(3, 8), Fraction(3, 2))
J3_ROWS = (0, 1, 2, 3, 8, 9, 10, 11, 12)
J3_COLUMN_ORDER = (8, 0, 7, 6, 1, 5, 4, 3, 2)


def build_p3(x: float, y: complex) -> np.ndarray:
    """Transposed system matrix at ab = 9/16: 16 x 9, free unit phase y."""
    out = np.zeros((16, 9), dtype=complex)
    for l in range(16):
        for k in range(9):
            out[l, k] = sum(eval_b2(x + 3 * l / 8 + 2 * k / 3 - 6 * n) * y ** n
                            for n in range(3))
    return out


def j3_blocks(x: float, y: complex):
    """(A, C, O, B) blocks of the row-selected, column-permuted matrix."""
    M = build_p3(x, y)[list(J3_ROWS), :][:, list(J3_COLUMN_ORDER)]
    return M[:4, :4], M[:4, 4:], M[4:, :4], M[4:, 4:]


@dataclass(frozen=True)
class CaseJ3Report:
    x: float
    y: complex
    f: float                   # |A|/y^3, real part
    g: float                   # |B|/y^5, real part
    o_block_max: float
    phase_free_error: float    # deviation of f, g across a second phase
    imag_error: float
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def case_j3_check(x: float, y: complex, tol: float = 1e-12) -> CaseJ3Report:
    """Verify the block structure at ab = 9/16 for one (x, y).

    Checks the 5 x 4 lower-left block vanishes identically, and that
    |A|/y^3 and |B|/y^5 are real, independent of the phase, and nonzero.
    The sign of f is recorded: it is negative throughout [0, 3/8] (the
    determinant factors are nonvanishing, which is all invertibility needs).
    """
    if not 0 <= x <= 0.375:
        raise ValueError(f"x={x} outside [0, 3/8]")
    if abs(abs(y) - 1) > 1e-12:
        raise ValueError(f"y={y} must have unit modulus")
    A, C, O, B = j3_blocks(x, y)
    o_max = float(np.abs(O).max())
    fval = np.linalg.det(A) / y ** 3
    gval = np.linalg.det(B) / y ** 5
    # a second, unrelated phase must give the same f and g
    y2 = np.exp(1.2345j) * (1.0 if abs(y - np.exp(1.2345j)) > 1e-3 else np.exp(0.5j))
    A2, _, _, B2 = j3_blocks(x, y2)
    f2 = np.linalg.det(A2) / y2 ** 3
    g2 = np.linalg.det(B2) / y2 ** 5
    phase_err = max(abs(fval - f2), abs(gval - g2))
    imag_err = max(abs(fval.imag), abs(gval.imag))
    checks = {
        "o_block_zero": o_max == 0.0,
        "phase_free": phase_err <= tol,
        "real_valued": imag_err <= tol,
        "f_nonzero": abs(fval) > tol,
        "g_positive": gval.real > tol,
    }
    return CaseJ3Report(x=x, y=y, f=float(fval.real), g=float(gval.real),
                        o_block_max=o_max, phase_free_error=float(phase_err),
                        imag_error=float(imag_err), checks=checks)
