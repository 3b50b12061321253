"""Independent verification layer.

The dual construction is only trusted after substituting it back into the
pointwise identity it came from: for midpoint samples x in (-a/2, a/2) and
every row shift |l| <= m-1,

    sum_k w(x - l/b + k a) h(x + k a)  must equal  b when l = 0, else 0.

Exact-mode duals satisfy this with residual exactly zero away from
breakpoints.  The module also computes the elementary sufficient Bessel
bound for a bounded compactly supported candidate, and a cross-check that
ties the region classifier, the dual construction and the rational-lattice
spectral sweep together; a disagreement between those three independent
routes is the project's primary regression alarm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .splinecore import LatticeParams, eval_b2
from .frameset import RegionVerdict, classify, dual_support_index
from .dualwindow import DualWindow, build_dual


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    worst_x: object
    worst_l: int
    grid_size: int
    per_l: dict = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "max_residual": format(float(self.max_residual), ".17g"),
            "worst_x": format(float(self.worst_x), ".17g"),
            "worst_l": self.worst_l,
            "grid_size": self.grid_size,
            "per_l": {str(l): format(float(v), ".17g")
                      for l, v in sorted(self.per_l.items())},
        }


def duality_residual(h, params: LatticeParams, m: int,
                     grid: int = 64) -> ResidualReport:
    """Worst deviation from the pointwise identity over midpoint samples.

    ``h`` may be a DualWindow or any callable; midpoints avoid the
    breakpoints of h and of the window shifts, where one-sided conventions
    would otherwise leak into an almost-everywhere statement.
    """
    a, b = params.a, params.b
    exact = params.exact and isinstance(h, DualWindow)
    worst = -1.0
    worst_x = worst_l = 0
    per_l: dict[int, object] = {}
    for i in range(grid):
        if exact:
            x = -a / 2 + Fraction(2 * i + 1, 2 * grid) * a
        else:
            a_f, b_f = params.as_float()
            x = -a_f / 2 + (2 * i + 1) / (2 * grid) * a_f
        for l in range(-(m - 1), m):
            acc = 0 * x
            for k in range(-(m - 1), m):
                acc += eval_b2(x - l * (1 / b if exact else 1.0 / float(b)) + k * a) * h(x + k * a)
            target = b if l == 0 else 0
            res = abs(acc - target)
            if res > per_l.get(l, -1):
                per_l[l] = res
            if res > worst:
                worst, worst_x, worst_l = res, x, l
    return ResidualReport(max_residual=worst, worst_x=worst_x,
                          worst_l=worst_l, grid_size=grid, per_l=per_l)


def bessel_bound(h, params: LatticeParams, support_radius=None,
                 grid: int = 256) -> float:
    """(1/b) sup_x sum_n |sum_k h(x - k a) h(x - k a - n/b)| over one period.

    Finite by compact support; a finite value certifies that the candidate
    generates a Bessel family, the standing hypothesis behind the pointwise
    identity.  The sup is taken over a midpoint grid of [0, a).
    """
    a, b = params.as_float()
    if support_radius is None:
        support_radius = float(h.support_radius)
    r = float(support_radius)
    k_max = int(r / a) + 2
    n_max = int(2 * r * b) + 2
    best = 0.0
    for i in range(grid):
        x = (i + 0.5) * a / grid
        total = 0.0
        for n in range(-n_max, n_max + 1):
            s = 0.0
            for k in range(-k_max, k_max + 1):
                s += float(h(x - k * a)) * float(h(x - k * a - n / b))
            total += abs(s)
        best = max(best, total)
    return best / b


@dataclass(frozen=True)
class CrossCheck:
    params: LatticeParams
    verdict: RegionVerdict
    residual: ResidualReport | None
    dual_built: bool
    zz_summary: dict | None
    agreements: dict
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.to_dict(),
            "dual_built": self.dual_built,
            "residual": None if self.residual is None else self.residual.to_dict(),
            "zz": self.zz_summary,
            "agreements": self.agreements,
            "failures": list(self.failures),
            "ok": self.ok,
        }


def cross_check(params: LatticeParams, residual_grid: int = 16,
                zz_grid: tuple[int, int] = (48, 48),
                zz_qmax: int = 64,
                residual_tol: float = 1e-10,
                zz_positive: float = 1e-6,
                zz_small: float = 1e-3) -> CrossCheck:
    """Require the classifier, the dual construction and the spectral sweep
    to tell one coherent story about (a, b).

    Frame verdicts with a constructive provenance must produce a dual whose
    residual is below tolerance; with rational ab (and q below zz_qmax) the
    sweep's lower estimate must be bounded away from zero.  NotFrame
    verdicts must show a collapsing lower estimate.  Disagreements are
    returned, not raised.
    """
    from .zibulski import rank_sweep  # local import keeps module load light

    verdict = classify(params)
    failures = []
    agreements = {}
    residual = None
    dual_built = False

    m = dual_support_index(verdict)
    if verdict.label == "Frame" and m is not None:
        try:
            h = build_dual(m, params)
            dual_built = True
            residual = duality_residual(h, params, m, grid=residual_grid)
            tol = 0 if params.exact else residual_tol
            agreements["residual_small"] = residual.max_residual <= tol
            if residual.max_residual > tol:
                failures.append(
                    f"frame verdict but residual {float(residual.max_residual):.3e} "
                    f"exceeds {tol}")
        except Exception as exc:  # singular system inside a proven region
            failures.append(f"frame verdict but dual construction failed: {exc}")

    zz_summary = None
    rational = params.rational_form
    if rational is not None and rational[0] < rational[1] and rational[1] <= zz_qmax:
        spec = rank_sweep(params, *zz_grid)
        zz_summary = spec.summary()
        if verdict.label == "Frame":
            agreements["zz_lower_positive"] = spec.A_est > zz_positive
            if spec.A_est <= zz_positive:
                failures.append(
                    f"frame verdict but spectral lower estimate {spec.A_est:.3e} "
                    f"not bounded away from zero")
        elif verdict.label == "NotFrame":
            fine = rank_sweep(params, 2 * zz_grid[0], 2 * zz_grid[1])
            decreasing = fine.A_est < spec.A_est
            small = fine.A_est < zz_small
            agreements["zz_lower_collapsing"] = decreasing and small
            if not (decreasing and small):
                failures.append(
                    f"not-frame verdict but spectral lower estimate "
                    f"{spec.A_est:.3e} -> {fine.A_est:.3e} does not collapse")
    return CrossCheck(params=params, verdict=verdict, residual=residual,
                      dual_built=dual_built, zz_summary=zz_summary,
                      agreements=agreements, failures=tuple(failures))
