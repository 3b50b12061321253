"""Classification of lattice constants against every settled region.

A point (a, b) is labelled NotFrame when a necessary condition fails
(ab >= 1 or a >= 2), when b is an integer >= 2 with ab < 1, or at the one
known obstruction point (2/7, 7/4).  It is labelled Frame when it falls in
any of the proven regions: the painless band, the classical large-a wedge,
the hyperbolic strips with b < 1, the two bands with compactly supported
duals (narrow: a < 1/2, wide: a in [1/2, 4/5] with b > 1), or one of the two
special rational points settled through the finite-matrix rank argument.
Everything else is Unknown.

Boundary membership follows the printed interval conventions exactly: the
strips and bands are open below and closed above in b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .splinecore import LatticeParams
from .dualsystem import strip_bounds

M_MAX_DEFAULT = 64

OBSTRUCTION_POINT = (Fraction(2, 7), Fraction(7, 4))
ZZ_SPECIAL_POINTS = {
    (Fraction(1, 2), Fraction(3, 2)): "j=1",
    (Fraction(3, 8), Fraction(3, 2)): "j=3",
}

# T1 uses the window-support parameter; the triangle window has support
# radius 1, giving a in (0, 1) and b <= 2/(2+a) with b < 1
SPLINE_SUPPORT_N = 2


def _ab(params: LatticeParams):
    if params.exact:
        return Fraction(params.a) * Fraction(params.b)
    return params.a * params.b


def in_gamma3(params: LatticeParams) -> bool:
    """Narrow band: a in (0, 1/2), b in (4/(2+3a), 2/(1+a)]."""
    a, b = params.a, params.b
    if not 0 < a < Fraction(1, 2):
        return False
    return 4 / (2 + 3 * a) < b <= 2 / (1 + a)


def in_lambda3(params: LatticeParams) -> bool:
    """Wide band: a in [1/2, 4/5], b in (4/(2+3a), 6/(2+5a)], b > 1."""
    a, b = params.a, params.b
    if not Fraction(1, 2) <= a <= Fraction(4, 5):
        return False
    return b > 1 and 4 / (2 + 3 * a) < b <= 6 / (2 + 5 * a)


def in_t1(params: LatticeParams) -> bool:
    a, b = params.a, params.b
    n = SPLINE_SUPPORT_N
    return (0 < a < Fraction(n, 2)
            and 0 < b <= 2 / (n + a)
            and b < Fraction(2, n))


def in_tm(params: LatticeParams, m: int) -> bool:
    """Hyperbolic strip with the b < 1 proviso, m >= 2."""
    a, b = params.a, params.b
    if m < 2:
        return in_t1(params)
    lo_a = Fraction(2 * (m - 2), 2 * m - 3)
    if not lo_a < a < 1:
        return False
    lower, upper = strip_bounds(m, a)
    return b < 1 and lower < b <= upper


def in_prop2b(params: LatticeParams) -> bool:
    a, b = params.a, params.b
    return 0 < a < 2 and 0 < b <= 2 / (2 + a)


def in_prop2c(params: LatticeParams) -> bool:
    a, b = params.a, params.b
    return 1 <= a < 2 and 0 < b < 1 / a


def in_prop2d(params: LatticeParams) -> bool:
    a, b = params.a, params.b
    return 0 < a < 2 and 2 / (2 + a) < b <= 4 / (2 + 3 * a)


def strip_index(params: LatticeParams, m_max: int = M_MAX_DEFAULT) -> int | None:
    """The unique m >= 1 with b in (2(m-1)/(2+(2m-3)a), 2m/(2+(2m-1)a)].

    Returns None when no strip up to m_max contains b.  Strips for different
    m are disjoint at fixed a, so at most one index matches.
    """
    a, b = params.a, params.b
    if not 0 < a < 2:
        return None
    for m in range(1, m_max + 1):
        lower, upper = strip_bounds(m, a)
        if lower < b <= upper:
            return m
    return None


@dataclass(frozen=True)
class RegionVerdict:
    label: str                    # "Frame" | "NotFrame" | "Unknown"
    provenance: tuple[str, ...]   # all matching regions, most specific first
    reason: str | None            # NotFrame reason, when applicable
    strip: int | None
    witnesses: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        def num(v):
            if isinstance(v, Fraction):
                return str(v)
            return format(float(v), ".17g")

        return {
            "label": self.label,
            "provenance": list(self.provenance),
            "reason": self.reason,
            "strip": self.strip,
            "witnesses": {k: num(v) for k, v in self.witnesses.items()},
        }


def classify(params: LatticeParams, m_max: int = M_MAX_DEFAULT) -> RegionVerdict:
    """Region verdict with inequality witnesses.

    Obstructions take precedence over frame regions; among frame regions all
    matches are recorded, ordered most specific (new bands and special
    points) to most generic.
    """
    a, b = params.a, params.b
    ab = _ab(params)
    witnesses = {"a": a, "b": b, "ab": ab}
    strip = strip_index(params, m_max=m_max)

    if ab >= 1 or a >= 2:
        reason = f"ab = {ab} >= 1" if ab >= 1 else f"a = {a} >= 2"
        return RegionVerdict("NotFrame", (), f"necessary condition fails: {reason}",
                             strip, witnesses)
    b_int = None
    if params.exact and Fraction(b).denominator == 1:
        b_int = int(Fraction(b))
    elif not params.exact and abs(b - round(b)) == 0:
        b_int = int(round(b))
    if b_int is not None and b_int >= 2 and ab < 1:
        return RegionVerdict("NotFrame", (), f"integer b = {b_int} with ab < 1",
                             strip, witnesses)
    if params.exact and (Fraction(a), Fraction(b)) == OBSTRUCTION_POINT:
        return RegionVerdict("NotFrame", (), "known obstruction point (2/7, 7/4)",
                             strip, witnesses)

    matches: list[str] = []
    if in_gamma3(params):
        matches.append("Gamma3")
        witnesses["gamma3_lower"] = 4 / (2 + 3 * a)
        witnesses["gamma3_upper"] = 2 / (1 + a)
    if in_lambda3(params):
        matches.append("Lambda3")
        witnesses["lambda3_lower"] = 4 / (2 + 3 * a)
        witnesses["lambda3_upper"] = 6 / (2 + 5 * a)
    if params.exact and (Fraction(a), Fraction(b)) in ZZ_SPECIAL_POINTS:
        matches.append(f"ZZ-special({ZZ_SPECIAL_POINTS[(Fraction(a), Fraction(b))]})")
    if in_t1(params):
        matches.append("T1")
    # a strip's b < 1 portion is the only T_m candidate; strips are disjoint
    if strip is not None and strip >= 2 and in_tm(params, strip):
        matches.append(f"T{strip}")
    if in_prop2d(params):
        matches.append("Prop2d")
    if in_prop2b(params):
        matches.append("Prop2b")
    if in_prop2c(params):
        matches.append("Prop2c")

    if strip is not None:
        lower, upper = strip_bounds(strip, a)
        witnesses[f"strip{strip}_lower"] = lower
        witnesses[f"strip{strip}_upper"] = upper

    if matches:
        return RegionVerdict("Frame", tuple(dict.fromkeys(matches)), None, strip, witnesses)
    return RegionVerdict("Unknown", (), None, strip, witnesses)


def dual_support_index(verdict: RegionVerdict) -> int | None:
    """Strip size m for which a certified compactly supported dual exists.

    Only provenances that come with a dual construction qualify; the special
    rational points and the large-a wedge do not.
    """
    constructive = {"Gamma3", "Lambda3", "T1", "Prop2b", "Prop2d"}
    tags = set(verdict.provenance)
    if tags & constructive or any(t.startswith("T") and t[1:].isdigit() for t in tags):
        return verdict.strip
    return None


def region_boundaries(m: int, a_grid) -> list[dict]:
    """Hyperbola values along a grid of a, for plotting region boundaries.

    Emits the strip bounds for index m plus the band boundaries 4/(2+3a),
    6/(2+5a) and 2/(1+a).
    """
    rows = []
    for a in a_grid:
        lower, upper = strip_bounds(m, a)
        rows.append({
            "a": a,
            f"strip{m}_lower": lower,
            f"strip{m}_upper": upper,
            "band_lower": 4 / (2 + 3 * a),
            "band_upper_wide": 6 / (2 + 5 * a),
            "band_upper_narrow": 2 / (1 + a),
        })
    return rows
