"""Command-line surface.

Subcommands: classify, dual, certify, zz, sweep, verify.  Lattice constants
parse as rationals ("1/4"), decimal strings ("0.3", kept exact), or plain
decimals; exact inputs run the exact pipeline.  Output is deterministic:
fixed field order, 17 significant digits for floats, stable row ordering.

Exit codes: 0 success, 1 internal assertion failure, 2 invalid parameters.
A config file of key=value lines can preset grid densities and tolerances;
command-line flags override it.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from .splinecore import LatticeParams
from .frameset import classify, dual_support_index, strip_index
from .certify import certify_params, certify_system
from .dualwindow import build_dual, discontinuity_report
from .verify import bessel_bound, cross_check, duality_residual
from .zibulski import rank_sweep


@dataclass(frozen=True)
class RunConfig:
    mode: str = "auto"             # "auto" | "exact" | "float"
    resolution: int = 512          # dual-window CSV sampling
    residual_grid: int = 64
    zz_nx: int = 200
    zz_nv: int = 200
    sweep_zz_qmax: int = 64
    residual_tol: float = 1e-10
    root_tol: float = 1e-10
    zz_evidence_tol: float = 1e-3
    output_format: str = "json"    # "json" | "csv"

    def validate(self):
        if self.resolution < 2 or self.residual_grid < 2 or self.zz_nx < 2 or self.zz_nv < 2:
            raise ValueError("grid densities must be >= 2")
        if min(self.residual_tol, self.root_tol, self.zz_evidence_tol) <= 0:
            raise ValueError("tolerances must be positive")
        return self


_CONFIG_FIELDS = {f: t for f, t in RunConfig.__annotations__.items()}


def load_config(path: str) -> RunConfig:
    """key=value lines; '#' starts a comment; unknown keys are rejected."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            typ = _CONFIG_FIELDS[key]
            if typ == "int":
                values[key] = int(val.strip())
            elif typ == "float":
                values[key] = float(val.strip())
            else:
                values[key] = val.strip()
    return RunConfig(**values).validate()


def parse_constant(text: str, mode: str = "auto"):
    """Lattice constant from the command line; rationals stay exact."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse lattice constant {text!r}") from exc
    if value <= 0:
        raise ValueError(f"lattice constant must be positive, got {text}")
    if mode == "float":
        return float(value)
    return value


def _params(args, cfg: RunConfig) -> LatticeParams:
    mode = getattr(args, "mode", None) or cfg.mode
    return LatticeParams(parse_constant(args.a, mode), parse_constant(args.b, mode))


def _emit(doc: dict):
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args, cfg: RunConfig) -> int:
    params = _params(args, cfg)
    _emit(classify(params).to_dict())
    return 0


def cmd_certify(args, cfg: RunConfig) -> int:
    params = _params(args, cfg)
    try:
        cert = certify_params(params)
    except ValueError:
        m = strip_index(params)
        if m is None:
            raise ValueError(f"({params.a}, {params.b}) lies in no strip; nothing to certify")
        cert = certify_system(m, params)
    sys.stdout.write(cert.to_json() + "\n")
    return 0


def cmd_dual(args, cfg: RunConfig) -> int:
    params = _params(args, cfg)
    verdict = classify(params)
    m = dual_support_index(verdict)
    if m is None:
        m = strip_index(params)
    if m is None:
        raise ValueError(f"({params.a}, {params.b}) lies in no strip; no dual construction")
    h = build_dual(m, params, resolution=args.resolution or cfg.resolution)
    if args.out:
        h.write_csv(args.out)
    report = {
        "m": m,
        "support_radius": format(float(h.support_radius), ".17g"),
        "bound": format(h.bound(), ".17g"),
        "pieces": len(h.pieces),
        "discontinuities": [
            {"location": format(float(d.location), ".17g"),
             "left": format(float(d.left), ".17g"),
             "right": format(float(d.right), ".17g"),
             "jump": format(float(d.jump), ".17g")}
            for d in discontinuity_report(h)],
        "csv": args.out,
    }
    _emit(report)
    return 0


def cmd_zz(args, cfg: RunConfig) -> int:
    params = _params(args, cfg)
    nx, nv = (args.grid or (cfg.zz_nx, cfg.zz_nv))
    spec = rank_sweep(params, int(nx), int(nv), kind=args.matrix)
    if args.out:
        spec.write_csv(args.out)
    doc = spec.summary()
    doc["csv"] = args.out
    _emit(doc)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    params = _params(args, cfg)
    report = cross_check(params, residual_grid=cfg.residual_grid,
                         zz_grid=(cfg.zz_nx // 4, cfg.zz_nv // 4),
                         zz_qmax=cfg.sweep_zz_qmax,
                         residual_tol=cfg.residual_tol)
    _emit(report.to_dict())
    return 0 if report.ok else 1


def _frange(lo: Fraction, hi: Fraction, n: int):
    step = (hi - lo) / n
    return [lo + (2 * i + 1) * step / 2 for i in range(n)]


def cmd_sweep(args, cfg: RunConfig) -> int:
    a_lo, a_hi, a_n = args.a_range
    b_lo, b_hi, b_n = args.b_range
    a_vals = _frange(Fraction(a_lo), Fraction(a_hi), int(a_n))
    b_vals = _frange(Fraction(b_lo), Fraction(b_hi), int(b_n))
    rows = []
    for a in a_vals:
        for b in b_vals:
            v = classify(LatticeParams(a, b))
            rows.append((a, b, v.label, ";".join(v.provenance), v.strip))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "label", "provenance", "strip"])
        for a, b, label, prov, strip in rows:
            w.writerow([format(float(a), ".17g"), format(float(b), ".17g"),
                        label, prov, "" if strip is None else strip])
    _emit({"rows": len(rows), "csv": args.out})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="b2gabor",
                                 description="Gabor-frame analysis for the triangle window")
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--mode", choices=["auto", "exact", "float"],
                    help="arithmetic mode for parsed constants")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_ab(p):
        p.add_argument("a", help="time shift (rational like 1/4, or decimal)")
        p.add_argument("b", help="frequency shift")

    p = sub.add_parser("classify", help="region verdict for (a, b)")
    add_ab(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dual", help="construct the dual window, export CSV")
    add_ab(p)
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("certify", help="determinant nonvanishing certificate")
    add_ab(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("zz", help="singular-value sweep of the rational-lattice matrix")
    add_ab(p)
    p.add_argument("--grid", nargs=2, type=int, metavar=("NX", "NV"), default=None)
    p.add_argument("--matrix", choices=["psi", "phi"], default="psi")
    p.add_argument("--out", default=None, help="CSV path")
    p.set_defaults(func=cmd_zz)

    p = sub.add_parser("sweep", help="classify a grid of lattice constants")
    p.add_argument("--a-range", nargs=3, metavar=("LO", "HI", "N"), required=True)
    p.add_argument("--b-range", nargs=3, metavar=("LO", "HI", "N"), required=True)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-check classifier, dual and sweep")
    add_ab(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.mode:
            cfg = replace(cfg, mode=args.mode)
        cfg.validate()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
