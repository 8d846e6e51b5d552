"""Command-line interface.

Subcommands: ``realization``, ``coeffs``, ``equations``, ``verify``.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .algebra import build_involution_matrix, grading_element, weyl_generators
from .exponents import ZERO, ZERO_PRIME, exponent_labels, root
from .heisenberg import (
    beta_closed,
    coxeter,
    cyclic_element,
    eta,
    g_closed,
    g_sum_target,
    heisenberg_basis,
    hierarchy_coefficients,
    kappa,
)
from .hirota import equations_emit
from .verify import run_verification

FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    n: int = 4
    degree: int = 8
    y_degree: int = 4
    tolerance: float = 1e-8
    seed: int = 42
    format: str = "text"
    output: str | None = None
    inject_beta_error: float = 0.0
    timings: bool = False

    def problems(self) -> list[str]:
        out = []
        if not 3 <= self.n <= 12:
            out.append(f"--n must lie in 3..12 (got {self.n})")
        if not 1 <= self.degree <= 16:
            out.append(f"--degree must lie in 1..16 (got {self.degree})")
        if not 0 < self.tolerance < 1e-4:
            out.append(f"--tolerance must lie in (0, 1e-4) (got {self.tolerance})")
        if not 0 <= self.y_degree <= self.degree:
            out.append(f"--y-degree must lie in 0..degree (got {self.y_degree})")
        return out


def cnum(z: complex) -> list[float]:
    z = complex(z)
    # normalize -0.0 so output is byte-stable
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def matrix_json(A) -> list:
    return [[cnum(x) for x in row] for row in np.asarray(A)]


def label_key(label) -> str:
    return f"{label.value}prime" if label.primed else str(label.value)


# ------------------------------------------------------------------ payloads


def realization_payload(n: int) -> dict:
    ws = weyl_generators(n)
    T = heisenberg_basis(n)
    h = coxeter(n)
    out = {
        "n": n,
        "h": h,
        "kappa": cnum(kappa(n)),
        "S": matrix_json(build_involution_matrix(n)),
        "e": {str(i): matrix_json(ws.e[i]) for i in range(n + 1)},
        "f": {str(i): matrix_json(ws.f[i]) for i in range(n + 1)},
        "h_gen": {str(i): matrix_json(ws.h[i]) for i in range(n + 1)},
        "Lambda": matrix_json(cyclic_element(n)),
        "rho_vee": matrix_json(grading_element(n).rho_vee),
    }
    for lab in exponent_labels(n):
        pref = math.sqrt(n - 1) * kappa(n) if lab.primed else 1.0
        out[f"T_{label_key(lab)}"] = {
            "label": str(lab),
            "prefactor": cnum(pref),
            "matrix": matrix_json(T[lab]),
        }
    tags = [root(s) for s in range(h)] + [ZERO, ZERO_PRIME]
    out["eta"] = {str(t): [cnum(x) for x in eta(n, t)] for t in tags}
    return out


def coeffs_payload(n: int, inject: float = 0.0) -> dict:
    ext = hierarchy_coefficients(n, "extract")
    if inject:
        ext = ext.perturbed(inject)
    beta_rows = []
    for r in range(1, n + 1):
        for lab in exponent_labels(n):
            b_ext, b_cl = ext.beta[(r, lab)], beta_closed(n, r, lab)
            beta_rows.append(
                {
                    "r": r,
                    "label": str(lab),
                    "extracted": cnum(b_ext),
                    "closed": cnum(b_cl),
                    "abs_diff": abs(b_ext - b_cl),
                }
            )
    g_rows = []
    for r in range(1, n + 1):
        g_rows.append(
            {
                "r": r,
                "extracted": cnum(ext.g[r]),
                "closed": cnum(g_closed(n, r)),
                "abs_diff": abs(ext.g[r] - g_closed(n, r)),
            }
        )
    return {
        "n": n,
        "h": coxeter(n),
        "beta": beta_rows,
        "g": g_rows,
        "g_sum": cnum(sum(ext.g.values())),
        "g_sum_target": g_sum_target(n),
        "max_beta_diff": max(row["abs_diff"] for row in beta_rows),
        "max_g_diff": max(row["abs_diff"] for row in g_rows),
    }


def equations_payload(n: int, y_degree: int) -> dict:
    coeffs = hierarchy_coefficients(n, "extract")
    h = coxeter(n)
    records = []
    for eq in equations_emit(coeffs, y_degree):
        records.append(
            {
                "y_monomial": [e.name(h) for e in eq.y_monomial],
                "trivial": eq.trivial,
                "terms": [
                    {"d_monomial": [e.name(h) for e in mono], "coeff": cnum(c)}
                    for mono, c in eq.d_polynomial.items()
                ],
            }
        )
    return {"n": n, "h": h, "y_degree": y_degree, "equations": records}


# ------------------------------------------------------------------ rendering


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


CHOP = 1e-12  # text tables only; json and csv keep every digit


def _fmt(z) -> str:
    re, im = (0.0 if abs(x) < CHOP else x for x in z)
    if im == 0:
        return f"{re:.12g}"
    return f"{re:.12g}{im:+.12g}i"


def render_realization(p: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(p)
    mats = [("S", p["S"]), ("Lambda", p["Lambda"]), ("rho_vee", p["rho_vee"])]
    for fam in ("e", "f", "h_gen"):
        mats += [(f"{fam}_{i}", m) for i, m in p[fam].items()]
    mats += [(k, v["matrix"]) for k, v in p.items() if k.startswith("T_")]
    if fmt == "csv":
        rows = [["name", "row", "col", "re", "im"]]
        for name, M in mats:
            for i, row in enumerate(M, 1):
                for j, (re, im) in enumerate(row, 1):
                    if re or im:
                        rows.append([name, i, j, repr(re), repr(im)])
        for tag, vec in p["eta"].items():
            for i, (re, im) in enumerate(vec, 1):
                rows.append([f"eta_{tag}", i, 1, repr(re), repr(im)])
        return _csv(rows)
    lines = [f"D_{p['n']}^(1) realization: dim {2 * p['n']}, h = {p['h']}, kappa = {_fmt(p['kappa'])}"]
    for name, M in mats:
        lines.append(f"\n{name}:")
        for row in M:
            lines.append("  " + " ".join(f"{_fmt(z):>12}" for z in row))
    for tag, vec in p["eta"].items():
        lines.append(f"\neta_{tag}: " + ", ".join(_fmt(z) for z in vec))
    return "\n".join(lines) + "\n"


def render_coeffs(p: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(p)
    if fmt == "csv":
        rows = [
            [
                "r",
                "label",
                "beta_extracted_re",
                "beta_extracted_im",
                "beta_closed_re",
                "beta_closed_im",
                "abs_diff",
            ]
        ]
        for b in p["beta"]:
            rows.append([b["r"], b["label"], *map(repr, b["extracted"] + b["closed"]), repr(b["abs_diff"])])
        text = _csv(rows) + "\r\n"
        grows = [["r", "g_extracted_re", "g_extracted_im", "g_closed_re", "g_closed_im", "abs_diff"]]
        for g in p["g"]:
            grows.append([g["r"], *map(repr, g["extracted"] + g["closed"]), repr(g["abs_diff"])])
        grows.append(["sum", *map(repr, p["g_sum"]), repr(p["g_sum_target"]), "0.0", ""])
        return text + _csv(grows)
    w = 30
    head = f"{'extracted':<{w}}  {'closed':<{w}}  |diff|"
    lines = [f"D_{p['n']}^(1), h = {p['h']}", "", f"beta[r, label]   {head}"]
    for b in p["beta"]:
        lines.append(
            f"  r={b['r']:<2} {b['label']:>4}   {_fmt(b['extracted']):<{w}}  {_fmt(b['closed']):<{w}}  {b['abs_diff']:.2e}"
        )
    lines += ["", f"g[r]             {head}"]
    for g in p["g"]:
        lines.append(
            f"  r={g['r']:<2}        {_fmt(g['extracted']):<{w}}  {_fmt(g['closed']):<{w}}  {g['abs_diff']:.2e}"
        )
    lines += ["", f"sum g_r = {_fmt(p['g_sum'])}    n h (h+1) / 12 = {p['g_sum_target']:.12g}"]
    return "\n".join(lines) + "\n"


def render_equations(p: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(p)
    if fmt == "csv":
        rows = [["y_monomial", "d_monomial", "coeff_re", "coeff_im", "trivial"]]
        for eq in p["equations"]:
            y = "*".join(f"y{x}" for x in eq["y_monomial"]) or "1"
            if not eq["terms"]:
                rows.append([y, "", "0.0", "0.0", str(eq["trivial"]).lower()])
            for t in eq["terms"]:
                d = "*".join(f"D{x}" for x in t["d_monomial"]) or "1"
                rows.append([y, d, *map(repr, t["coeff"]), str(eq["trivial"]).lower()])
        return _csv(rows)
    lines = [f"Hirota equations of D_{p['n']}^(1) up to y-degree {p['y_degree']}"]
    for eq in p["equations"]:
        y = "*".join(f"y{x}" for x in eq["y_monomial"]) or "1"
        body = " + ".join(
            f"({_fmt(t['coeff'])}) " + ("*".join(f"D{x}" for x in t["d_monomial"]) or "1")
            for t in eq["terms"]
        ) or "0"
        tag = "trivial" if eq["trivial"] else "nontrivial"
        lines.append(f"[{y}] {body}   [{tag}]")
    return "\n".join(lines) + "\n"


def render_report(d: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(d)
    timed = d["checks"] and "elapsed" in d["checks"][0]
    if fmt == "csv":
        header = ["check", "status", "residual"] + (["elapsed"] if timed else []) + ["detail"]
        rows = [header]
        for c in d["checks"]:
            status = ("pass" if c["passed"] else "FAIL") if c["gating"] else "info"
            row = [c["name"], status, repr(c["residual"])]
            if timed:
                row.append(f"{c['elapsed']:.3f}")
            rows.append(row + [c["detail"]])
        rows.append(["overall", "pass" if d["passed"] else "FAIL", "", *([""] if timed else []), ""])
        return _csv(rows)
    cfg = d["config"]
    lines = ["verification: " + ", ".join(f"{k}={v}" for k, v in cfg.items())]
    for c in d["checks"]:
        status = ("PASS" if c["passed"] else "FAIL") if c["gating"] else "info"
        extra = f"  {c['elapsed']:.2f}s" if timed else ""
        note = f"  ({c['detail']})" if c["detail"] else ""
        lines.append(f"  {status}  {c['name']:<24} residual {c['residual']:.3e}{extra}{note}")
    lines.append("overall: " + ("PASS" if d["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=4, help="rank n >= 3 (default 4)")
    common.add_argument("--degree", type=int, default=8, help="truncation degree N (default 8)")
    common.add_argument("--y-degree", type=int, default=4, help="y-degree bound for equations (default 4)")
    common.add_argument("--tolerance", type=float, default=1e-8, help="pass threshold (default 1e-8)")
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--inject-beta-error", type=float, default=0.0, help=argparse.SUPPRESS)
    common.add_argument("--timings", action="store_true", help="include elapsed seconds in verify output")

    parser = argparse.ArgumentParser(
        prog="dnhirota",
        description="Kac-Wakimoto hierarchy of type D_n^(1): realization data, coefficients, Hirota equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("realization", parents=[common], help="matrices of the principal realization")
    sub.add_parser("coeffs", parents=[common], help="beta_{r,j} and g_r, extracted vs closed form")
    sub.add_parser("equations", parents=[common], help="expanded Hirota bilinear equations")
    sub.add_parser("verify", parents=[common], help="run all verification suites")
    return parser


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        n=args.n,
        degree=args.degree,
        y_degree=args.y_degree,
        tolerance=args.tolerance,
        seed=args.seed,
        format=args.format,
        output=args.output,
        inject_beta_error=args.inject_beta_error,
        timings=args.timings,
    )
    problems = cfg.problems()
    if problems:
        parser.error("; ".join(problems))  # exits with status 2

    if args.command == "realization":
        _write(render_realization(realization_payload(cfg.n), cfg.format), cfg.output)
        return 0
    if args.command == "coeffs":
        p = coeffs_payload(cfg.n, cfg.inject_beta_error)
        _write(render_coeffs(p, cfg.format), cfg.output)
        worst = max(p["max_beta_diff"], p["max_g_diff"], abs(p["g_sum"][0] - p["g_sum_target"]))
        return 0 if worst <= cfg.tolerance else 1
    if args.command == "equations":
        _write(render_equations(equations_payload(cfg.n, cfg.y_degree), cfg.format), cfg.output)
        return 0
    report = run_verification(
        cfg.n, cfg.degree, cfg.tolerance, cfg.seed, inject_beta_error=cfg.inject_beta_error
    )
    _write(render_report(report.to_dict(cfg.timings), cfg.format), cfg.output)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
