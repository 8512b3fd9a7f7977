"""JSON and TSV renderings of every artifact the CLI writes.

Floats are written with Python's shortest round-trip repr, so parsing an
artifact and emitting it again reproduces the same bytes.
"""

from __future__ import annotations

import json
import math

from .objectives import BoundsReport
from .partitioning import KMeansResult
from .regularity import MixingReport, RegularityCertificate
from .spectral import GapReport, Spectrum


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def spectrum_json(s: Spectrum, gap: GapReport) -> dict:
    return {
        "rho": [float(x) for x in s.rho],
        "lambda": [float(x) for x in s.lam],
        "k": int(gap.k),
        "theta": float(gap.theta),
        "eps": float(gap.eps),
    }


def partition_json(res: KMeansResult) -> dict:
    return {
        "k": int(res.partition.k),
        "assignment": [int(a) for a in res.partition.assignment],
        "s_squared": float(res.s_squared),
    }


def certificate_json(c: RegularityCertificate) -> dict:
    return {
        "pair": [int(c.pair[0]), int(c.pair[1])],
        "rho": float(c.rho),
        "alpha": float(c.alpha),
        "alpha_mode": c.alpha_mode,
        "bound": float(c.bound),
        "bound_name": c.bound_name,
        "pass": bool(c.passed),
    }


def certificates_json(certs) -> list:
    return [certificate_json(c) for c in certs]


def bounds_json(rep: BoundsReport) -> dict:
    def per_k(d):
        return {str(k): _num(v) for k, v in sorted(d.items())}

    return {
        "n": rep.n,
        "inequalities": [
            {"name": q.name, "lhs": q.lhs, "rhs": q.rhs, "pass": q.passed} for q in rep.inequalities
        ],
        "quantities": {
            "lambda2_half": _num(rep.lambda2_half),
            "h_exact": _num(rep.h_exact),
            "h_witness": rep.h_witness,
            "h_upper": _num(rep.h_upper),
            "h_upper_strong": _num(rep.h_upper_strong),
            "two_variance": _num(rep.two_variance),
            "two_variance_bound": _num(rep.two_variance_bound),
            "fk_exact": per_k(rep.fk_exact),
            "fk_lower": per_k(rep.fk_lower),
            "c_empirical": per_k(rep.c_empirical),
            "qk_min_exact": per_k(rep.qk_min_exact),
            "qk_min_lower": per_k(rep.qk_min_lower),
            "qk_max_exact": per_k(rep.qk_max_exact),
        },
        "skipped": [{"name": name, "error": err} for name, err in rep.skipped],
        "all_pass": rep.all_pass,
    }


def mixing_json(rep: MixingReport) -> dict:
    return {
        "worst_pair": [list(rep.worst_pair[0]), list(rep.worst_pair[1])],
        "worst_ratio": _num(rep.worst_ratio),
        "pass": bool(rep.passed),
        "norm": float(rep.norm),
        "violations": int(rep.violations),
        "pairs_checked": int(rep.pairs_checked),
        "mode": rep.mode,
    }


# -- TSV ---------------------------------------------------------------------


def _tsv(header, rows, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append("\t".join(header))
    for row in rows:
        lines.append("\t".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def spectrum_tsv(obj: dict) -> str:
    rows = [(i + 1, r, l) for i, (r, l) in enumerate(zip(obj["rho"], obj["lambda"]))]
    return _tsv(("i", "rho", "lambda"), rows, [f"k={obj['k']} theta={obj['theta']!r} eps={obj['eps']!r}"])


def partition_tsv(obj: dict) -> str:
    rows = list(enumerate(obj["assignment"]))
    return _tsv(("vertex", "cluster"), rows, [f"k={obj['k']} s_squared={obj['s_squared']!r}"])


def certificates_tsv(objs: list) -> str:
    keys = ("rho", "alpha", "alpha_mode", "bound", "bound_name", "pass")
    rows = [(c["pair"][0], c["pair"][1]) + tuple(c[k] for k in keys) for c in objs]
    return _tsv(("a", "b") + keys, rows)


def bounds_tsv(obj: dict) -> str:
    rows = [(q["name"], q["lhs"], q["rhs"], q["pass"]) for q in obj["inequalities"]]
    comments = [f"skipped {s['name']}: {s['error']}" for s in obj["skipped"]]
    return _tsv(("name", "lhs", "rhs", "pass"), rows, comments)


def mixing_tsv(obj: dict) -> str:
    rows = [(k, v if not isinstance(v, list) else json.dumps(v)) for k, v in obj.items()]
    return _tsv(("key", "value"), rows)


def certificate_summary(certs, *, s_squared: float, eps: float, theta: float, trend: float | None) -> str:
    """Fixed-width table for people; the JSON artifact is the machine format."""
    lines = [
        f"clusters k={1 + max(c.pair[1] for c in certs)}  s^2={s_squared:.6g}  eps={eps:.6g}  theta={theta:.6g}",
    ]
    if trend is not None:
        lines.append(f"two-way trend sqrt((1-theta)/(1-eps)) = {trend:.6g}")
    lines.append(f"{'pair':<8}{'kind':<16}{'rho':>12}{'alpha':>12}{'bound':>12}  {'mode':<16}result")
    for c in certs:
        kind = "intra" if c.pair[0] == c.pair[1] else "inter"
        lines.append(
            f"{c.pair[0]},{c.pair[1]:<6}{kind:<16}{c.rho:>12.6g}{c.alpha:>12.6g}{c.bound:>12.6g}  "
            f"{c.alpha_mode:<16}{'pass' if c.passed else 'FAIL'}"
        )
    npass = sum(c.passed for c in certs)
    lines.append(f"{npass}/{len(certs)} certificates pass")
    return "\n".join(lines) + "\n"
