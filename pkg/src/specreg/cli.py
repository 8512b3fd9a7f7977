"""Command-line front end: ``specreg <command> [options]``.

Exit status is 0 on success, 1 on a domain error (the error code is printed
on stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import report
from .errors import DegenerateSpectrum, SpecregError
from .generators import PlantedModel, generate_with_info, read_model
from .graph import format_edge_list, read_edge_list, write_edge_list
from .objectives import verify_bounds
from .partitioning import DEFAULT_RESTARTS, spectral_cluster
from .regularity import (
    DEFAULT_TRIALS,
    EXACT_CAP,
    MIXING_MAX_N,
    certify,
    mixing_check_exact,
    mixing_check_sampled,
    structural_s_squared,
    tail_eps,
    two_way_trend,
)
from .spectral import decompose, parse_policy, select_k

COMMANDS = ("generate", "spectrum", "cluster", "certify", "bounds", "mixing")

DEFAULTS = {
    "in": None,
    "out": None,
    "k": "auto",
    "policy": "gap",
    "seed": 0,
    "restarts": DEFAULT_RESTARTS,
    "trials": DEFAULT_TRIALS,
    "exact_cap": EXACT_CAP,
    "format": "json",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None
    output: str | None
    k: int | None
    policy: object
    seed: int
    restarts: int
    trials: int
    exact_cap: int
    format: str
    seed_given: bool = False


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="in", metavar="PATH", help="input graph (edge list) or model (JSON)")
    common.add_argument("--out", metavar="PATH", help="output artifact; stdout if omitted")
    common.add_argument("--config", metavar="PATH", help="JSON file with defaults for any flag")
    common.add_argument("--k", help="'auto' or a fixed cluster count")
    common.add_argument("--policy", help="'gap' or 'threshold:EPS' (used when --k auto)")
    common.add_argument("--seed", type=int)
    common.add_argument("--restarts", type=int, help="k-means restarts")
    common.add_argument("--trials", type=int, help="random subset pairs for sampled checks")
    common.add_argument("--exact-cap", dest="exact_cap", type=int, help="per-side size cap for exact scans")
    common.add_argument("--format", choices=("json", "tsv"))
    parser = argparse.ArgumentParser(prog="specreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "generate": "sample a planted-partition graph from a model file",
        "spectrum": "eigenvalues and the structural count",
        "cluster": "spectral clustering into k parts",
        "certify": "volume-regularity certificates for the spectral clusters",
        "bounds": "check the isoperimetric, cut, variance and modularity bounds",
        "mixing": "check the weighted expander mixing lemma",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over built-in defaults."""
    merged = dict(DEFAULTS)
    file_cfg = {}
    if ns.config:
        try:
            file_cfg = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    flags = {key: getattr(ns, key) for key in DEFAULTS if getattr(ns, key, None) is not None}
    seed_given = "seed" in flags or "seed" in file_cfg
    merged.update(flags)

    k_text = str(merged["k"])
    if k_text == "auto":
        k = None
    else:
        try:
            k = int(k_text)
        except ValueError:
            raise UsageError(f"--k must be 'auto' or an integer, got {k_text!r}") from None
        if k < 1:
            raise UsageError("--k must be at least 1")
    try:
        policy = parse_policy(str(merged["policy"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for key in ("restarts", "trials", "exact_cap"):
        if int(merged[key]) < (0 if key == "trials" else 1):
            raise UsageError(f"--{key.replace('_', '-')} out of range")
    if int(merged["exact_cap"]) > 20:
        raise UsageError("--exact-cap above 20 is not supported")
    if merged["format"] not in ("json", "tsv"):
        raise UsageError("--format must be json or tsv")
    if merged["in"] is None:
        raise UsageError("--in is required")
    return RunConfig(
        command=ns.command,
        input=merged["in"],
        output=merged["out"],
        k=k,
        policy=policy,
        seed=int(merged["seed"]),
        restarts=int(merged["restarts"]),
        trials=int(merged["trials"]),
        exact_cap=int(merged["exact_cap"]),
        format=merged["format"],
        seed_given=seed_given,
    )


def _emit(cfg: RunConfig, obj, tsv_renderer) -> None:
    text = report.dumps(obj) if cfg.format == "json" else tsv_renderer(obj)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_generate(cfg: RunConfig) -> None:
    model = read_model(cfg.input)
    if cfg.seed_given:
        model = PlantedModel(model.sizes, model.probs, cfg.seed, model.membership, model.membership_probs)
    res = generate_with_info(model)
    sidecar = {
        "k": int(res.planted.k),
        "assignment": [int(a) for a in res.planted.assignment],
        "model": model.to_json(),
        **res.metadata,
    }
    if cfg.output:
        write_edge_list(res.graph, cfg.output)
        Path(cfg.output + ".planted.json").write_text(report.dumps(sidecar), encoding="utf-8")
    else:
        sys.stdout.write(format_edge_list(res.graph))


def _gap(cfg, s):
    return select_k(s, ("fixed", cfg.k) if cfg.k is not None else cfg.policy)


def _cmd_spectrum(cfg: RunConfig) -> None:
    g = read_edge_list(cfg.input)
    s = decompose(g)
    _emit(cfg, report.spectrum_json(s, _gap(cfg, s)), report.spectrum_tsv)


def _cluster(cfg, g, s):
    k = _gap(cfg, s).k
    return spectral_cluster(g, k, seeds=cfg.restarts, rng_seed=cfg.seed, spectrum=s)


def _cmd_cluster(cfg: RunConfig) -> None:
    g = read_edge_list(cfg.input)
    s = decompose(g)
    _emit(cfg, report.partition_json(_cluster(cfg, g, s)), report.partition_tsv)


def _cmd_certify(cfg: RunConfig) -> None:
    g = read_edge_list(cfg.input)
    s = decompose(g)
    res = _cluster(cfg, g, s)
    if res.partition.k < 2:
        raise DegenerateSpectrum("certify needs k >= 2; no structural eigenvalue beyond the trivial one")
    certs = certify(g, s, res, exact_cap=cfg.exact_cap, trials=cfg.trials, rng_seed=cfg.seed)
    k = res.partition.k
    summary = report.certificate_summary(
        certs,
        s_squared=structural_s_squared(g, s, res.partition),
        eps=tail_eps(s, k),
        theta=float(s.abs_rho[k - 1]),
        trend=two_way_trend(s) if k == 2 else None,
    )
    _emit(cfg, report.certificates_json(certs), report.certificates_tsv)
    if cfg.output:
        Path(cfg.output + ".summary.txt").write_text(summary, encoding="utf-8")
        sys.stdout.write(summary)
    else:
        sys.stderr.write(summary)


def _cmd_bounds(cfg: RunConfig) -> None:
    g = read_edge_list(cfg.input)
    ks = [cfg.k] if cfg.k is not None else [k for k in (2, 3) if k <= g.n]
    _emit(cfg, report.bounds_json(verify_bounds(g, ks)), report.bounds_tsv)


def _cmd_mixing(cfg: RunConfig) -> None:
    g = read_edge_list(cfg.input)
    if g.n <= MIXING_MAX_N:
        rep = mixing_check_exact(g)
    else:
        rep = mixing_check_sampled(g, max(cfg.trials, 1), cfg.seed)
    _emit(cfg, report.mixing_json(rep), report.mixing_tsv)


HANDLERS = {
    "generate": _cmd_generate,
    "spectrum": _cmd_spectrum,
    "cluster": _cmd_cluster,
    "certify": _cmd_certify,
    "bounds": _cmd_bounds,
    "mixing": _cmd_mixing,
}


def run(cfg: RunConfig) -> int:
    try:
        HANDLERS[cfg.command](cfg)
    except SpecregError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: InvalidInput: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
