"""Experiment driver.

Subcommands: validate | solve | oracle | couple | certify-tri | decomp-check
| report.  Configuration is a single JSON document; every artifact embeds
the config hash and tool version so runs are attributable.  Identical
config and seed produce byte-identical artifacts regardless of the worker
count: Monte Carlo paths are chunked at a fixed size with per-chunk seeds
spawned from the master seed, and chunks merge in index order.

Exit codes: 0 ok, 1 invariant violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import hashlib
import json
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .games import GameFormatError, classify_states, load_spec, validate_game
from .oracle import discounted_value
from .simulate import (
    GreedyConciseStrategy,
    coupling_raw,
    coupling_stats_from_raw,
    merge_coupling_raw,
    uniform_strategy,
)
from .triangulation import build_triangulation, cell_count, certify_flatness, vertex_count
from .values import (
    action_grid,
    build_vertex_game,
    limit_value_table,
    separable_decomposition_check,
    solve_discounted,
)

CHUNK = 256


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of a run; validated on load and round-trippable."""

    game: str
    tri_resolution_k: int = 4
    tri_resolution_l: int = 1
    action_grid_m: int = 2
    lambdas: tuple[float, ...] = (0.5, 0.2, 0.1)
    epsilon: float = 0.1
    tol: float = 1e-3
    oracle_tol: float = 1e-3
    seed: int = 0
    horizon: int = 100
    n_paths: int = 512

    def validate(self) -> list[str]:
        bad = []
        if self.tri_resolution_k < 1 or self.tri_resolution_l < 1:
            bad.append("tri_resolution_k/l must be >= 1")
        if self.action_grid_m < 1:
            bad.append("action_grid_m must be >= 1")
        if not self.lambdas or any(not 0 < l <= 1 for l in self.lambdas):
            bad.append("lambdas must lie in (0, 1]")
        if any(b >= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            bad.append("lambdas must be strictly decreasing")
        if not 0 < self.epsilon <= 0.25:
            bad.append("epsilon must lie in (0, 1/4]")
        if self.tol <= 0 or self.oracle_tol <= 0:
            bad.append("tolerances must be positive")
        if self.horizon < 1 or self.n_paths < 1:
            bad.append("horizon and n_paths must be >= 1")
        if self.seed < 0:
            bad.append("seed must be a nonnegative integer")
        return bad

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambdas"] = list(self.lambdas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise GameFormatError(f"unknown config fields: {sorted(unknown)}")
        if "lambdas" in d:
            d = dict(d, lambdas=tuple(float(x) for x in d["lambdas"]))
        cfg = cls(**d)
        bad = cfg.validate()
        if bad:
            raise GameFormatError("invalid config: " + "; ".join(bad))
        return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _stamp(cfg: ExperimentConfig | None) -> dict:
    out = {"version": __version__}
    if cfg is not None:
        out["config_sha256"] = config_hash(cfg)
    return out


def _emit_json(payload: dict, path: Path | None) -> None:
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _csv_writer(path: Path, stamp: dict, header: list[str]):
    fh = open(path, "w", newline="", encoding="utf-8")
    fh.write("# " + " ".join(f"{k}={v}" for k, v in sorted(stamp.items())) + "\n")
    writer = csv.writer(fh)
    writer.writerow(header)
    return fh, writer


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(args) -> int:
    spec = load_spec(args.game)
    report = validate_game(spec)
    info = classify_states(spec)
    payload = {
        **_stamp(None),
        "ok": report.ok,
        "violations": list(report.violations),
        "absorbing": [spec.omega_names[w] for w in info.absorbing],
        "is_absorbing_game": info.is_absorbing_game,
        "omega0": spec.omega_names[info.omega0] if info.omega0 is not None else None,
    }
    _emit_json(payload, None)
    return 0 if report.ok else 1


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    spec = load_spec(cfg.game)
    tri_k = build_triangulation(spec.n_k, cfg.tri_resolution_k)
    tri_l = build_triangulation(spec.n_l, cfg.tri_resolution_l)
    game = build_vertex_game(spec, tri_k, tri_l)
    gx = action_grid(spec.n_k, spec.n_i, cfg.action_grid_m)
    gy = action_grid(spec.n_l, spec.n_j, cfg.action_grid_m)
    table = limit_value_table(game, gx, gy, cfg.lambdas, tol=cfg.tol)
    out = _out_dir(args)
    dest = (out / "values.csv") if out else Path("values.csv")
    fh, writer = _csv_writer(
        dest, _stamp(cfg), ["p_vertex", "q_vertex", "omega", "lambda", "value", "residual", "grid_m"]
    )
    with fh:
        for li, lam in enumerate(table.lambdas):
            for ip in range(game.n_p):
                for iq in range(game.n_q):
                    for iw in range(spec.n_omega):
                        writer.writerow(
                            [
                                "/".join(f"{c:.12g}" for c in tri_k.vertices[ip]),
                                "/".join(f"{c:.12g}" for c in tri_l.vertices[iq]),
                                spec.omega_names[iw],
                                f"{lam:.12g}",
                                f"{table.values[li, ip, iq, iw]:.12g}",
                                f"{table.residuals[li]:.3e}",
                                cfg.action_grid_m,
                            ]
                        )
    summary = {
        **_stamp(cfg),
        "values_csv": str(dest),
        "max_oscillation_last3": table.max_oscillation,
        "lambdas": list(table.lambdas),
    }
    _emit_json(summary, (out / "solve_summary.json") if out else None)
    return 0


def cmd_oracle(args) -> int:
    spec = load_spec(args.game)
    info = classify_states(spec)
    omega = spec.omega_names.index(args.omega) if args.omega else (
        info.omega0 if info.omega0 is not None else 0
    )
    p = np.array([float(v) for v in args.p.split(",")]) if args.p else np.full(spec.n_k, 1.0 / spec.n_k)
    q = np.array([float(v) for v in args.q.split(",")]) if args.q else np.full(spec.n_l, 1.0 / spec.n_l)
    res = discounted_value(spec, p, q, omega, args.discount, tol=args.tol)
    payload = {
        **_stamp(None),
        "value": res.value,
        "horizon": res.horizon,
        "error_bound": res.error_bound,
        "method": res.method,
        "lambda": args.discount,
        "omega": spec.omega_names[omega],
    }
    _emit_json(payload, None)
    return 0


def cmd_certify_tri(args) -> int:
    tri = build_triangulation(args.types, args.resolution)
    cert = certify_flatness(tri, args.samples, np.random.default_rng(args.seed))
    payload = {
        **_stamp(None),
        "types": args.types,
        "resolution": args.resolution,
        "vertex_count": tri.n_vertices,
        "cell_count": tri.n_cells,
        "vertex_count_closed_form": vertex_count(args.types, args.resolution),
        "cell_count_closed_form": cell_count(args.types, args.resolution),
        "stepsize": cert.stepsize,
        "c_cert": cert.c_cert,
        "samples": cert.samples,
        "violations": list(cert.violations),
    }
    _emit_json(payload, None)
    return 0 if not cert.violations else 1


def cmd_decomp_check(args) -> int:
    cfg = load_config(args.config)
    spec = load_spec(cfg.game)
    tri_k = build_triangulation(spec.n_k, cfg.tri_resolution_k)
    tri_l = build_triangulation(spec.n_l, cfg.tri_resolution_l)
    game = build_vertex_game(spec, tri_k, tri_l)
    rep = separable_decomposition_check(game, args.samples, np.random.default_rng(cfg.seed))
    payload = {
        **_stamp(cfg),
        "samples": rep.samples,
        "max_payoff_error": rep.max_payoff_error,
        "max_transition_error": rep.max_transition_error,
        "ok": rep.max_payoff_error < 1e-12 and rep.max_transition_error < 1e-12,
    }
    _emit_json(payload, None)
    return 0 if payload["ok"] else 1


def _coupling_chunk(payload):
    (spec, tri_k, tri_l, cfg, chunk_idx, n) = payload
    game = build_vertex_game(spec, tri_k, tri_l)
    gx = action_grid(spec.n_k, spec.n_i, cfg.action_grid_m)
    gy = action_grid(spec.n_l, spec.n_j, cfg.action_grid_m)
    vf = solve_discounted(game, cfg.lambdas[-1], gx, gy, tol=cfg.tol)
    sigma = GreedyConciseStrategy(game, vf, cfg.epsilon, gx, gy)
    tau = uniform_strategy(spec.n_l, spec.n_j)
    info = classify_states(spec)
    omega0 = info.omega0 if info.omega0 is not None else 0
    p0 = _center_vertex(tri_k)
    q0 = tri_l.vertices[0]
    return coupling_raw(
        spec, tri_k, tri_l, sigma.action, lambda pv, qv, w: tau(pv, qv, w),
        p0, q0, omega0, cfg.epsilon, cfg.horizon, n, (cfg.seed, chunk_idx),
    )


def _center_vertex(tri) -> np.ndarray:
    center = np.full(tri.n_types, 1.0 / tri.n_types)
    best = min(range(tri.n_vertices), key=lambda t: float(np.abs(tri.vertices[t] - center).sum()))
    return tri.vertices[best]


def cmd_couple(args) -> int:
    cfg = load_config(args.config)
    spec = load_spec(cfg.game)
    tri_k = build_triangulation(spec.n_k, cfg.tri_resolution_k)
    tri_l = build_triangulation(spec.n_l, cfg.tri_resolution_l)
    chunks = [
        (spec, tri_k, tri_l, cfg, idx, min(CHUNK, cfg.n_paths - idx * CHUNK))
        for idx in range((cfg.n_paths + CHUNK - 1) // CHUNK)
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if args.workers > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
                raws = list(pool.map(_coupling_chunk, chunks))
        else:
            raws = [_coupling_chunk(c) for c in chunks]
    raw = merge_coupling_raw(raws)
    cert = certify_flatness(tri_k, 2000, np.random.default_rng(0))
    stats = coupling_stats_from_raw(raw, spec, tri_k, cfg.epsilon, cert.c_cert)
    out = _out_dir(args)
    payload = {
        **_stamp(cfg),
        "n_paths": stats.n_paths,
        "horizon": stats.horizon,
        "sup_mean_gap_l1": stats.sup_mean_gap_l1,
        "stopped_gap_l1": {"mean": stats.stopped_gap_l1.mean, "se": stats.stopped_gap_l1.se},
        "p_escape_outside_band": stats.p_escape_outside_band,
        "variation_l1": {"mean": stats.variation_l1.mean, "se": stats.variation_l1.se},
        "z_mean": stats.z_mean.tolist(),
        "z_se": stats.z_se.tolist(),
        "gap_sq": {"mean": stats.gap_sq.mean, "se": stats.gap_sq.se},
        "sum_z_sq": {"mean": stats.sum_z_sq.mean, "se": stats.sum_z_sq.se},
        "zero_mean_ok": stats.zero_mean_ok(),
        "variance_identity_ok": stats.variance_identity_ok(),
        "alpha_required": stats.alpha_required,
        "alpha_satisfied": stats.alpha_satisfied,
        "stepsize": stats.stepsize,
    }
    _emit_json(payload, (out / "coupling.json") if out else None)
    ok = stats.zero_mean_ok() and stats.variance_identity_ok()
    return 0 if ok else 1


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    if out is None:
        print("report needs --out", file=sys.stderr)
        return 2
    rc = 0
    spec = load_spec(cfg.game)
    report = validate_game(spec)
    _emit_json({**_stamp(cfg), "ok": report.ok, "violations": list(report.violations)},
               out / "validate.json")
    rc = max(rc, 0 if report.ok else 1)
    ns = argparse.Namespace(config=args.config, out=str(out))
    rc = max(rc, cmd_solve(ns))
    tri_args = argparse.Namespace(
        types=spec.n_k, resolution=cfg.tri_resolution_k, samples=20000, seed=cfg.seed
    )
    tri = build_triangulation(spec.n_k, cfg.tri_resolution_k)
    cert = certify_flatness(tri, 20000, np.random.default_rng(cfg.seed))
    _emit_json(
        {**_stamp(cfg), "stepsize": cert.stepsize, "c_cert": cert.c_cert,
         "vertex_count": tri.n_vertices, "cell_count": tri.n_cells},
        out / "triangulation.json",
    )
    del tri_args
    game = build_vertex_game(spec, tri, build_triangulation(spec.n_l, cfg.tri_resolution_l))
    rep = separable_decomposition_check(game, 200, np.random.default_rng(cfg.seed))
    _emit_json(
        {**_stamp(cfg), "max_payoff_error": rep.max_payoff_error,
         "max_transition_error": rep.max_transition_error},
        out / "decomposition.json",
    )
    rc = max(rc, 0 if rep.max_payoff_error < 1e-12 and rep.max_transition_error < 1e-12 else 1)
    rc = max(rc, cmd_couple(argparse.Namespace(config=args.config, out=str(out), workers=args.workers)))
    return rc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="beliefgames",
        description="Approximate discounted values of absorbing games with two-sided "
        "incomplete information and verify the belief-dynamics identities.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("validate", help="validate a game document")
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve the vertex game over the discount ladder")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact truncated-game value of the original game")
    p.add_argument("--game", required=True)
    p.add_argument("--discount", type=float, required=True)
    p.add_argument("--omega", default=None)
    p.add_argument("--p", default=None, help="comma-separated prior on K")
    p.add_argument("--q", default=None, help="comma-separated prior on L")
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("couple", help="run the coupled belief simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("certify-tri", help="triangulation statistics and flatness certificate")
    p.add_argument("--types", type=int, required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_certify_tri)

    p = sub.add_parser("decomp-check", help="verify the separable factor forms")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_decomp_check)

    p = sub.add_parser("report", help="full pipeline into an output directory")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "func", None):
        ap.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (GameFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
