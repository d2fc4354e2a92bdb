"""Batch front-end: run checks, solvers, and oracle campaigns from JSON
configs, writing reports and traces for scripts and CI.

Exit codes: 0 all checks passed / run converged, 1 a violation or
non-convergence was found (and reported), 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import catalog
from .oracle import enumerate_points, run_agreement_campaign
from .order import (
    CoupledMap,
    PreorderCtx,
    SelfMap,
    check_isotone,
    check_phi_bound,
    check_preorder_laws,
    seed_search,
)
from .relations import check_weakly_left_related, check_weakly_right_related
from .solvers import (
    SolverConfig,
    couple_iterate,
    kmap_round_robin,
    pair_iterate,
    triple_iterate,
)
from .spaces import check_axioms, check_T0, space_from_json

SCHEMA_VERSION = "1"


class ConfigError(ValueError):
    pass


# -- config plumbing ----------------------------------------------------


def _load_config(path: str, allowed: set, required: set) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path!r}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f'config must declare "schema": "{SCHEMA_VERSION}"')
    unknown = set(cfg) - allowed - {"schema"}
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    missing = required - set(cfg)
    if missing:
        raise ConfigError(f"missing config fields: {sorted(missing)}")
    return cfg


def _build_space(obj: dict):
    if not isinstance(obj, dict):
        raise ConfigError("space must be an object")
    if "kind" in obj:
        try:
            return space_from_json(obj)
        except ValueError as exc:
            raise ConfigError(str(exc))
    params = dict(obj)
    space_id = params.pop("id", None)
    if space_id is None:
        raise ConfigError('space needs either "kind" or "id"')
    try:
        return catalog.get_space(space_id, **params)
    except (catalog.CatalogError, KeyError, ValueError) as exc:
        raise ConfigError(f"bad space config: {exc}")


def _build_phi(obj: dict):
    if not isinstance(obj, dict) or "id" not in obj:
        raise ConfigError('phi must be an object with an "id"')
    params = dict(obj)
    phi_id = params.pop("id")
    try:
        return catalog.get_phi(phi_id, **params)
    except (catalog.CatalogError, KeyError, ValueError) as exc:
        raise ConfigError(f"bad phi config: {exc}")


def _build_map(obj: dict):
    if not isinstance(obj, dict) or "id" not in obj:
        raise ConfigError('each map must be an object with an "id"')
    params = dict(obj)
    map_id = params.pop("id")
    try:
        return catalog.get_map(map_id, **params)
    except (catalog.CatalogError, KeyError, ValueError) as exc:
        raise ConfigError(f"bad map config: {exc}")


def _build_maps(objs, want_coupled_first=True):
    if not isinstance(objs, list) or not objs:
        raise ConfigError("maps must be a nonempty list")
    maps = [_build_map(o) for o in objs]
    if want_coupled_first:
        if not isinstance(maps[0], CoupledMap):
            raise ConfigError("the first map must be a coupled (two-argument) map")
        for m in maps[1:]:
            if not isinstance(m, SelfMap):
                raise ConfigError("maps after the first must be self maps")
    return maps


_SOLVER_KEYS = {"tol", "max_iter", "stall_window", "direction", "metric_mode", "verify_hypotheses"}


def _build_solver_cfg(obj: Optional[dict]) -> SolverConfig:
    if obj is None:
        return SolverConfig()
    if not isinstance(obj, dict):
        raise ConfigError("solver must be an object")
    unknown = set(obj) - _SOLVER_KEYS
    if unknown:
        raise ConfigError(f"unknown solver fields: {sorted(unknown)}")
    try:
        return SolverConfig(**obj)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver config: {exc}")


# -- output -------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(payload: dict, out_dir: str, filename: str = "report.json") -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _write_trace(trace, out_dir: str, filename: str = "trace.csv") -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    tmp = path + ".tmp"
    trace.write_csv(tmp)
    os.replace(tmp, path)
    return path


# -- subcommands ---------------------------------------------------------


def _cmd_check_space(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"space", "sample", "grid", "slack", "require_t0", "output_dir"},
        required={"space", "output_dir"},
    )
    space = _build_space(cfg["space"])
    sample = cfg.get("sample", "default")
    slack = float(cfg.get("slack", 1e-12))
    if sample not in ("default", "exhaustive"):
        raise ConfigError('sample must be "default" or "exhaustive"')
    axioms = check_axioms(space, sample, slack=slack)
    t0 = check_T0(space, sample, slack=slack)
    ok = axioms.passed and (t0.passed or not cfg.get("require_t0", False))
    _write_json(
        {"axioms": axioms.as_dict(), "t0": t0.as_dict(), "passed": ok},
        cfg["output_dir"],
    )
    return 0 if ok else 1


def _cmd_check_order(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"space", "phi", "maps", "sample", "slack", "metric_mode", "output_dir"},
        required={"space", "phi", "output_dir"},
    )
    space = _build_space(cfg["space"])
    phi = _build_phi(cfg["phi"])
    ctx = PreorderCtx(
        space, phi,
        metric_mode=cfg.get("metric_mode", "plain"),
        slack=float(cfg.get("slack", 1e-12)),
    )
    sample = cfg.get("sample", "default")
    laws = check_preorder_laws(ctx, sample)
    bound = check_phi_bound(phi, space.grid() if not space.is_finite else space.points())
    payload = {"laws": laws.as_dict(), "phi_bound": bound.as_dict()}
    ok = laws.passed and bound.passed
    if "maps" in cfg:
        coupled = _build_maps(cfg["maps"])[0]
        iso = check_isotone(ctx, coupled, "grid" if not space.is_finite else "exhaustive")
        payload["isotone"] = iso.as_dict()
        ok = ok and iso.passed
    payload["passed"] = ok
    _write_json(payload, cfg["output_dir"])
    return 0 if ok else 1


def _cmd_check_relations(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"space", "phi", "maps", "relation", "slack", "metric_mode", "output_dir"},
        required={"space", "phi", "maps", "output_dir"},
    )
    space = _build_space(cfg["space"])
    phi = _build_phi(cfg["phi"])
    ctx = PreorderCtx(
        space, phi,
        metric_mode=cfg.get("metric_mode", "plain"),
        slack=float(cfg.get("slack", 1e-12)),
    )
    maps = _build_maps(cfg["maps"])
    if len(maps) != 2:
        raise ConfigError("check-relations needs exactly [coupled map, self map]")
    relation = cfg.get("relation", "left")
    sample = "exhaustive" if space.is_finite else "grid"
    if relation == "left":
        report = check_weakly_left_related(ctx, maps[0], maps[1], sample)
    elif relation == "right":
        report = check_weakly_right_related(ctx, maps[0], maps[1], sample)
    else:
        raise ConfigError('relation must be "left" or "right"')
    _write_json(report.as_dict(), cfg["output_dir"])
    return 0 if report.passed else 1


_SCHEME_SELF_MAPS = {"single": 0, "pair": 1, "triple": 2}


def _cmd_solve(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"space", "phi", "maps", "scheme", "seed_pair", "solver",
                 "strict_seed", "slack", "output_dir"},
        required={"space", "phi", "maps", "scheme", "seed_pair", "output_dir"},
    )
    space = _build_space(cfg["space"])
    phi = _build_phi(cfg["phi"])
    solver_cfg = _build_solver_cfg(cfg.get("solver"))
    ctx = PreorderCtx(
        space, phi,
        metric_mode=solver_cfg.metric_mode,
        slack=float(cfg.get("slack", 1e-12)),
    )
    maps = _build_maps(cfg["maps"])
    coupled, selfmaps = maps[0], maps[1:]
    scheme = cfg["scheme"]
    if scheme in _SCHEME_SELF_MAPS and len(selfmaps) != _SCHEME_SELF_MAPS[scheme]:
        raise ConfigError(
            f"scheme {scheme!r} needs {_SCHEME_SELF_MAPS[scheme]} self map(s), "
            f"got {len(selfmaps)}"
        )
    if scheme not in ("single", "pair", "triple", "kmap"):
        raise ConfigError(f"unknown scheme {scheme!r}")

    seed_pair = cfg["seed_pair"]
    if seed_pair == "search":
        candidates = space.points() if space.is_finite else space.grid()
        seed = seed_search(ctx, coupled, candidates, direction=solver_cfg.direction)
        if seed is None:
            _write_json(
                {"status": "no_seed", "detail": "no admissible starting pair found"},
                cfg["output_dir"],
            )
            return 1
    elif isinstance(seed_pair, list) and len(seed_pair) == 2:
        seed = tuple(int(v) if space.is_finite else float(v) for v in seed_pair)
    else:
        raise ConfigError('seed_pair must be [x0, y0] or "search"')

    strict = bool(cfg.get("strict_seed", False))
    if scheme == "single":
        report = couple_iterate(ctx, coupled, seed, solver_cfg)
    elif scheme == "pair":
        report = pair_iterate(ctx, coupled, selfmaps[0], seed, solver_cfg)
    elif scheme == "triple":
        report = triple_iterate(ctx, coupled, selfmaps[0], selfmaps[1], seed,
                                solver_cfg, strict_seed=strict)
    else:
        report = kmap_round_robin(ctx, coupled, selfmaps, seed, solver_cfg,
                                  strict_seed=strict)

    _write_trace(report.trace, cfg["output_dir"])
    _write_json(report.as_dict(trace_ref="trace.csv"), cfg["output_dir"])
    return 0 if report.status == "converged" else 1


def _cmd_oracle(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"space", "maps", "tol", "output_dir"},
        required={"space", "maps", "output_dir"},
    )
    space = _build_space(cfg["space"])
    if not space.is_finite:
        raise ConfigError("oracle needs a finite space")
    maps = _build_maps(cfg["maps"])
    report = enumerate_points(space, maps[0], maps[1:], tol=float(cfg.get("tol", 0.0)))
    _write_json(report.as_dict(), cfg["output_dir"])
    return 0


def _cmd_compare(args) -> int:
    cfg = _load_config(
        args.config,
        allowed={"campaign", "solver", "output_dir"},
        required={"campaign", "output_dir"},
    )
    camp = cfg["campaign"]
    if not isinstance(camp, dict):
        raise ConfigError("campaign must be an object")
    unknown = set(camp) - {"instances", "min_points", "max_points", "map_counts"}
    if unknown:
        raise ConfigError(f"unknown campaign fields: {sorted(unknown)}")
    solver_cfg = _build_solver_cfg(cfg.get("solver")) if "solver" in cfg else None
    report = run_agreement_campaign(
        seed=args.seed,
        instances=int(camp.get("instances", 100)),
        min_points=int(camp.get("min_points", 2)),
        max_points=int(camp.get("max_points", 6)),
        map_counts=tuple(camp.get("map_counts", (0, 1, 2))),
        cfg=solver_cfg,
    )
    payload = report.as_dict()
    payload["seed"] = args.seed
    _write_json(payload, cfg["output_dir"])
    return 0 if report.passed else 1


# -- entry point ---------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qpfix",
        description="Checks, solvers, and oracles for coupled fixed points "
        "on preordered asymmetric-distance spaces.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_seed=False):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="path to a JSON run config")
        if needs_seed:
            sp.add_argument("--seed", required=True, type=int,
                            help="RNG seed (required for reproducibility)")
        sp.set_defaults(fn=fn)

    add("check-space", _cmd_check_space)
    add("check-order", _cmd_check_order)
    add("check-relations", _cmd_check_relations)
    add("solve", _cmd_solve)
    add("oracle", _cmd_oracle)
    add("compare", _cmd_compare, needs_seed=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console()
