"""Successive-approximation schemes for coupled fixed points.

Four schemes share one driver, differing only in the cycle of maps
applied per index:

  single:  x_{n+1} = F(x_n, y_n),            y mirrored with swapped args
  pair:    odd indices apply F, even apply the self map G
  triple:  indices cycle through H, F, G (H first)
  k-map:   indices cycle through G_K, ..., G_2, F, G_1 (experimental
           round-robin generalization of the triple scheme)

Stopping is by stalling: stall_window consecutive index steps whose
symmetrized displacement stays under tol, confirmed by a residual check
at the stalled point.  A cycle that moves nothing at all converges
immediately without appending duplicate rows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .order import CoupledMap, PhiFn, PreorderCtx, SelfMap, induced_leq
from .relations import relate_pair_left, relate_pair_right
from .spaces import Point, QPSpace


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 10000
    stall_window: int = 3
    direction: str = "forward"  # "forward" | "reverse"
    metric_mode: str = "plain"  # overrides the context's mode for the run
    verify_hypotheses: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.stall_window < 1:
            raise ValueError("stall_window must be at least 1")
        if self.direction not in ("forward", "reverse"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.metric_mode not in ("plain", "symmetrized"):
            raise ValueError(f"unknown metric mode {self.metric_mode!r}")


@dataclass
class TraceRow:
    n: int
    x: Point
    y: Point
    phi_x: float
    phi_y: float
    step_x: float  # d(x_n, x_{n+1}); filled once the next point is known
    step_y: float
    phase: str  # producing map: "seed" for row 0, else F/G/H/G_i


@dataclass
class IterationTrace:
    rows: list
    scheme: str

    def x_points(self) -> list:
        return [r.x for r in self.rows]

    def y_points(self) -> list:
        return [r.y for r in self.rows]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "x", "y", "phi_x", "phi_y", "step_x", "step_y", "scheme_phase"])
            for r in self.rows:
                w.writerow(
                    [r.n, repr(r.x), repr(r.y), repr(r.phi_x), repr(r.phi_y),
                     repr(r.step_x), repr(r.step_y), r.phase]
                )


@dataclass(frozen=True)
class SolverViolation:
    condition: str  # "seed" | "C1" | "C2" | "D1" | "D2" | "chain" | "phi_monotone"
    index: int
    witness: tuple
    map_name: Optional[str] = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "index": self.index,
            "witness": list(self.witness),
            "map": self.map_name,
            "detail": self.detail,
        }


@dataclass
class SolverReport:
    status: str  # "converged" | "max_iter" | "hypothesis_violated"
    scheme: str
    candidate: Optional[tuple]
    residual_d: dict
    residual_dinv: dict
    residual_ds: dict
    iterations: int
    trace: IterationTrace
    config: SolverConfig
    violation: Optional[SolverViolation] = None
    experimental: bool = False

    def as_dict(self, trace_ref: Optional[str] = None) -> dict:
        return {
            "status": self.status,
            "scheme": self.scheme,
            "experimental": self.experimental,
            "candidate": None if self.candidate is None else list(self.candidate),
            "residual_d": dict(self.residual_d),
            "residual_dinv": dict(self.residual_dinv),
            "residual_ds": dict(self.residual_ds),
            "iterations": self.iterations,
            "trace_ref": trace_ref if trace_ref is not None else len(self.trace.rows),
            "violation": None if self.violation is None else self.violation.as_dict(),
            "config": {
                "tol": self.config.tol,
                "max_iter": self.config.max_iter,
                "stall_window": self.config.stall_window,
                "direction": self.config.direction,
                "metric_mode": self.config.metric_mode,
                "verify_hypotheses": self.config.verify_hypotheses,
            },
        }


def _unique_names(maps: Sequence[SelfMap]) -> list[str]:
    names = []
    for i, m in enumerate(maps):
        base = m.name or f"g{i}"
        name = base
        k = 2
        while name in names:
            name = f"{base}#{k}"
            k += 1
        names.append(name)
    return names


def _residuals(space: QPSpace, coupled: CoupledMap, named_maps, x: Point, y: Point):
    """Per-map residuals of the fixed-point equations at (x, y), under
    d, its conjugate, and the sup metric."""
    res_d, res_dinv, res_ds = {}, {}, {}

    def put(name, pairs):
        fw = max(space.dist(a, b) for a, b in pairs)
        bw = max(space.dist(b, a) for a, b in pairs)
        res_d[name] = fw
        res_dinv[name] = bw
        res_ds[name] = max(fw, bw)

    put(coupled.name, [(coupled(x, y), x), (coupled(y, x), y)])
    for name, m in named_maps:
        put(name, [(m(x), x), (m(y), y)])
    return res_d, res_dinv, res_ds


def _chain_ok(ctx: PreorderCtx, direction: str, prev: Point, cur: Point) -> bool:
    if direction == "forward":
        return induced_leq(ctx, prev, cur)
    return induced_leq(ctx, cur, prev)


def _phi_ok(phi: PhiFn, direction: str, slack: float, prev: Point, cur: Point) -> bool:
    if direction == "forward":
        return phi(cur) >= phi(prev) - slack
    return phi(cur) <= phi(prev) + slack


def _run_scheme(
    ctx: PreorderCtx,
    coupled: CoupledMap,
    selfmaps: Sequence[SelfMap],
    cycle: Sequence[str],
    phase_maps: dict,
    seed: tuple,
    cfg: SolverConfig,
    scheme: str,
    seed_hypothesis: bool,
    strict_seed: bool,
    experimental: bool = False,
) -> SolverReport:
    ectx = ctx if ctx.metric_mode == cfg.metric_mode else replace(ctx, metric_mode=cfg.metric_mode)
    space = ectx.space
    phi = ectx.phi
    x, y = seed
    space.require(x)
    space.require(y)

    named = list(zip(_unique_names(selfmaps), selfmaps))
    rows = [TraceRow(0, x, y, phi(x), phi(y), 0.0, 0.0, "seed")]
    status: Optional[str] = None
    violation: Optional[SolverViolation] = None
    n = 0
    stall = 0
    final_steps_set = False

    def apply_phase(label: str, px: Point, py: Point) -> tuple:
        if label == "F":
            return coupled(px, py), coupled(py, px)
        m = phase_maps[label]
        return m(px), m(py)

    def fail(cond, witness, map_name=None, detail=""):
        nonlocal status, violation
        status = "hypothesis_violated"
        violation = SolverViolation(cond, n, witness, map_name, detail)

    def residual_pass(px, py):
        _, _, ds = _residuals(space, coupled, named, px, py)
        return max(ds.values()) <= cfg.tol

    if cfg.verify_hypotheses:
        if seed_hypothesis:
            fx, fy = coupled(x, y), coupled(y, x)
            if not (_chain_ok(ectx, cfg.direction, x, fx) and _chain_ok(ectx, cfg.direction, y, fy)):
                fail("seed", (x, y), detail="starting pair is not below its image")
        elif strict_seed and cycle:
            nx, ny = apply_phase(cycle[0], x, y)
            if not (_chain_ok(ectx, cfg.direction, x, nx) and _chain_ok(ectx, cfg.direction, y, ny)):
                fail("seed", (x, y), map_name=cycle[0],
                     detail="strict mode: starting pair is not below its first image")

    while status is None:
        if cfg.verify_hypotheses:
            for name, m in named:
                v = relate_pair_left(ectx, coupled, m, x, y) if cfg.direction == "forward" \
                    else relate_pair_right(ectx, coupled, m, x, y)
                if v is not None:
                    fail(v.condition, v.pair, map_name=name,
                         detail=f"part {v.part}: {v.lhs!r} not below {v.rhs!r}"
                         if cfg.direction == "forward"
                         else f"part {v.part}: {v.lhs!r} not above {v.rhs!r}")
                    break
            if status is not None:
                break

        # probe one full cycle; an exactly stationary cycle converges now
        probe = []
        px, py = x, y
        stationary = True
        for label in cycle:
            nx, ny = apply_phase(label, px, py)
            if space.sup_dist(px, nx) != 0.0 or space.sup_dist(py, ny) != 0.0:
                stationary = False
            probe.append((label, nx, ny))
            px, py = nx, ny
        if stationary and residual_pass(x, y):
            rows[-1].step_x = 0.0
            rows[-1].step_y = 0.0
            final_steps_set = True
            status = "converged"
            break

        for label, nx, ny in probe:
            step_x = space.dist(x, nx)
            step_y = space.dist(y, ny)
            sstep = space.sup_dist(x, nx) + space.sup_dist(y, ny)
            rows[-1].step_x = step_x
            rows[-1].step_y = step_y
            n += 1
            rows.append(TraceRow(n, nx, ny, phi(nx), phi(ny), 0.0, 0.0, label))
            prev_x, prev_y = x, y
            x, y = nx, ny
            if cfg.verify_hypotheses and n >= 2:
                if not (_chain_ok(ectx, cfg.direction, prev_x, x)
                        and _chain_ok(ectx, cfg.direction, prev_y, y)):
                    fail("chain", (prev_x, x, prev_y, y),
                         detail="trace broke the order chain")
                    break
                if not (_phi_ok(phi, cfg.direction, ectx.slack, prev_x, x)
                        and _phi_ok(phi, cfg.direction, ectx.slack, prev_y, y)):
                    fail("phi_monotone", (prev_x, x, prev_y, y),
                         detail="phi moved the wrong way beyond slack")
                    break
            stall = stall + 1 if sstep < cfg.tol else 0
            if stall >= cfg.stall_window:
                if residual_pass(x, y):
                    status = "converged"
                    break
                stall = 0
            if n >= cfg.max_iter:
                status = "max_iter"
                break

    if not final_steps_set:
        # fill the final row's forward step with one lookahead evaluation
        label = cycle[n % len(cycle)]
        nx, ny = apply_phase(label, x, y)
        rows[-1].step_x = space.dist(x, nx)
        rows[-1].step_y = space.dist(y, ny)

    res_d, res_dinv, res_ds = _residuals(space, coupled, named, x, y)
    return SolverReport(
        status=status,
        scheme=scheme,
        candidate=(x, y) if status == "converged" else None,
        residual_d=res_d,
        residual_dinv=res_dinv,
        residual_ds=res_ds,
        iterations=n,
        trace=IterationTrace(rows, scheme),
        config=cfg,
        violation=violation,
        experimental=experimental,
    )


def couple_iterate(
    ctx: PreorderCtx, coupled: CoupledMap, seed: tuple, cfg: SolverConfig = SolverConfig()
) -> SolverReport:
    """Iterate the single-map scheme from a seed pair.

    With hypothesis verification on, the seed must be below its image in
    both coordinates and the trace must keep climbing (trace-local
    isotonicity of the coupled map); any break aborts the run with
    status hypothesis_violated.
    """
    return _run_scheme(
        ctx, coupled, [], ["F"], {}, seed, cfg,
        scheme="single", seed_hypothesis=True, strict_seed=False,
    )


def pair_iterate(
    ctx: PreorderCtx,
    coupled: CoupledMap,
    g: SelfMap,
    seed: tuple,
    cfg: SolverConfig = SolverConfig(),
) -> SolverReport:
    """Alternate the coupled map (odd indices) and g (even indices).

    Hypothesis verification checks the seed inequalities and the weak
    relatedness conditions at every visited pair.
    """
    return _run_scheme(
        ctx, coupled, [g], ["F", "G"], {"G": g}, seed, cfg,
        scheme="pair", seed_hypothesis=True, strict_seed=False,
    )


def triple_iterate(
    ctx: PreorderCtx,
    coupled: CoupledMap,
    g: SelfMap,
    h: SelfMap,
    seed: tuple,
    cfg: SolverConfig = SolverConfig(),
    strict_seed: bool = False,
) -> SolverReport:
    """Cycle h, then the coupled map, then g, starting with h.

    The order chain is only checked from index 1 on: nothing relates the
    seed to its first image in this scheme.  Pass strict_seed=True to
    require that link as well.
    """
    return _run_scheme(
        ctx, coupled, [g, h], ["H", "F", "G"], {"G": g, "H": h}, seed, cfg,
        scheme="triple", seed_hypothesis=False, strict_seed=strict_seed,
    )


def kmap_round_robin(
    ctx: PreorderCtx,
    coupled: CoupledMap,
    gs: Sequence[SelfMap],
    seed: tuple,
    cfg: SolverConfig = SolverConfig(),
    strict_seed: bool = False,
) -> SolverReport:
    """EXPERIMENTAL round-robin for K self maps.

    Each cycle applies G_K, ..., G_2, then the coupled map, then G_1,
    generalizing the triple scheme's pattern.  An empty map list
    degenerates to :func:`couple_iterate`; a single map matches the pair
    scheme up to index bookkeeping.
    """
    gs = list(gs)
    if not gs:
        return couple_iterate(ctx, coupled, seed, cfg)
    k = len(gs)
    labels = [f"G{i}" for i in range(k, 1, -1)] + ["F", "G1"]
    phase_maps = {f"G{i + 1}": m for i, m in enumerate(gs)}
    return _run_scheme(
        ctx, coupled, gs, labels, phase_maps, seed, cfg,
        scheme="kmap", seed_hypothesis=(k == 1), strict_seed=strict_seed,
        experimental=True,
    )


# -- point classification -----------------------------------------------


@dataclass
class VerifyReport:
    """Residual table and labels for a candidate pair.

    Labels, strongest first: D2 (the coupled equations hold and every
    supplied self map fixes both coordinates; needs >= 2 maps), E3 (same
    for one map), E1 (coupled equations only), D1 (all maps agree with
    the coupled images without fixing them), E2 (one map agrees).
    """

    e1: bool
    e2: dict
    e3: dict
    d1: Optional[bool]
    d2: Optional[bool]
    residuals: dict
    tol: float

    @property
    def strongest(self) -> Optional[str]:
        if self.d2:
            return "D2"
        if any(self.e3.values()):
            return "E3"
        if self.e1:
            return "E1"
        if self.d1:
            return "D1"
        if any(self.e2.values()):
            return "E2"
        return None

    def as_dict(self) -> dict:
        return {
            "strongest": self.strongest,
            "E1": self.e1,
            "E2": dict(self.e2),
            "E3": dict(self.e3),
            "D1": self.d1,
            "D2": self.d2,
            "tol": self.tol,
            "residuals": dict(self.residuals),
        }


def verify_point(
    ctx: PreorderCtx,
    coupled: CoupledMap,
    maps: Sequence[SelfMap],
    x: Point,
    y: Point,
    tol: float = 1e-9,
) -> VerifyReport:
    """Classify (x, y) against every fixed/coincidence notion at tol.

    All residuals use the sup metric, which pins points uniquely on T0
    spaces.  E2 tests agreement of the coupled images with the map's
    images (the coincidence reading), E3 additionally requires both to
    be fixed.
    """
    space = ctx.space
    space.require(x)
    space.require(y)
    named = list(zip(_unique_names(maps), maps))
    fxy, fyx = coupled(x, y), coupled(y, x)

    res = {
        "F:x": space.sup_dist(fxy, x),
        "F:y": space.sup_dist(fyx, y),
    }
    e1 = res["F:x"] <= tol and res["F:y"] <= tol
    e2, e3 = {}, {}
    for name, m in named:
        mx, my = m(x), m(y)
        res[f"{name}:x"] = space.sup_dist(mx, x)
        res[f"{name}:y"] = space.sup_dist(my, y)
        res[f"F~{name}:x"] = space.sup_dist(fxy, mx)
        res[f"F~{name}:y"] = space.sup_dist(fyx, my)
        e2[name] = res[f"F~{name}:x"] <= tol and res[f"F~{name}:y"] <= tol
        e3[name] = (
            e1
            and e2[name]
            and res[f"{name}:x"] <= tol
            and res[f"{name}:y"] <= tol
        )
    if len(named) >= 2:
        d1 = all(e2.values())
        d2 = e1 and all(e3.values())
    else:
        d1 = d2 = None
    return VerifyReport(e1, e2, e3, d1, d2, res, tol)
