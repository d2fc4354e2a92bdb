"""Finite-horizon Cauchy classification and limit detection.

Asymmetric distances split the classical Cauchy property into several
inequivalent notions (left/right, d-style with a limit point vs K-style
over index pairs, plus the symmetrized one).  All checks here are
operational: a window of N points is scanned exhaustively, with the
start index n0 capped at N//2 so a tiny tail cannot produce a vacuous
pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .spaces import Point, QPSpace


@dataclass(frozen=True)
class SequenceWindow:
    points: tuple
    space: QPSpace

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("sequence window must be nonempty")
        if self.space.is_finite:
            idx = np.asarray(self.points)
            if idx.dtype.kind != "i" or (idx < 0).any() or (
                idx >= self.space.carrier.size
            ).any():
                for p in self.points:
                    self.space.require(p)
        else:
            for p in self.points:
                self.space.require(p)
        object.__setattr__(self, "_cache", {})

    def __len__(self) -> int:
        return len(self.points)

    def distance_matrix(self) -> np.ndarray:
        """Pairwise d(x_k, x_n) over the window, memoized."""
        if "dmat" not in self._cache:
            self._cache["dmat"] = self.space.pairwise(list(self.points))
        return self._cache["dmat"]

    def candidate_distances(self, candidates) -> tuple[np.ndarray, np.ndarray]:
        """(d(c, x_n), d(x_n, c)) matrices for a candidate list."""
        pts = list(self.points)
        to_seq = self.space.cross(candidates, pts)
        from_seq = self.space.cross(pts, candidates).T
        return to_seq, from_seq


@dataclass(frozen=True)
class CauchyFlag:
    holds: bool
    # Index-pair witness of failure: (k, n) for K-style flags,
    # (candidate index, n) for d-style flags.  None when the flag holds.
    witness: Optional[tuple] = None


@dataclass(frozen=True)
class CauchyVerdict:
    left_d: CauchyFlag
    left_K: CauchyFlag
    right_d: CauchyFlag
    right_K: CauchyFlag
    d_s: CauchyFlag
    epsilon: float
    horizon: int
    n0: Optional[int]  # minimal start index witnessing left_K, when it holds

    def flag(self, name: str) -> CauchyFlag:
        return getattr(self, name)

    def as_dict(self) -> dict:
        out = {"epsilon": self.epsilon, "horizon": self.horizon, "n0": self.n0}
        for name in ("left_d", "left_K", "right_d", "right_K", "d_s"):
            f = self.flag(name)
            out[name] = {
                "holds": f.holds,
                "witness": None if f.witness is None else list(f.witness),
            }
        return out


def _k_pattern(dmat: np.ndarray, epsilon: float, cap: int, upper_mask: np.ndarray):
    """Scan for the smallest n0 <= cap with dmat[k, n] < epsilon for all
    n0 <= k <= n.  Returns (holds, minimal n0 or None, witness or None)."""
    upper = np.where(upper_mask, dmat, -np.inf)
    worst_from = upper.max(axis=1)  # worst pair starting at k
    suffix = np.maximum.accumulate(worst_from[::-1])[::-1]
    ok = suffix < epsilon
    if ok[: cap + 1].any():
        n0 = int(np.argmax(ok[: cap + 1]))
        return True, n0, None
    # every n0 <= cap fails; any bad pair with k >= cap refutes them all
    tail = upper[cap:, :] >= epsilon
    k_off, nn = np.unravel_index(int(np.argmax(tail)), tail.shape)
    return False, None, (int(cap + k_off), int(nn))


def _d_pattern(cand_dists: np.ndarray, epsilon: float, cap: int):
    """Scan for a candidate row whose distances stay under epsilon from
    some n0 <= cap on.  cand_dists has shape (candidates, N)."""
    n = cand_dists.shape[1]
    bad = cand_dists >= epsilon
    # required start per candidate: one past its last violation
    last_bad = np.where(
        bad.any(axis=1), n - 1 - np.argmax(bad[:, ::-1], axis=1), -1
    )
    required = last_bad + 1
    best = int(np.argmin(required))
    if required[best] <= cap:
        return True, int(required[best]), None
    # witness: the best candidate still violates at some n >= cap
    row = bad[best, cap:]
    nn = int(cap + np.argmax(row)) if row.any() else int(last_bad[best])
    return False, None, (best, nn)


def default_candidates(seq: SequenceWindow) -> list[Point]:
    """Candidate limits: the window's own points, plus the whole carrier
    (finite) or the default grid (interval).  Including the window points
    is what makes the K-style flags imply the d-style flags at any
    horizon.  Duplicates are dropped (they contribute identical rows)."""
    extra = seq.space.points() if seq.space.is_finite else seq.space.grid()
    out, seen = [], set()
    for p in list(seq.points) + list(extra):
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def classify_cauchy(
    seq: SequenceWindow,
    epsilon: float,
    candidates: Optional[Sequence[Point]] = None,
) -> CauchyVerdict:
    """Classify a window against the five Cauchy notions at one epsilon.

    Failing flags carry a refuting witness valid for every admissible
    start index.  The verdict's n0 is the minimal left-K start.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if len(seq) < 2:
        raise ValueError("classification needs a horizon of at least 2")
    n = len(seq)
    cap = n // 2
    dmat = seq.distance_matrix()
    if candidates is not None:
        to_seq, from_seq = seq.candidate_distances(list(candidates))
    elif "cand" in seq._cache:
        to_seq, from_seq = seq._cache["cand"]
    else:
        to_seq, from_seq = seq.candidate_distances(default_candidates(seq))
        seq._cache["cand"] = (to_seq, from_seq)

    idx = np.arange(n)
    upper_mask = idx[None, :] >= idx[:, None]
    lk = _k_pattern(dmat, epsilon, cap, upper_mask)
    rk = _k_pattern(dmat.T, epsilon, cap, upper_mask)
    ds = _k_pattern(np.maximum(dmat, dmat.T), epsilon, cap, upper_mask)
    ld = _d_pattern(to_seq, epsilon, cap)
    rd = _d_pattern(from_seq, epsilon, cap)

    verdict = CauchyVerdict(
        left_d=CauchyFlag(ld[0], ld[2]),
        left_K=CauchyFlag(lk[0], lk[2]),
        right_d=CauchyFlag(rd[0], rd[2]),
        right_K=CauchyFlag(rk[0], rk[2]),
        d_s=CauchyFlag(ds[0], ds[2]),
        epsilon=float(epsilon),
        horizon=n,
        n0=lk[1],
    )
    _assert_internal_chain(verdict)
    return verdict


def _assert_internal_chain(v: CauchyVerdict) -> None:
    # Structural guarantee of the scan; a failure here is a classifier bug.
    if v.d_s.holds and not (v.left_K.holds and v.right_K.holds):
        raise RuntimeError("classifier inconsistency: d_s without K flags")
    if v.left_K.holds and not v.left_d.holds:
        raise RuntimeError("classifier inconsistency: left_K without left_d")
    if v.right_K.holds and not v.right_d.holds:
        raise RuntimeError("classifier inconsistency: right_K without right_d")


EPSILON_LADDER = (0.1, 0.01, 0.001)


def classify_ladder(
    seq: SequenceWindow,
    epsilons: Sequence[float] = EPSILON_LADDER,
    candidates: Optional[Sequence[Point]] = None,
) -> dict:
    """Classification across a ladder of scales, as one JSON-able report.

    Shows how stable the verdict is as epsilon tightens.
    """
    return {
        repr(float(eps)): classify_cauchy(seq, eps, candidates).as_dict()
        for eps in epsilons
    }


def detect_limit(
    seq: SequenceWindow,
    candidates: Sequence[Point],
    mode: str = "left",
    tol: float = 1e-9,
) -> Optional[tuple[Point, int]]:
    """First candidate that the window settles on, with the smallest
    tail index from which every distance stays under tol.

    "left" measures d(candidate, x_n), "right" d(x_n, candidate),
    "symmetric" the max of both.  As in :func:`classify_cauchy`, the
    tail must start by the window's midpoint, so a last-moment dip
    cannot qualify; None when no candidate qualifies.
    """
    if mode not in ("left", "right", "symmetric"):
        raise ValueError(f"unknown limit mode {mode!r}")
    cands = list(candidates)
    if not cands:
        raise ValueError("candidate list must be nonempty")
    pts = list(seq.points)
    n = len(pts)
    cap = n // 2
    to_seq = seq.space.cross(cands, pts)
    from_seq = seq.space.cross(pts, cands).T
    if mode == "left":
        dm = to_seq
    elif mode == "right":
        dm = from_seq
    else:
        dm = np.maximum(to_seq, from_seq)
    bad = dm >= tol
    for ci, cand in enumerate(cands):
        row = bad[ci]
        if not row.any():
            return cand, 0
        last = n - 1 - int(np.argmax(row[::-1]))
        if last + 1 <= cap:
            return cand, last + 1
    return None


@dataclass
class ChainReport:
    inconsistencies: list

    @property
    def passed(self) -> bool:
        return not self.inconsistencies

    def as_dict(self) -> dict:
        return {"passed": self.passed, "inconsistencies": list(self.inconsistencies)}


def check_implication_chain(
    verdict: CauchyVerdict, conjugate_verdict: CauchyVerdict
) -> ChainReport:
    """Cross-check a verdict pair computed from one sequence, the second
    on the conjugate space.

    Within each verdict the symmetrized flag must imply the K flags and
    each K flag its d flag; across the pair, left and right notions must
    swap roles exactly.  Any inconsistency is a classifier bug.
    """
    if verdict.horizon != conjugate_verdict.horizon:
        raise ValueError("verdict pair has mismatched horizons")
    if verdict.epsilon != conjugate_verdict.epsilon:
        raise ValueError("verdict pair has mismatched epsilons")
    out = []

    def _implies(v: CauchyVerdict, tag: str):
        if v.d_s.holds and not v.left_K.holds:
            out.append(f"{tag}: d_s holds but left_K fails")
        if v.d_s.holds and not v.right_K.holds:
            out.append(f"{tag}: d_s holds but right_K fails")
        if v.left_K.holds and not v.left_d.holds:
            out.append(f"{tag}: left_K holds but left_d fails")
        if v.right_K.holds and not v.right_d.holds:
            out.append(f"{tag}: right_K holds but right_d fails")

    _implies(verdict, "base")
    _implies(conjugate_verdict, "conjugate")

    duals = [
        ("left_K", "right_K"),
        ("right_K", "left_K"),
        ("left_d", "right_d"),
        ("right_d", "left_d"),
        ("d_s", "d_s"),
    ]
    for here, there in duals:
        if verdict.flag(here).holds != conjugate_verdict.flag(there).holds:
            out.append(f"duality broken: {here}(d) != {there}(d^-1)")
    return ChainReport(out)
