import numpy as np
import pytest

from mutants import mutant_pair_solver
from qpfix import catalog
from qpfix.oracle import (
    ENTRY_GRID,
    enumerate_points,
    oracle_vs_solver,
    order_chain,
    random_chain_selfmap,
    random_finite_space,
    random_isotone_coupled,
    random_phi_table,
    run_agreement_campaign,
)
from qpfix.order import CoupledMap, PreorderCtx, SelfMap, check_isotone, induced_leq, seed_search
from qpfix.solvers import _unique_names, verify_point
from qpfix.spaces import UnsupportedError, check_axioms, check_T0, finite_space


def test_constant_map_enumeration():
    space = finite_space([[0, 1], [1, 0]])
    const_b = CoupledMap(lambda x, y: 1, name="const_b")
    report = enumerate_points(space, const_b)
    assert report.e1 == [(1, 1)]


def test_projection_enumeration():
    space = finite_space([[0, 1], [1, 0]])
    proj = CoupledMap(lambda x, y: x, name="proj")
    report = enumerate_points(space, proj)
    assert report.e1 == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_e3_with_identity_map():
    space = finite_space(np.ones((3, 3)) - np.eye(3))
    const_a = CoupledMap(lambda x, y: 0, name="const_a")
    ident = SelfMap(lambda x: x, name="identity")
    report = enumerate_points(space, const_a, [ident])
    assert report.e3["identity"] == [(0, 0)]
    assert report.e2["identity"] == [(0, 0)]


def test_enumeration_cap():
    space = finite_space(np.zeros((3, 3)))
    with pytest.raises(UnsupportedError):
        enumerate_points(space, CoupledMap(lambda x, y: x), cap=2)


def test_oracle_set_inclusions_and_verify_point_agreement():
    rng = np.random.default_rng(19)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        space = random_finite_space(rng, n, t0=True)
        phi = random_phi_table(rng, n)
        ctx = PreorderCtx(space, phi, slack=0.0)
        chain = order_chain(ctx)
        coupled = random_isotone_coupled(rng, ctx, chain)
        maps = [
            random_chain_selfmap(rng, ctx, chain, name=f"g{j}") for j in range(2)
        ]
        report = enumerate_points(space, coupled, maps)
        names = _unique_names(maps)
        assert set(report.d2) <= set(report.d1)
        for name in names:
            assert set(report.e3[name]) <= set(report.e2[name])
            assert set(report.e3[name]) <= set(report.e1)
        # pointwise agreement with the residual-based classifier at tol 0
        for x in space.points():
            for y in space.points():
                vp = verify_point(ctx, coupled, maps, x, y, tol=0.0)
                assert vp.e1 == ((x, y) in report.e1)
                for name in names:
                    assert vp.e2[name] == ((x, y) in report.e2[name])
                    assert vp.e3[name] == ((x, y) in report.e3[name])
                assert vp.d1 == ((x, y) in report.d1)
                assert vp.d2 == ((x, y) in report.d2)


def test_generator_entries_stay_on_grid():
    rng = np.random.default_rng(29)
    for _ in range(20):
        space = random_finite_space(rng, int(rng.integers(2, 8)))
        assert check_axioms(space, "exhaustive", slack=0.0).passed
        assert check_T0(space, "exhaustive", slack=0.0).passed
        flat = set(float(v) for v in space.matrix.ravel())
        assert flat <= set(ENTRY_GRID)


def test_generated_coupled_maps_are_isotone_with_seeds():
    rng = np.random.default_rng(41)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        space = random_finite_space(rng, n)
        phi = random_phi_table(rng, n)
        ctx = PreorderCtx(space, phi, slack=0.0)
        coupled = random_isotone_coupled(rng, ctx)
        assert check_isotone(ctx, coupled, "exhaustive").passed
        assert seed_search(ctx, coupled, space.points()) is not None


def test_order_chain_is_a_chain():
    rng = np.random.default_rng(43)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        space = random_finite_space(rng, n)
        ctx = PreorderCtx(space, random_phi_table(rng, n), slack=0.0)
        chain = order_chain(ctx)
        assert chain
        for a, b in zip(chain, chain[1:]):
            assert induced_leq(ctx, a, b)


def test_agreement_campaign_small():
    camp = run_agreement_campaign(seed=7, instances=25)
    assert camp.passed
    assert camp.total_converged > 0


def test_agreement_report_flags_missing_seeds():
    # two separated points, flat potential: only equal pairs are related,
    # and the argument swap never satisfies the seed inequality
    space = finite_space([[0, 1], [1, 0]])
    phi = catalog.get_phi("table", values=[0, 0])
    ctx = PreorderCtx(space, phi, slack=0.0)
    swap = CoupledMap(lambda x, y: 1 - x, name="swap")
    report = oracle_vs_solver(space, ctx, swap)
    assert report.no_seeds
    assert report.passed


def test_interleaving_mutation_is_caught():
    camp = run_agreement_campaign(
        seed=42, instances=100, map_counts=(1,), solver_fn=mutant_pair_solver
    )
    assert not camp.passed
    kinds = {d["kind"] for d in camp.disagreements}
    assert "trace" in kinds


def test_agreement_campaign_covers_kmap_schedules():
    camp = run_agreement_campaign(seed=5, instances=30, map_counts=(3, 4))
    assert camp.passed
    assert camp.total_converged > 0


def test_campaign_is_deterministic():
    a = run_agreement_campaign(seed=11, instances=15)
    b = run_agreement_campaign(seed=11, instances=15)
    assert a.as_dict() == b.as_dict()


def test_oracle_report_json_shape():
    space = finite_space([[0, 1], [1, 0]])
    proj = CoupledMap(lambda x, y: x, name="proj")
    g = SelfMap(lambda x: x, name="identity")
    payload = enumerate_points(space, proj, [g]).as_dict()
    assert set(payload) == {"E1", "E2", "E3", "D1", "D2"}
    # F(x, y) = x = identity(x) holds identically here
    assert payload["E1"] == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert payload["E2"] == {"identity": [[0, 0], [0, 1], [1, 0], [1, 1]]}
    assert payload["D1"] == []  # needs at least two maps
