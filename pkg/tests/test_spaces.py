import numpy as np
import pytest

from qpfix.oracle import random_finite_space
from qpfix.spaces import (
    BallQuery,
    DomainError,
    UnsupportedError,
    check_axioms,
    check_T0,
    finite_space,
    space_from_json,
    space_to_json,
)


def test_upper_interval_dist(unit_space):
    assert unit_space.dist(0.7, 0.2) == pytest.approx(0.5)
    assert unit_space.dist(0.2, 0.7) == 0.0
    for x in unit_space.grid(11):
        assert unit_space.dist(x, x) == 0.0


def test_dist_rejects_foreign_points(unit_space):
    with pytest.raises(DomainError):
        unit_space.dist(1.5, 0.2)
    with pytest.raises(DomainError):
        unit_space.dist(0.2, float("nan"))


def test_conjugate_swaps_arguments(unit_space):
    conj = unit_space.conjugate()
    assert conj.dist(0.7, 0.2) == 0.0
    assert conj.dist(0.2, 0.7) == pytest.approx(0.5)


def test_conjugate_is_involution(unit_space):
    twice = unit_space.conjugate().conjugate()
    for a in unit_space.grid(11):
        for b in unit_space.grid(11):
            assert twice.dist(a, b) == unit_space.dist(a, b)


def test_finite_conjugate_is_transpose():
    space = finite_space([[0, 1], [2, 0]])
    conj = space.conjugate()
    assert conj.matrix.tolist() == [[0, 2], [1, 0]]


def test_sup_metric_symmetric(unit_space):
    sup = unit_space.sup_metric()
    assert sup.dist(0.7, 0.2) == pytest.approx(0.5)
    grid = unit_space.grid(11)
    for a in grid:
        for b in grid:
            assert sup.dist(a, b) == sup.dist(b, a)
            assert sup.dist(a, b) >= unit_space.dist(a, b)


def test_finite_sup_metric_matrix():
    space = finite_space([[0, 1], [2, 0]])
    assert space.sup_metric().matrix.tolist() == [[0, 2], [2, 0]]


def test_in_ball(unit_space):
    assert unit_space.in_ball(BallQuery(0.5, 0.2, "open"), 0.4)
    # asymmetry: the ball extends upward without bound
    assert unit_space.in_ball(BallQuery(0.5, 0.2, "open"), 0.9)
    assert unit_space.in_ball(BallQuery(0.5, 0.0, "closed"), 0.5)
    assert not unit_space.in_ball(BallQuery(0.5, 0.2, "open"), 0.2)


def test_ball_query_validation():
    with pytest.raises(ValueError):
        BallQuery(0.5, 0.0, "open")
    with pytest.raises(ValueError):
        BallQuery(0.5, -1.0, "closed")
    with pytest.raises(ValueError):
        BallQuery(0.5, 0.5, "half-open")


def test_axioms_pass_on_unit_grid(unit_space):
    report = check_axioms(unit_space)
    assert report.passed
    assert report.sample_size == 21


def test_axioms_catch_planted_triangle_violation():
    space = finite_space([[0, 1, 5], [1, 0, 1], [1, 1, 0]])
    report = check_axioms(space, "exhaustive")
    assert not report.passed
    assert (0, 1, 2, 5.0, 2.0) in report.triangle_violations


def test_axioms_catch_nonzero_diagonal():
    space = finite_space([[0.1, 1], [1, 0]])
    report = check_axioms(space, "exhaustive")
    assert report.identity_violations == [(0, 0.1)]


def test_exhaustive_needs_finite_carrier(unit_space):
    with pytest.raises(UnsupportedError):
        check_axioms(unit_space, "exhaustive")


def test_t0_upper_interval(unit_space):
    assert check_T0(unit_space).passed


def test_t0_planted_violation():
    space = finite_space([[0, 0], [0, 0]])
    report = check_T0(space, "exhaustive")
    assert report.violations == [(0, 1, 0.0, 0.0)]


def test_t0_one_direction_nonzero_passes():
    space = finite_space([[0, 1], [0, 0]])
    assert check_T0(space, "exhaustive").passed


def test_json_round_trip(unit_space, tmp_path):
    finite = finite_space([[0, 1], [2, 0]])
    again = space_from_json(space_to_json(finite))
    assert again.matrix.tolist() == finite.matrix.tolist()

    obj = space_to_json(unit_space)
    assert obj == {"kind": "interval", "lo": 0.0, "hi": 1.0, "dist": "upper"}
    back = space_from_json(obj)
    assert back.dist(0.7, 0.2) == pytest.approx(0.5)

    with pytest.raises(ValueError):
        space_from_json({"kind": "taxicab"})
    with pytest.raises(ValueError):
        space_from_json({"kind": "interval", "lo": 0, "hi": 1, "dist": "euclid"})


def test_finite_space_validation():
    with pytest.raises(ValueError):
        finite_space([[0, 1]])
    with pytest.raises(ValueError):
        finite_space([[0, -1], [1, 0]])


def test_cross_matches_scalar_dist(unit_space):
    pts = unit_space.grid(7)
    mat = unit_space.pairwise(pts)
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            assert mat[i, j] == unit_space.dist(a, b)


def test_random_spaces_satisfy_axioms_exactly():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        space = random_finite_space(rng, n)
        assert check_axioms(space, "exhaustive", slack=0.0).passed
        assert check_T0(space, "exhaustive", slack=0.0).passed
        conj = space.conjugate()
        assert np.array_equal(conj.conjugate().matrix, space.matrix)
        assert np.array_equal(
            space.sup_metric().matrix, np.maximum(space.matrix, conj.matrix)
        )


def test_sup_metric_of_t0_space_is_a_metric():
    rng = np.random.default_rng(11)
    for _ in range(20):
        space = random_finite_space(rng, int(rng.integers(2, 7)))
        sup = space.sup_metric()
        m = sup.matrix
        assert np.array_equal(m, m.T)
        assert check_axioms(sup, "exhaustive", slack=0.0).passed
        # identity of indiscernibles off the diagonal
        off = m + np.eye(m.shape[0])
        assert (off > 0).all()
