import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frameport.frames import frame_operator
from frameport.measure import (
    DiscreteMeasure,
    MeasureError,
    canonicalize,
    center,
    convex_combine,
    dirac,
    from_json,
    mean,
    measures_close,
    moment,
    new_discrete,
    project_hyperplane,
    project_line,
    push_forward_linear,
    push_forward_map,
)

from conftest import random_measure, random_unit
from oracles import frame_operator_fsum

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_point_mass():
    mu = new_discrete(1, [0], [1])
    assert mu.dim == 1 and mu.size == 1
    assert mu.atoms[0, 0] == 0 and mu.weights[0] == 1


def test_two_atoms_valid():
    mu = new_discrete(2, [(1, 0), (0, 1)], [0.5, 0.5])
    np.testing.assert_array_equal(mu.atoms, np.eye(2))


def test_weights_must_sum_to_one():
    with pytest.raises(MeasureError):
        new_discrete(2, [(1, 0), (0, 1)], [0.3, 0.3])
    mu = new_discrete(2, [(1, 0), (0, 1)], [0.3, 0.3], renormalize=True)
    np.testing.assert_allclose(mu.weights, [0.5, 0.5])


@pytest.mark.parametrize(
    "dim, atoms, weights",
    [
        (2, [(1, 0)], [-1.0]),
        (2, [(1, 0, 0)], [1.0]),
        (2, [], []),
        (1, [np.nan], [1.0]),
        (0, [[]], [1.0]),
    ],
)
def test_invalid_inputs(dim, atoms, weights):
    with pytest.raises(MeasureError):
        new_discrete(dim, atoms, weights)


def test_duplicates_kept_and_readonly():
    mu = new_discrete(1, [1, 1], [0.5, 0.5])
    assert mu.size == 2
    with pytest.raises(ValueError):
        mu.atoms[0, 0] = 3.0
    assert canonicalize(mu).size == 1


def test_json_round_trip(rng):
    mu = random_measure(rng, 3, 7)
    back = from_json(mu.to_json())
    np.testing.assert_array_equal(back.atoms, mu.atoms)
    np.testing.assert_array_equal(back.weights, mu.weights)


def test_push_forward_linear_examples():
    mu = dirac([1.0, 0.0])
    assert measures_close(push_forward_linear(mu, np.eye(2)), mu)
    np.testing.assert_array_equal(push_forward_linear(mu, np.diag([2.0, 3.0])).atoms, [[2, 0]])


def test_push_forward_linear_frame_operator(rng):
    mu = random_measure(rng, 2, 10)
    T = rng.standard_normal((2, 2))
    nu = push_forward_linear(mu, T)
    oracle = frame_operator_fsum(nu.atoms, nu.weights)
    np.testing.assert_allclose(frame_operator(nu), oracle, rtol=0, atol=1e-10)
    np.testing.assert_allclose(oracle, T @ frame_operator(mu) @ T.T, rtol=0, atol=1e-10)


def test_push_forward_map_examples():
    mu = new_discrete(1, [0, 1], [0.5, 0.5])
    assert measures_close(push_forward_map(mu, mu.atoms), mu)
    zero = push_forward_map(mu, [[0.0], [0.0]])
    assert zero.size == 2
    assert measures_close(zero, dirac([0.0]))
    flipped = push_forward_map(mu, [0.0, -1.0])
    assert measures_close(flipped, new_discrete(1, [0, -1], [0.5, 0.5]))


def test_project_hyperplane_examples(rng):
    mu = random_measure(rng, 2, 5)
    out = project_hyperplane(mu, [1.0, 0.0])
    np.testing.assert_array_equal(out.atoms[:, 0], 0.0)
    np.testing.assert_array_equal(out.atoms[:, 1], mu.atoms[:, 1])

    flat = DiscreteMeasure(np.column_stack([np.zeros(4), rng.standard_normal(4)]), np.full(4, 0.25))
    np.testing.assert_allclose(project_hyperplane(flat, [1.0, 0.0]).atoms, flat.atoms)

    x = np.array([3.0, 4.0]) / 5
    np.testing.assert_allclose(project_hyperplane(dirac(x), x).atoms, [[0.0, 0.0]], atol=1e-16)

    with pytest.raises(MeasureError):
        project_hyperplane(mu, [1.0, 1.0])


def test_project_line_examples(rng):
    mu = random_measure(rng, 2, 5)
    np.testing.assert_array_equal(project_line(mu, [1.0, 0.0]).atoms[:, 0], mu.atoms[:, 0])
    assert measures_close(project_line(dirac([0.0, 0.0]), [0.0, 1.0]), dirac([0.0]))
    half = new_discrete(2, [(1, 0), (0, 1)], [0.5, 0.5])
    assert measures_close(project_line(half, [1.0, 0.0]), new_discrete(1, [1, 0], [0.5, 0.5]))


def test_moments():
    a = np.array([1.0, -2.0, 2.0])
    mu = dirac(a)
    np.testing.assert_array_equal(mean(mu), a)
    assert measures_close(center(mu), dirac([0.0, 0.0, 0.0]))
    assert moment(mu, 2) == pytest.approx(9.0)

    sym = new_discrete(1, [-1, 1], [0.5, 0.5])
    assert mean(sym)[0] == 0 and moment(sym, 2) == 1


def test_second_moment_is_trace(rng):
    mu = random_measure(rng, 4, 30)
    trace = math.fsum(w * math.fsum(v * v) for w, v in zip(mu.weights, mu.atoms))
    assert abs(moment(mu, 2) - trace) <= 1e-10
    assert abs(moment(mu, 2) - np.trace(frame_operator(mu))) <= 1e-10


def test_convex_combine_examples(rng):
    mu = random_measure(rng, 2, 4)
    assert measures_close(convex_combine([(1.0, mu)]), mu)
    mix = convex_combine([(0.5, dirac([0.0])), (0.5, dirac([1.0]))])
    assert measures_close(mix, new_discrete(1, [0, 1], [0.5, 0.5]))
    with pytest.raises(MeasureError):
        convex_combine([(0.5, mu)])


def test_convex_combine_stays_in_fiber(rng):
    mu = random_measure(rng, 3, 8)
    S = frame_operator(mu)
    # rotating by S^{1/2} Q S^{-1/2} keeps the frame operator
    w, V = np.linalg.eigh(S)
    R, Ri = V @ np.diag(np.sqrt(w)) @ V.T, V @ np.diag(w ** -0.5) @ V.T
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    nu = push_forward_linear(mu, R @ Q @ Ri)
    mix = convex_combine([(0.3, mu), (0.7, nu)])
    oracle = frame_operator_fsum(mix.atoms, mix.weights)
    np.testing.assert_allclose(oracle, S, rtol=0, atol=1e-10)


@given(seed=seeds, dim=st.integers(1, 4), t=st.floats(0, 1))
def test_frame_operator_linear_in_mixture(seed, dim, t):
    rng = np.random.default_rng(seed)
    mu, nu = random_measure(rng, dim, 6), random_measure(rng, dim, 9)
    mix = convex_combine([(1 - t, mu), (t, nu)])
    assert abs(math.fsum(mix.weights) - 1) <= 1e-12
    expected = (1 - t) * frame_operator(mu) + t * frame_operator(nu)
    np.testing.assert_allclose(frame_operator(mix), expected, rtol=0, atol=1e-10)


@given(seed=seeds, dim=st.integers(1, 4), size=st.integers(1, 30))
def test_transform_law(seed, dim, size):
    rng = np.random.default_rng(seed)
    mu = random_measure(rng, dim, size)
    T = rng.standard_normal((dim, dim))
    nu = push_forward_linear(mu, T)
    assert abs(math.fsum(nu.weights) - 1) <= 1e-12
    np.testing.assert_allclose(
        frame_operator(nu), T @ frame_operator(mu) @ T.T, rtol=0, atol=1e-10 * max(1, np.abs(T).max() ** 2)
    )


@given(seed=seeds, dim=st.integers(1, 4))
def test_projection_idempotent_and_pythagoras(seed, dim):
    rng = np.random.default_rng(seed)
    mu = random_measure(rng, dim, 12)
    x = random_unit(rng, dim)
    once = project_hyperplane(mu, x)
    twice = project_hyperplane(once, x)
    np.testing.assert_allclose(twice.atoms, once.atoms, rtol=0, atol=1e-15)
    total = moment(once, 2) + moment(project_line(mu, x), 2)
    assert abs(moment(mu, 2) - total) <= 1e-10


def test_canonicalize_merges_and_sorts():
    mu = new_discrete(2, [(1, 0), (0, 1), (1, 0), (0, 0)], [0.25, 0.25, 0.25, 0.25])
    c = canonicalize(mu)
    np.testing.assert_array_equal(c.atoms, [[0, 0], [0, 1], [1, 0]])
    np.testing.assert_allclose(c.weights, [0.25, 0.25, 0.5])
    assert measures_close(mu, c)
