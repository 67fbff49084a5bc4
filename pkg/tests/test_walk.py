import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caqwbh import walk
from caqwbh.errors import DomainError, SizeMismatch
from caqwbh.walk import HADAMARD, WalkState, make_coin, theta_from_cos

from .conftest import random_state
from .oracles import coin_matrix, dense_step

COIN0 = make_coin(theta_from_cos(3 / 5))
COIN1 = make_coin(theta_from_cos(8 / 17))


class TestCoin:
    def test_three_fifths(self):
        np.testing.assert_allclose(COIN0.matrix(), [[0.6, 0.8], [0.8, -0.6]], atol=1e-16)

    def test_hadamard(self):
        coin = make_coin(math.pi / 4)
        assert coin is HADAMARD
        r = math.sqrt(0.5)  # correctly rounded 1/sqrt(2); 1 / math.sqrt(2) is one ulp low
        np.testing.assert_array_equal(coin.matrix(), [[r, r], [r, -r]])

    @pytest.mark.parametrize("theta", [0.0, -0.1, math.pi / 2, 2.0, float("nan")])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            make_coin(theta)

    @given(st.floats(min_value=1e-6, max_value=math.pi / 2 - 1e-6), st.floats(-1, 1), st.floats(-1, 1))
    def test_involution_and_unit(self, theta, a, b):
        coin = make_coin(theta)
        assert abs(coin.c**2 + coin.s**2 - 1) <= 1e-15
        assert coin.c > 0 and coin.s > 0
        m = coin.matrix()
        v = np.array([a, b])
        np.testing.assert_allclose(m @ (m @ v), v, atol=1e-14)

    def test_correctly_rounded(self):
        # cos(acos(3/5)) lands on the double nearest 0.6.
        assert COIN0.c == 0.6 and COIN0.s == 0.8


def test_apply_coin_basis(backend):
    s = WalkState.basis(3, 0, 0)
    walk.apply_coin(s, np.zeros(8, dtype=np.uint8), COIN0, COIN1)
    expected = np.zeros(16)
    expected[0], expected[1] = 0.6, 0.8
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-16)


def test_apply_coin_selects_per_position(backend):
    s = WalkState(2, np.full(8, 0.5 / math.sqrt(2)))
    block = np.array([0, 1, 1, 0], dtype=np.uint8)
    before = s.amplitudes.copy()
    walk.apply_coin(s, block, COIN0, COIN1)
    for x, b in enumerate(block):
        m = coin_matrix(*((COIN0.c, COIN0.s) if b == 0 else (COIN1.c, COIN1.s)))
        np.testing.assert_allclose(s.amplitudes[2 * x : 2 * x + 2], m @ before[2 * x : 2 * x + 2], atol=1e-15)


def test_apply_coin_hadamard(backend):
    s = WalkState.basis(1, 0, 0)
    walk.apply_coin(s, [0, 0], HADAMARD, COIN1)
    r = math.sqrt(0.5)
    np.testing.assert_array_equal(s.amplitudes, [r, r, 0, 0])


def test_apply_coin_size_mismatch():
    with pytest.raises(SizeMismatch):
        walk.apply_coin(WalkState(3), [0] * 7, COIN0, COIN1)


def test_apply_coin_norm(backend, rng):
    for q in (1, 3, 5):
        s = random_state(rng, q)
        walk.apply_coin(s, rng.integers(0, 2, 1 << q), COIN0, COIN1)
        assert abs(s.norm() - 1) < 1e-12


def test_apply_coin_twice_is_identity(backend, rng):
    s = random_state(rng, 4)
    before = s.amplitudes.copy()
    block = rng.integers(0, 2, 16)
    walk.apply_coin(s, block, COIN0, COIN1)
    walk.apply_coin(s, block, COIN0, COIN1)
    assert np.max(np.abs(s.amplitudes - before)) < 1e-13


@pytest.mark.parametrize(
    "q, i, x, c, target",
    [(1, 1, 0, 1, 1), (2, 2, 1, 1, 3), (3, 3, 2, 1, 6), (3, 1, 5, 0, 5), (3, 3, 7, 0, 7)],
)
def test_shift_basis(backend, q, i, x, c, target):
    s = WalkState.basis(q, x, c)
    walk.apply_shift(s, i)
    assert s == WalkState.basis(q, target, c)


def test_shift_twice_exact_identity(backend, rng):
    s = random_state(rng, 5)
    before = s.copy()
    for i in range(1, 6):
        walk.apply_shift(s, i)
        walk.apply_shift(s, i)
    assert s == before


@pytest.mark.parametrize("i", [0, 4])
def test_shift_domain(i):
    with pytest.raises(DomainError):
        walk.apply_shift(WalkState(3), i)


def test_step_q1_closed_form(backend):
    s = walk.step(WalkState(1), [0, 0], COIN0, COIN1)
    np.testing.assert_allclose(s.amplitudes, [0.6, 0, 0, 0.8], atol=1e-16)
    np.testing.assert_allclose(walk.probabilities(s), [0.36, 0.64], atol=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_step_matches_dense_oracle(backend, rng, q):
    coins = [coin_matrix(COIN0.c, COIN0.s), coin_matrix(COIN1.c, COIN1.s)]
    for _ in range(20):
        s = random_state(rng, q)
        block = rng.integers(0, 2, 1 << q)
        expected = dense_step(q, block, coins) @ s.amplitudes
        walk.step(s, block, COIN0, COIN1)
        assert np.max(np.abs(s.amplitudes - expected)) < 1e-12


def test_step_is_coin_then_shift_sequence(backend, rng):
    s = random_state(rng, 3)
    manual = s.copy()
    block = rng.integers(0, 2, 8)
    walk.step(s, block, COIN0, COIN1)
    for i in (1, 2, 3):
        walk.apply_coin(manual, block, COIN0, COIN1)
        walk.apply_shift(manual, i)
    assert s == manual


def test_evolve_composition(backend, rng):
    s = random_state(rng, 3)
    assert walk.evolve(s.copy(), np.empty((0, 8)), COIN0, COIN1) == s
    b1, b2 = rng.integers(0, 2, (2, 8))
    one = walk.evolve(s.copy(), [b1], COIN0, COIN1)
    assert one == walk.step(s.copy(), b1, COIN0, COIN1)
    two = walk.evolve(s.copy(), [b1, b2], COIN0, COIN1)
    assert two == walk.step(walk.step(s.copy(), b1, COIN0, COIN1), b2, COIN0, COIN1)


def test_probabilities_basis(backend):
    p = walk.probabilities(WalkState.basis(3, 3, 1))
    np.testing.assert_array_equal(p, np.eye(8)[3])


def test_long_evolution_stays_normalized(backend, rng):
    s = WalkState(5)
    walk.evolve(s, rng.integers(0, 2, (1000, 32)), COIN0, COIN1)
    assert abs(s.norm() - 1) < 1e-10
    assert abs(walk.probabilities(s).sum() - 1) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6),
    st.floats(0.01, math.pi / 2 - 0.01).filter(lambda t: abs(t - math.pi / 4) > 1e-3),
    st.floats(0.01, math.pi / 2 - 0.01).filter(lambda t: abs(t - math.pi / 4) > 1e-3),
    st.data(),
)
def test_every_position_reached_after_one_step(q, t0, t1, data):
    block = data.draw(st.lists(st.integers(0, 1), min_size=1 << q, max_size=1 << q))
    s = walk.step(WalkState(q), block, make_coin(t0), make_coin(t1))
    assert np.all(walk.probabilities(s) > 0)


def test_backends_bit_identical(rng):
    backends = walk.available_backends()
    if len(backends) < 2:
        pytest.skip("compiled kernels not built")
    blocks = rng.integers(0, 2, (200, 32)).astype(np.uint8)
    results = []
    for mod in backends.values():
        s = random_state(np.random.default_rng(7), 5)
        ctab, stab = walk.coin_tables(COIN0, COIN1)
        mod.evolve(s._buf(), blocks.ravel(), 5, ctab, stab)
        out = np.empty(32)
        mod.probabilities(s._buf(), out)
        results.append((s.amplitudes.tobytes(), out.tobytes()))
    assert results[0] == results[1]


def test_repeat_runs_bit_identical(backend, rng):
    blocks = rng.integers(0, 2, (50, 16))
    a = walk.evolve(WalkState(4), blocks, COIN0, COIN1)
    b = walk.evolve(WalkState(4), blocks, COIN0, COIN1)
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()
