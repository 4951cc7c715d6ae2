import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density_matrix, random_unitary_2, random_xstate
from xychain.entanglement import (
    SPIN_FLIP,
    concurrence_general,
    concurrence_xstate,
    is_xstate,
)
from xychain.model import InvalidStateError, build_initial_state

PHI_PLUS = np.array([1, 0, 0, 1]) / math.sqrt(2)


def werner(p):
    return p * np.outer(PHI_PLUS, PHI_PLUS) + (1 - p) / 4 * np.eye(4)


def concurrence_via_matrix_sqrt(rho):
    """Textbook route: eigenvalues of R = sqrt(sqrt(rho) rho_tilde sqrt(rho))."""
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    rho_tilde = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    m = sq @ rho_tilde @ sq
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0, None))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_bell_state_is_maximal():
    assert abs(concurrence_general(build_initial_state(math.pi / 4)) - 1) < 1e-14
    assert abs(concurrence_xstate(build_initial_state(math.pi / 4)) - 1) < 1e-15


def test_product_state_is_zero():
    assert concurrence_general(build_initial_state(0.0)) == 0.0
    assert concurrence_xstate(np.eye(4) / 4) == 0.0


@pytest.mark.parametrize("p", [0.2, 1 / 3, 0.5, 0.8, 0.95, 1.0])
def test_werner_closed_form(p):
    # known closed form max(0, (3p - 1)/2)
    expected = max(0.0, (3 * p - 1) / 2)
    assert abs(concurrence_general(werner(p)) - expected) < 1e-12
    assert abs(concurrence_xstate(werner(p)) - expected) < 1e-12


def test_general_matches_matrix_sqrt_route(rng):
    for _ in range(200):
        rho = random_density_matrix(rng, rank=rng.integers(1, 5))
        assert abs(concurrence_general(rho) - concurrence_via_matrix_sqrt(rho)) < 1e-7


def test_xstate_matches_general(rng):
    worst = 0.0
    for _ in range(1000):
        rho = random_xstate(rng)
        worst = max(worst, abs(concurrence_xstate(rho) - concurrence_general(rho)))
    assert worst < 1e-10


def test_local_unitary_invariance(rng):
    for _ in range(100):
        rho = random_density_matrix(rng, rank=rng.integers(1, 5))
        u = np.kron(random_unitary_2(rng), random_unitary_2(rng))
        rotated = u @ rho @ u.conj().T
        assert abs(concurrence_general(rotated) - concurrence_general(rho)) < 1e-10


@settings(max_examples=300)
@given(st.floats(0, 2 * math.pi))
def test_pure_state_2ab(phi):
    a, b = math.cos(phi), math.sin(phi)
    psi = np.array([a, 0, 0, b])
    assert abs(concurrence_general(np.outer(psi, psi)) - 2 * abs(a * b)) < 1e-12


def test_range_clamped(rng):
    for _ in range(200):
        c = concurrence_general(random_density_matrix(rng, rank=rng.integers(1, 5)))
        assert 0.0 <= c <= 1.0


def test_batched_evaluation(rng):
    stack = np.array([random_xstate(rng) for _ in range(20)])
    batch = concurrence_general(stack)
    assert batch.shape == (20,)
    assert np.allclose(batch, [concurrence_general(r) for r in stack], atol=1e-15)
    assert np.allclose(concurrence_xstate(stack), batch, atol=1e-10)


def test_general_rejects_bad_input():
    with pytest.raises(InvalidStateError):
        concurrence_general(np.eye(4) / 3)
    bad = np.eye(4) / 4
    bad[0, 1] = 0.1
    with pytest.raises(InvalidStateError):
        concurrence_general(bad)


def test_xstate_rejects_off_pattern():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 1] = rho[1, 0] = 1e-7
    assert not is_xstate(rho)
    with pytest.raises(InvalidStateError, match="X state"):
        concurrence_xstate(rho)
    rho[0, 1] = rho[1, 0] = 1e-9
    assert is_xstate(rho)
    concurrence_xstate(rho)
