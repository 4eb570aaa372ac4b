import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eurwitness import linalg
from eurwitness.errors import InvalidState, PartyError
from eurwitness.measurements import dephase, random_basis
from eurwitness.states import (
    DensityState,
    conditional_entropy,
    random_density,
    random_pure,
    relative_entropy,
    von_neumann_entropy,
)

from oracles import spectrum_entropy

BELL = DensityState.from_ket([1, 0, 0, 1], (2, 2))
GHZ = DensityState.from_ket([1, 0, 0, 0, 0, 0, 0, 1], (2, 2, 2))


def ghz_werner_matrix(p):
    psi = np.zeros(8)
    psi[[0, 7]] = 1 / math.sqrt(2)
    return p * np.outer(psi, psi) + (1 - p) * np.eye(8) / 8


def test_entropy_trivial_cases():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0


def test_entropy_ghz_werner_spectrum():
    p = 0.5
    expected = spectrum_entropy([p + (1 - p) / 8] + [(1 - p) / 8] * 7)
    rho = DensityState(ghz_werner_matrix(p), (2, 2, 2))
    assert abs(von_neumann_entropy(rho) - expected) <= 1e-10


def test_invalid_states_rejected():
    with pytest.raises(InvalidState):
        DensityState(np.diag([0.6, 0.6]), (2,))
    with pytest.raises(InvalidState):
        DensityState(np.diag([1.2, -0.2]), (2,))
    with pytest.raises(InvalidState):
        von_neumann_entropy(np.diag([1.2, -0.2]))


def test_tiny_negative_eigenvalues_are_clipped():
    m = np.diag([1.0 + 5e-11, -5e-11])
    assert von_neumann_entropy(m) == pytest.approx(0.0, abs=1e-9)


def test_conditional_entropy_examples():
    assert conditional_entropy(BELL, "A", ["B"]) == pytest.approx(-1.0, abs=1e-12)
    ra = np.diag([0.2, 0.8])
    prod = DensityState(np.kron(ra, np.eye(3) / 3), (2, 3))
    assert conditional_entropy(prod, 0, [1]) == pytest.approx(von_neumann_entropy(ra), abs=1e-12)
    assert conditional_entropy(GHZ, "A", ["B", "C"]) == pytest.approx(-1.0, abs=1e-12)


def test_conditional_entropy_party_errors():
    with pytest.raises(PartyError):
        conditional_entropy(BELL, "A", ["A"])
    with pytest.raises(PartyError):
        conditional_entropy(BELL, "A", ["Q"])


def test_relative_entropy_examples():
    zero = np.diag([1.0, 0.0])
    assert relative_entropy(zero, zero) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(zero, np.eye(2) / 2) == pytest.approx(1.0)
    assert relative_entropy(zero, np.diag([0.0, 1.0])) == math.inf


def test_reduce_and_permute(rng):
    rho = random_density((2, 3, 2), rng)
    red = rho.reduce(["C", "A"])
    assert red.labels == ("A", "C") and red.dims == (2, 2)
    perm = rho.permute(["C", "A", "B"])
    assert perm.dims == (2, 2, 3)
    assert abs(von_neumann_entropy(perm.reduce(["C"])) - von_neumann_entropy(rho.reduce(["C"]))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), da=st.sampled_from([2, 3]), db=st.sampled_from([2, 3, 4]))
def test_pure_conditional_entropy_is_minus_marginal(seed, da, db):
    rho = random_pure((da, db), np.random.default_rng(seed))
    assert abs(conditional_entropy(rho, 0, [1]) + von_neumann_entropy(rho.reduce([0]))) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_relative_entropy_contracts_under_dephasing(seed):
    rng = np.random.default_rng(seed)
    rho = random_density((2, 2), rng)
    sigma = random_density((2, 2), rng)
    bases = {"A": random_basis(2, rng), "B": random_basis(2, rng)}
    before = relative_entropy(rho, sigma)
    after = relative_entropy(dephase(rho, bases), dephase(sigma, bases))
    assert before >= 0
    assert after <= before + 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(2, 5))
def test_conditional_entropy_concave(seed, k):
    rng = np.random.default_rng(seed)
    parts = [random_density((2, 2), rng, rank=1) for _ in range(k)]
    w = rng.dirichlet(np.ones(k))
    mix = DensityState(sum(wi * p.matrix for wi, p in zip(w, parts)), (2, 2))
    avg = sum(wi * conditional_entropy(p, 0, [1]) for wi, p in zip(w, parts))
    assert conditional_entropy(mix, 0, [1]) >= avg - 1e-9


def test_entropy_bounds(rng):
    for d in (2, 3, 5):
        s = von_neumann_entropy(random_density((d,), rng))
        assert 0 <= s <= math.log2(d) + 1e-12


def test_density_eigenvalues_in_unit_interval(rng):
    w = linalg.eigvalsh(random_density((2, 3), rng).matrix)
    assert w.min() >= -1e-10 and w.max() <= 1 + 1e-10
