import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eurwitness import eur
from eurwitness.errors import CapExceeded, ConfigError, DimensionMismatch
from eurwitness.eur import MeasurementConfig
from eurwitness.measurements import ProjectiveBasis, classical_conditional_entropy, joint_distribution, random_basis
from eurwitness.scenarios import WernerSpec, qubit_basis, werner_state
from eurwitness.states import DensityState, conditional_entropy, random_density
from eurwitness.verify import random_config

from oracles import chain_factor_nested_sum, heap_permutations

X, Y, Z, R = (qubit_basis(n) for n in "xyzr")
BELL = DensityState.from_ket([1, 0, 0, 1], (2, 2))


def config2(ref, unc, mem_basis=None, partners=None):
    mem_basis = mem_basis or ref
    return MeasurementConfig(
        target=0,
        referenced=ref,
        referenced_memory={1: mem_basis},
        uncertainty=tuple(unc),
        partners=tuple({1: p} for p in (partners or unc)),
    )


def test_config_validation():
    with pytest.raises(ConfigError):
        MeasurementConfig(0, Z, {1: Z}, ())
    with pytest.raises(DimensionMismatch):
        MeasurementConfig(0, Z, {1: Z}, (ProjectiveBasis.computational(3),))
    with pytest.raises(ConfigError):
        MeasurementConfig(0, Z, {}, (X,))
    c = config2(Z, [X, R])
    assert c.theorem1_order() == (0, 1, 2)
    assert c.corollary1_order() == (1, 2, 0)
    assert c.describe((2, 0, 1)) == "r>z>x"


def test_identical_bases_give_referenced_entropy(rng):
    rho = random_density((2, 2), rng)
    b = random_basis(2, rng, "b")
    cfg = config2(b, [b, b], mem_basis=random_basis(2, rng))
    h = classical_conditional_entropy(joint_distribution(rho, {0: b, 1: cfg.referenced_memory[1]}), [0], [1])
    for q in eur.factors_by_order(cfg, eur.exact_tables(rho)).values():
        assert q == pytest.approx(h, abs=1e-12)


def test_maximally_mixed_target_gives_log_dimension(rng):
    rb = random_density((3,), rng).matrix
    rho = DensityState(np.kron(np.eye(3) / 3, rb), (3, 3))
    cfg = MeasurementConfig(0, random_basis(3, rng), {1: random_basis(3, rng)}, (random_basis(3, rng), random_basis(3, rng)))
    for q in eur.factors_by_order(cfg, eur.exact_tables(rho)).values():
        assert q == pytest.approx(math.log2(3), abs=1e-12)


def test_chain_factor_matches_nested_sum(rng):
    rho = random_density((2, 2), rng)
    cfg = config2(random_basis(2, rng), [random_basis(2, rng), random_basis(2, rng)], random_basis(2, rng))
    for order in heap_permutations(3):
        expected = chain_factor_nested_sum(
            rho.matrix, [cfg.chain[i].vectors for i in order], cfg.referenced_memory[1].vectors
        )
        assert abs(eur.chain_factor(rho, order, cfg) - expected) <= 1e-10


def test_chain_reduces_to_both_named_factors(rng):
    rho = random_density((2, 3), rng)
    cfg = MeasurementConfig(0, random_basis(2, rng), {1: random_basis(3, rng)}, (random_basis(2, rng), random_basis(2, rng)))
    # X first: sum over x, m1 of c_{x m1} c_{m1 m2} p(x|y)
    p_xy = joint_distribution(rho, {0: cfg.referenced, 1: cfg.referenced_memory[1]}).probabilities
    p_m2y = joint_distribution(rho, {0: cfg.uncertainty[1], 1: cfg.referenced_memory[1]}).probabilities
    c = lambda a, b: np.abs(a.vectors.conj().T @ b.vectors) ** 2
    beta = c(cfg.uncertainty[0], cfg.uncertainty[1]).T @ c(cfg.referenced, cfg.uncertainty[0]).T @ (p_xy / p_xy.sum(0))
    q1 = -np.sum(p_m2y * np.log2(beta))
    assert eur.chain_factor(rho, cfg.theorem1_order(), cfg) == pytest.approx(q1, abs=1e-12)
    # X last: sum over m1, m2 of c_{m1 m2} c_{x m2} p(m1|y)
    p_m1y = joint_distribution(rho, {0: cfg.uncertainty[0], 1: cfg.referenced_memory[1]}).probabilities
    gamma = c(cfg.referenced, cfg.uncertainty[1]) @ c(cfg.uncertainty[0], cfg.uncertainty[1]).T @ (p_m1y / p_m1y.sum(0))
    q2 = -np.sum(p_xy * np.log2(gamma))
    assert eur.chain_factor(rho, cfg.corollary1_order(), cfg) == pytest.approx(q2, abs=1e-12)


def test_vacuous_factor_is_infinite():
    rho = DensityState(np.diag([1.0, 0, 0, 0]), (2, 2))
    assert eur.chain_factor(rho, (0, 1), config2(Z, [Z])) == pytest.approx(0.0, abs=1e-12)
    # tables that disagree (as sampled tables can) leave an outcome with p > 0 but beta = 0
    first = np.array([[1.0, 0.0], [0.0, 0.0]])
    last = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert eur._factor(first, last, [np.eye(2)]) == math.inf


def test_optimal_factor_single_repeated_basis(rng):
    rho = random_density((2, 2), rng)
    cfg = config2(Z, [Z])
    h = classical_conditional_entropy(joint_distribution(rho, {0: Z, 1: Z}), [0], [1])
    q_m, order = eur.optimal_factor(rho, cfg)
    assert q_m == pytest.approx(h, abs=1e-12)
    assert order == (0, 1)  # tie resolved to the lexicographically smallest ordering


def test_optimal_factor_dominates_named_orders():
    rho = werner_state(WernerSpec("ghz", 0.9))
    cfg = MeasurementConfig(0, Z, {1: Z, 2: Z}, (X,))
    q_m, _ = eur.optimal_factor(rho, cfg)
    assert q_m >= eur.chain_factor(rho, cfg.theorem1_order(), cfg)
    assert q_m >= eur.chain_factor(rho, cfg.corollary1_order(), cfg)


def test_optimal_factor_independent_enumeration(rng):
    rho = random_density((3, 3), rng)
    cfg = MeasurementConfig(0, random_basis(3, rng), {1: random_basis(3, rng)}, (random_basis(3, rng), random_basis(3, rng)))
    values = {
        o: chain_factor_nested_sum(rho.matrix, [cfg.chain[i].vectors for i in o], cfg.referenced_memory[1].vectors)
        for o in heap_permutations(3)
    }
    assert len(values) == 6
    q_m, order = eur.optimal_factor(rho, cfg)
    assert q_m == pytest.approx(max(values.values()), abs=1e-10)
    assert values[order] == pytest.approx(q_m, abs=1e-10)


def test_order_cap():
    cfg = config2(Z, [X, Y, R])
    with pytest.raises(CapExceeded):
        eur.optimal_factor(BELL, cfg, cap=6)


def test_uncertainty_lhs_examples():
    prod = DensityState(np.diag([1.0, 0, 0, 0]), (2, 2))
    assert eur.uncertainty_lhs(prod, config2(Z, [Z])) == pytest.approx(0.0, abs=1e-12)
    mixed = DensityState(np.eye(4) / 4, (2, 2))
    assert eur.uncertainty_lhs(mixed, config2(Z, [X], Z)) == pytest.approx(2.0)
    assert eur.uncertainty_lhs(BELL, config2(Z, [X], Z)) == pytest.approx(0.0, abs=1e-12)


def test_identical_bases_slack(rng):
    rho = random_density((2, 2), rng)
    cfg = config2(Z, [Z])
    slack = eur.uncertainty_lhs(rho, cfg) - eur.theorem1_rhs(rho, cfg)
    from eurwitness.measurements import post_measurement_conditional_entropy

    expected = post_measurement_conditional_entropy(rho, 0, Z, [1]) - conditional_entropy(rho, 0, [1])
    assert slack == pytest.approx(expected, abs=1e-12)
    assert slack >= 0


def test_fully_mixed_three_qubits():
    rho = werner_state(WernerSpec("ghz", 0.0))
    cfg = MeasurementConfig(0, Z, {1: Z, 2: Z}, (X, Y))
    q_m, _ = eur.optimal_factor(rho, cfg)
    assert q_m == pytest.approx(1.0)
    assert eur.theorem2_rhs(rho, cfg) == pytest.approx(2 * 1 + q_m)
    assert eur.uncertainty_lhs(rho, cfg) >= eur.theorem2_rhs(rho, cfg) - 1e-12


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    da=st.sampled_from([2, 3]),
    mem=st.sampled_from([(2,), (3,), (4,), (2, 2)]),
    n=st.integers(1, 3),
)
def test_relations_hold_for_every_order(seed, da, mem, n):
    rho, cfg = random_config(np.random.default_rng(seed), da, mem, n)
    lhs = eur.uncertainty_lhs(rho, cfg)
    t1, c1, t2 = eur.theorem1_rhs(rho, cfg), eur.corollary1_rhs(rho, cfg), eur.theorem2_rhs(rho, cfg)
    assert t2 >= max(t1, c1) - 1e-12
    assert lhs - t2 >= -1e-9
    assert eur.state_independent_lhs(rho, cfg) - eur.state_independent_rhs(rho, cfg) >= -1e-9


def test_mub_chain_is_order_independent(rng):
    ra = random_density((2,), rng).matrix
    rho = DensityState(np.kron(ra, np.eye(2) / 2), (2, 2))
    cfg = MeasurementConfig(0, Z, {1: X}, (X, Y))
    qs = list(eur.factors_by_order(cfg, eur.exact_tables(rho)).values())
    assert max(qs) - min(qs) <= 1e-10


def test_state_independent_constants():
    assert eur.state_independent_c(Z, X) == pytest.approx(1.0)
    assert eur.state_independent_c(Z, Z) == pytest.approx(0.0)
    assert eur.state_independent_b([X, Y, Z]) == pytest.approx(1.0)
    assert eur.state_independent_b([Z, R]) == pytest.approx(eur.state_independent_c(Z, R))
    with pytest.raises(ConfigError):
        eur.state_independent_b([Z])


def test_state_independent_b_brute_force(rng):
    bases = [random_basis(3, rng) for _ in range(4)]
    c = [np.abs(a.vectors.conj().T @ b.vectors) ** 2 for a, b in zip(bases[:-1], bases[1:])]
    best = 0.0
    for i4 in range(3):
        total = 0.0
        for i2 in range(3):
            for i3 in range(3):
                total += max(c[0][i1, i2] for i1 in range(3)) * c[1][i2, i3] * c[2][i3, i4]
        best = max(best, total)
    assert eur.state_independent_b(bases) == pytest.approx(-math.log2(best), abs=1e-12)
    value, perm = eur.best_state_independent_b(bases)
    assert value >= eur.state_independent_b(bases) - 1e-12
    assert eur.state_independent_b([bases[i] for i in perm]) == pytest.approx(value)


def test_lemma_pure_product_schmidt_basis():
    rho = DensityState(np.diag([0.0, 1.0, 0, 0]), (2, 2))
    r = eur.verify_lemma1(rho, config2(Z, [Z]))
    assert r.finite
    assert r.inequality_slack >= -1e-12
    assert r.identity_residual <= 1e-12


def test_lemma_random_two_qubit(rng):
    for _ in range(20):
        rho = random_density((2, 2), rng)
        cfg = config2(random_basis(2, rng), [random_basis(2, rng)], random_basis(2, rng))
        r = eur.verify_lemma1(rho, cfg)
        assert r.inequality_slack >= -1e-9
        assert r.identity_residual <= 1e-9


def test_lemma_bell_z_chain():
    r = eur.verify_lemma1(BELL, config2(Z, [Z], Z))
    # beta reduces to p(x|y) = delta, so S(rho||sigma) = -S(rho) - 0 = 0
    assert r.identity_value == pytest.approx(0.0, abs=1e-10)
    assert r.identity_residual <= 1e-10


def test_bound_report_consistency(rng):
    rho, cfg = random_config(rng, 2, (2, 2), 2)
    rep = eur.bound_report(rho, cfg)
    assert rep.q_m == max(rep.q_per_order.values())
    assert rep.q_per_order[rep.best_order] == pytest.approx(rep.q_m)
    assert rep.lhs >= rep.rhs_state_dependent - 1e-9
    assert rep.lhs_state_independent >= rep.rhs_state_independent - 1e-9
    assert not rep.vacuous
