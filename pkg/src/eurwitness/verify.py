"""Randomised property suite behind ``eur-witness verify``."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import eur, witness
from .eur import MeasurementConfig
from .measurements import classical_conditional_entropy, joint_distribution, overlaps, random_basis
from .states import conditional_entropy, random_density, random_separable

SLACK = 1e-9


@dataclass
class PropertyResult:
    name: str
    trials: int
    worst: float
    passed: bool
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.trials} trials, worst margin {self.worst:.3e} ({self.seconds:.2f} s)"


def random_config(rng: np.random.Generator, d_a: int, mem_dims, n: int) -> tuple:
    """Random state on ``A`` plus memory parties, and a random measurement config."""
    dims = (d_a, *mem_dims)
    rank = int(rng.integers(1, int(np.prod(dims)) + 1))
    rho = random_density(dims, rng, rank)
    mem = list(range(1, len(dims)))
    names = iter(f"m{i}" for i in itertools.count())
    config = MeasurementConfig(
        target=0,
        referenced=random_basis(d_a, rng, "X"),
        referenced_memory={m: random_basis(dims[m], rng, f"Y{m}") for m in mem},
        uncertainty=tuple(random_basis(d_a, rng, next(names)) for _ in range(n)),
        partners=tuple({m: random_basis(dims[m], rng, f"P{m}") for m in mem} for _ in range(n)),
    )
    return rho, config


def _draw(rng):
    d_a = int(rng.choice([2, 3]))
    mem_dims = [(2,), (3,), (4,), (2, 2)][int(rng.integers(4))]
    n = int(rng.integers(1, 4))
    return random_config(rng, d_a, mem_dims, n)


def brute_force_factor(rho, order, config) -> float:
    """Complementary factor by explicit summation over every intermediate outcome tuple."""
    bases = config.chain
    seq = [bases[i] for i in order]
    assign = lambda b: {config.target: b, **config.referenced_memory}
    first = joint_distribution(rho, assign(seq[0])).probabilities
    last = joint_distribution(rho, assign(seq[-1])).probabilities
    d = seq[0].dim
    first = first.reshape(d, -1)
    last = last.reshape(d, -1)
    cs = [overlaps(a, b) for a, b in zip(seq[:-1], seq[1:])]
    q = 0.0
    for y in range(first.shape[1]):
        py = first[:, y].sum()
        for k in range(d):
            p = last[k, y]
            if p <= 1e-12:
                continue
            beta = 0.0
            for path in itertools.product(range(d), repeat=len(seq) - 1):
                idx = path + (k,)
                w = first[idx[0], y] / py
                for step, c in enumerate(cs):
                    w *= c[idx[step], idx[step + 1]]
                beta += w
            if beta <= 0:
                return math.inf
            q -= p * math.log2(beta)
    return q


def check_uncertainty_relations(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        rho, config = _draw(rng)
        lhs = eur.uncertainty_lhs(rho, config)
        n_cond = config.n * conditional_entropy(rho, 0, config.memory)
        for q in eur.factors_by_order(config, eur.exact_tables(rho)).values():
            worst = min(worst, lhs - (n_cond + q))
    return PropertyResult("uncertainty relation, every ordering", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def check_lemma(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        rho, config = _draw(rng)
        r = eur.verify_lemma1(rho, config)
        if r.finite:
            worst = min(worst, r.inequality_slack, SLACK - r.identity_residual)
    return PropertyResult("relative-entropy form and closed form agree", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def check_chain_oracle(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        rho, config = _draw(rng)
        for order in itertools.permutations(range(config.n + 1)):
            a = eur.chain_factor(rho, order, config)
            b = brute_force_factor(rho, order, config)
            worst = min(worst, 1e-10 - abs(a - b))
    return PropertyResult("transfer-matrix chain equals nested sum", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def check_data_processing(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        rho, config = _draw(rng)
        quantum = eur.quantum_conditional_entropies(rho, config)
        classical = eur.partner_conditional_entropies(config, eur.exact_tables(rho))
        worst = min(worst, min(c - q for c, q in zip(classical, quantum)))
    return PropertyResult("measured memory never beats quantum memory", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def check_mode_ordering(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        rho, config = _draw(rng)
        exp = witness.coherent_info_bound(rho, config, experimental=True)
        exact = witness.coherent_info_bound(rho, config, experimental=False)
        true = -conditional_entropy(rho, 0, config.memory)
        worst = min(worst, exact - exp, true - exact)
    return PropertyResult("experimental <= exact <= coherent information", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def check_separable(trials: int, rng) -> PropertyResult:
    t0 = time.perf_counter()
    worst = math.inf
    for _ in range(trials):
        dims = [(2, 2), (2, 2, 2), (2, 3)][int(rng.integers(3))]
        rho = random_separable(dims, rng, int(rng.integers(1, 9)))
        k = int(rng.integers(2, 4))
        bases = {p: [random_basis(d, rng, f"b{j}") for j in range(k)] for p, d in zip(rho.labels, dims)}
        values = []
        for experimental in (False, True):
            values += list(witness.party_terms(rho, bases, experimental).values())
        values = [t.value for t in values]
        values += list(witness.true_coherent_informations(rho).values())
        worst = min(worst, -max(values))
    return PropertyResult("no witness fires on separable states", trials, worst, worst >= -SLACK, time.perf_counter() - t0)


def run_all(trials: int = 500, seed: int = 7) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    small = max(1, trials // 5)
    return [
        check_uncertainty_relations(trials, rng),
        check_lemma(trials, rng),
        check_chain_oracle(small, rng),
        check_data_processing(trials, rng),
        check_mode_ordering(trials, rng),
        check_separable(max(1, (3 * trials) // 5), rng),
    ]
