"""Complementary factors and the state-dependent uncertainty relations.

For a target party ``A`` with memory ``B`` (one or more parties), a
referenced pair ``X`` (on A) / ``Y`` (product basis on B) and uncertainty
measurements ``M_1..M_N`` on A, every ordering ``e`` of the ``N+1`` A-bases
gives

    sum_i S(M_i|B) + H(X|Y) >= N S(A|B) + q_e,
    q_e = -sum_{k,y} p(e_last=k, y) log2 beta_{k,y},
    beta = C_{N}^T ... C_{1}^T p(e_first | y),

with ``C_i`` the overlap matrix between consecutive bases of the ordering.
The nested sum over intermediate outcomes is evaluated as a chain of
matrix-vector products.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CapExceeded, ConfigError, DimensionMismatch, MissingPartnerBasis, PartyError
from .measurements import (
    ProjectiveBasis,
    joint_distribution,
    overlaps,
    post_measurement_conditional_entropy,
)
from .states import DensityState, Party, conditional_entropy, relative_entropy, shannon_bits, von_neumann_entropy
from .tolerances import TOL
from . import linalg

ChainOrder = tuple[int, ...]
"""Permutation of chain indices; index 0 is the referenced basis X, ``i`` is ``M_i``."""

# maps {party: basis} to the outcome table, axes in mapping order
TableProvider = Callable[[Mapping[Party, ProjectiveBasis]], np.ndarray]

# entropy in bits of a (possibly empirical) probability table
EntropyFn = Callable[[np.ndarray], float]

DEFAULT_ORDER_CAP = math.factorial(10)


@dataclass(frozen=True, eq=False)
class MeasurementConfig:
    """Measurements used in one uncertainty relation.

    ``partners[i]`` assigns the memory-side bases ``M_i'`` that stand in for
    the quantum memory once the data-processing inequality is applied; they
    are only needed for experimental-mode bounds.
    """

    target: Party
    referenced: ProjectiveBasis
    referenced_memory: Mapping[Party, ProjectiveBasis]
    uncertainty: tuple[ProjectiveBasis, ...]
    partners: tuple[Mapping[Party, ProjectiveBasis], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "uncertainty", tuple(self.uncertainty))
        object.__setattr__(self, "referenced_memory", dict(self.referenced_memory))
        object.__setattr__(self, "partners", tuple(dict(p) for p in self.partners))
        if not self.uncertainty:
            raise ConfigError("at least one uncertainty measurement is required")
        if not self.referenced_memory:
            raise ConfigError("at least one memory party with a referenced basis is required")
        if any(b.dim != self.referenced.dim for b in self.uncertainty):
            raise DimensionMismatch("all bases on the target must share its dimension")
        if self.target in self.referenced_memory:
            raise PartyError("target cannot be part of its own memory")
        if self.partners and len(self.partners) != len(self.uncertainty):
            raise ConfigError("need one partner assignment per uncertainty measurement")
        for p in self.partners:
            if set(p) != set(self.referenced_memory):
                raise ConfigError("partner bases must cover exactly the memory parties")

    @property
    def n(self) -> int:
        return len(self.uncertainty)

    @property
    def memory(self) -> tuple[Party, ...]:
        return tuple(self.referenced_memory)

    @property
    def chain(self) -> tuple[ProjectiveBasis, ...]:
        return (self.referenced, *self.uncertainty)

    def theorem1_order(self) -> ChainOrder:
        return tuple(range(self.n + 1))

    def corollary1_order(self) -> ChainOrder:
        return tuple(range(1, self.n + 1)) + (0,)

    def describe(self, order: ChainOrder) -> str:
        return ">".join(self.chain[i].name or str(i) for i in order)


def exact_tables(rho: DensityState) -> TableProvider:
    return lambda assignment: joint_distribution(rho, assignment).probabilities


def _memory_table(probs: TableProvider, config: MeasurementConfig, basis: ProjectiveBasis) -> np.ndarray:
    """``p(e, y)`` with the memory outcome ``y`` flattened over memory parties."""
    t = np.asarray(probs({config.target: basis, **config.referenced_memory}), dtype=float)
    return t.reshape(basis.dim, -1)


def _conditional(table: np.ndarray) -> np.ndarray:
    """``p(e|y)``; a memory outcome never seen gets a column of ones.

    Overlap matrices are doubly stochastic, so a column of ones propagates to
    ``beta = 1``, the least favourable value. With exact tables such columns
    carry no weight anyway.
    """
    py = table.sum(axis=0)
    seen = py > TOL.probability_clip
    return np.where(seen, table / np.where(seen, py, 1.0), 1.0)


def _factor(first: np.ndarray, last: np.ndarray, steps: Sequence[np.ndarray]) -> float:
    beta = _conditional(first)
    for c in steps:
        beta = c.T @ beta
    mask = last > TOL.probability_clip
    if np.any(beta[mask] <= 0.0):
        return math.inf
    return float(-(last[mask] * np.log2(beta[mask])).sum())


class Chain:
    """Tables and overlap matrices reused across every ordering of one config."""

    def __init__(self, config: MeasurementConfig, probs: TableProvider):
        self.config = config
        bases = config.chain
        self.tables = [_memory_table(probs, config, b) for b in bases]
        self.c = [[overlaps(a, b) for b in bases] for a in bases]

    def beta(self, order: ChainOrder) -> np.ndarray:
        beta = _conditional(self.tables[order[0]])
        for a, b in zip(order[:-1], order[1:]):
            beta = self.c[a][b].T @ beta
        return beta

    def factor(self, order: ChainOrder) -> float:
        _check_order(order, self.config.n)
        steps = [self.c[a][b] for a, b in zip(order[:-1], order[1:])]
        return _factor(self.tables[order[0]], self.tables[order[-1]], steps)


def _check_order(order: ChainOrder, n: int) -> None:
    if sorted(order) != list(range(n + 1)):
        raise ConfigError(f"order {order} is not a permutation of 0..{n}")


def chain_factor(rho: DensityState, order: ChainOrder, config: MeasurementConfig) -> float:
    """Complementary factor ``q`` for one ordering; ``inf`` flags a vacuous bound."""
    return Chain(config, exact_tables(rho)).factor(tuple(order))


def factors_by_order(
    config: MeasurementConfig, probs: TableProvider, cap: int = DEFAULT_ORDER_CAP
) -> dict[ChainOrder, float]:
    """``q`` for every ordering, in lexicographic order of the index sequence."""
    if math.factorial(config.n + 1) > cap:
        raise CapExceeded(f"{config.n + 1}! orderings exceed the cap of {cap}")
    chain = Chain(config, probs)
    return {order: chain.factor(order) for order in itertools.permutations(range(config.n + 1))}


def best_order(q_by_order: Mapping[ChainOrder, float]) -> tuple[float, ChainOrder]:
    q_m = max(q_by_order.values())
    for order in sorted(q_by_order):
        q = q_by_order[order]
        if q == q_m or (math.isfinite(q_m) and q >= q_m - TOL.order_tie):
            return q_m, order
    raise AssertionError("unreachable")


def optimal_factor(
    rho: DensityState, config: MeasurementConfig, cap: int = DEFAULT_ORDER_CAP
) -> tuple[float, ChainOrder]:
    """Largest complementary factor over all orderings and the first ordering attaining it."""
    return best_order(factors_by_order(config, exact_tables(rho), cap))


def referenced_conditional_entropy(
    config: MeasurementConfig, probs: TableProvider, entropy: EntropyFn = shannon_bits
) -> float:
    """Classical ``H(X|Y)`` of the referenced pair."""
    t = _memory_table(probs, config, config.referenced)
    return entropy(t) - entropy(t.sum(axis=0))


def partner_conditional_entropies(
    config: MeasurementConfig, probs: TableProvider, entropy: EntropyFn = shannon_bits
) -> list[float]:
    """Classical ``H(M_i|M_i')`` for every uncertainty measurement."""
    if not config.partners:
        raise MissingPartnerBasis("experimental mode needs partner bases on the memory")
    out = []
    for basis, partner in zip(config.uncertainty, config.partners):
        t = np.asarray(probs({config.target: basis, **partner}), dtype=float).reshape(basis.dim, -1)
        out.append(entropy(t) - entropy(t.sum(axis=0)))
    return out


def quantum_conditional_entropies(rho: DensityState, config: MeasurementConfig) -> list[float]:
    """``S(M_i|B)`` of the post-measurement states."""
    return [
        post_measurement_conditional_entropy(rho, config.target, b, config.memory)
        for b in config.uncertainty
    ]


def uncertainty_lhs(rho: DensityState, config: MeasurementConfig) -> float:
    """``sum_i S(M_i|B) + H(X|Y)``."""
    return sum(quantum_conditional_entropies(rho, config)) + referenced_conditional_entropy(
        config, exact_tables(rho)
    )


def _n_cond(rho: DensityState, config: MeasurementConfig) -> float:
    return config.n * conditional_entropy(rho, config.target, config.memory)


def theorem1_rhs(rho: DensityState, config: MeasurementConfig) -> float:
    """Right-hand side with X measured first in the chain."""
    return _n_cond(rho, config) + chain_factor(rho, config.theorem1_order(), config)


def corollary1_rhs(rho: DensityState, config: MeasurementConfig) -> float:
    """Right-hand side with X measured last in the chain."""
    return _n_cond(rho, config) + chain_factor(rho, config.corollary1_order(), config)


def theorem2_rhs(rho: DensityState, config: MeasurementConfig, cap: int = DEFAULT_ORDER_CAP) -> float:
    """Right-hand side with the best ordering."""
    return _n_cond(rho, config) + optimal_factor(rho, config, cap)[0]


# state-independent baselines

def state_independent_c(b1: ProjectiveBasis, b2: ProjectiveBasis) -> float:
    """``-log2 max_ij |<b1_i|b2_j>|^2``."""
    return float(-np.log2(overlaps(b1, b2).max()))


def _b_value(bases: Sequence[ProjectiveBasis]) -> float:
    c = [overlaps(a, b) for a, b in zip(bases[:-1], bases[1:])]
    v = c[0].max(axis=0)
    for step in c[1:]:
        v = step.T @ v
    return float(v.max())


def state_independent_b(bases: Sequence[ProjectiveBasis]) -> float:
    """``-log2 b`` for the bases in the listed order (two bases reduce to ``c``)."""
    if len(bases) < 2:
        raise ConfigError("the overlap baseline needs at least two bases")
    if len({b.dim for b in bases}) != 1:
        raise DimensionMismatch("bases of different dimensions")
    return float(-np.log2(_b_value(bases)))


def best_state_independent_b(bases: Sequence[ProjectiveBasis]) -> tuple[float, tuple[int, ...]]:
    """Largest ``-log2 b`` over all orderings of ``bases``, with the first ordering attaining it."""
    best, arg = -math.inf, None
    for perm in itertools.permutations(range(len(bases))):
        v = state_independent_b([bases[i] for i in perm])
        if v > best + TOL.order_tie:
            best, arg = v, perm
    return best, arg


def state_independent_rhs(rho: DensityState, config: MeasurementConfig) -> float:
    """``-log2 b + N S(A|B)`` treating all ``N+1`` chain bases as uncertainty measurements."""
    return best_state_independent_b(config.chain)[0] + _n_cond(rho, config)


def state_independent_lhs(rho: DensityState, config: MeasurementConfig) -> float:
    return sum(
        post_measurement_conditional_entropy(rho, config.target, b, config.memory) for b in config.chain
    )


# reports and verification

@dataclass
class BoundReport:
    lhs: float
    rhs_state_dependent: float
    rhs_state_independent: float
    lhs_state_independent: float
    q_per_order: dict[ChainOrder, float]
    q_m: float
    best_order: ChainOrder
    witness_value: float
    vacuous: bool


def bound_report(rho: DensityState, config: MeasurementConfig, cap: int = DEFAULT_ORDER_CAP) -> BoundReport:
    probs = exact_tables(rho)
    q_by = factors_by_order(config, probs, cap)
    q_m, order = best_order(q_by)
    s_m = quantum_conditional_entropies(rho, config)
    h_xy = referenced_conditional_entropy(config, probs)
    n_cond = _n_cond(rho, config)
    return BoundReport(
        lhs=sum(s_m) + h_xy,
        rhs_state_dependent=n_cond + q_m,
        rhs_state_independent=best_state_independent_b(config.chain)[0] + n_cond,
        lhs_state_independent=state_independent_lhs(rho, config),
        q_per_order=q_by,
        q_m=q_m,
        best_order=order,
        witness_value=(q_m - sum(s_m) - h_xy) / config.n,
        vacuous=any(math.isinf(q) for q in q_by.values()),
    )


@dataclass
class Lemma1Residual:
    lhs: float
    relative_entropy: float
    identity_value: float
    inequality_slack: float
    identity_residual: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.relative_entropy) and math.isfinite(self.identity_value)


def _local_state(rho: DensityState, config: MeasurementConfig) -> DensityState:
    parties = [config.target, *config.memory]
    return rho.reduce(parties).permute([rho.labels[rho.index(p)] for p in parties])


def verify_lemma1(
    rho: DensityState, config: MeasurementConfig, order: ChainOrder | None = None
) -> Lemma1Residual:
    """Evaluate the relative-entropy inequality and its closed form on one state.

    Builds ``sigma = sum_{k,y} beta_{k,y} |e_k><e_k| (x) |y><y|`` explicitly,
    with ``e`` the last basis of ``order`` (X first by default), and compares
    ``S(rho||sigma)`` against the uncertainty-relation slack and against
    ``-S(rho) - sum p log2 beta``.
    """
    order = tuple(order) if order is not None else config.theorem1_order()
    local = _local_state(rho, config)
    probs = exact_tables(rho)
    chain = Chain(config, probs)
    _check_order(order, config.n)
    beta = chain.beta(order)
    last = chain.tables[order[-1]]
    e = config.chain[order[-1]]
    y = linalg.kron_all([config.referenced_memory[m].vectors for m in config.memory])
    u = linalg.kron(e.vectors, y)
    sigma = (u * beta.ravel()) @ u.conj().T

    s_rho = von_neumann_entropy(local)
    lhs = uncertainty_lhs(rho, config) - _n_cond(rho, config) - s_rho
    rel = relative_entropy(local, sigma)
    mask = last > TOL.probability_clip
    if np.any(beta[mask] <= 0.0):
        ident = math.inf
    else:
        ident = -s_rho - float((last[mask] * np.log2(beta[mask])).sum())
    if math.isinf(rel) and math.isinf(ident):
        residual = 0.0
    else:
        residual = abs(rel - ident)
    return Lemma1Residual(lhs, rel, ident, lhs - rel, residual)
