"""Finite-shot simulation of the table-only (experimental-mode) witnesses.

Every outcome table the witness formula asks for is sampled independently
with a fixed number of shots; plug-in frequencies then replace the exact
probabilities. Spread is estimated by a parametric bootstrap over all
tables at once, because the maximisation over orderings makes first-order
error propagation unreliable near ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import eur, witness
from .errors import ConfigError, InvalidDistribution, MissingTable
from .measurements import OutcomeDistribution, ProjectiveBasis, joint_distribution
from .states import DensityState, Party, shannon_bits

TableKey = tuple[tuple[str, str], ...]
"""``((party label, basis name), ...)`` in party order."""

WITNESSES = ("bipartite", "tripartite", "mpartite", "gme")


@dataclass(frozen=True, eq=False)
class CountTable:
    axes: tuple[tuple[str, str, int], ...]
    counts: np.ndarray
    shots: int
    seed: int | None

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != tuple(a[2] for a in self.axes):
            raise InvalidDistribution("counts do not match axes")
        if (c < 0).any() or int(c.sum()) != self.shots:
            raise InvalidDistribution(f"counts sum to {int(c.sum())}, expected {self.shots}")

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def sample_counts(dist: OutcomeDistribution, shots: int, seed) -> CountTable:
    """Multinomial draw of ``shots`` outcomes; identical for identical ``seed``."""
    if shots < 1:
        raise ConfigError("shots must be positive")
    p = dist.probabilities.ravel()
    if p.min() < 0 or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution("not a probability distribution")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p / p.sum()).reshape(dist.probabilities.shape)
    return CountTable(dist.axes, counts, int(shots), seed if isinstance(seed, (int, type(None))) else None)


def miller_madow_bits(shots: int):
    """Plug-in entropy plus the ``(K - 1) / (2 n ln 2)`` bias correction, ``K`` = occupied cells."""

    def entropy(p: np.ndarray) -> float:
        k = int(np.count_nonzero(np.asarray(p) > 0))
        return shannon_bits(p) + (k - 1) / (2 * shots * math.log(2)) if k else 0.0

    return entropy


def _key(rho: DensityState, assignment: Mapping[Party, ProjectiveBasis]) -> TableKey:
    pairs = sorted((rho.index(p), b.name) for p, b in assignment.items())
    return tuple((rho.labels[i], name) for i, name in pairs)


class _TableLookup:
    """Table provider backed by measured frequency tables, marginalising as needed."""

    def __init__(self, layout: DensityState, tables: Mapping[TableKey, np.ndarray]):
        self.layout = layout
        self.tables = tables

    def __call__(self, assignment: Mapping[Party, ProjectiveBasis]) -> np.ndarray:
        want = dict(_key(self.layout, assignment))
        for key, table in self.tables.items():
            have = dict(key)
            if all(have.get(p) == b for p, b in want.items()):
                parties = [p for p, _ in key]
                keep = [parties.index(self.layout.labels[self.layout.index(p)]) for p in assignment]
                drop = tuple(i for i in range(len(parties)) if i not in keep)
                m = table.sum(axis=drop) if drop else table
                rem = [i for i in range(len(parties)) if i in keep]
                return np.transpose(m, [rem.index(i) for i in keep])
        raise MissingTable(f"no measured table for {sorted(want.items())}")


def _aggregate(kind: str, layout: DensityState, terms: dict, target: Party) -> float:
    if kind == "bipartite":
        return terms[layout.labels[layout.index(target)]].value
    total = sum(t.value for t in terms.values())
    if kind == "gme":
        return total - 2.0 * math.log2(max(layout.dims))
    return 0.5 * total


def _evaluate(kind, layout, bases, probs, entropy, x_policy, optimize_order, target) -> float:
    if kind not in WITNESSES:
        raise ConfigError(f"unknown witness {kind!r}")
    terms = witness.party_terms(
        layout, bases, experimental=True, x_policy=x_policy, optimize_order=optimize_order,
        probs=probs, entropy=entropy,
    )
    return _aggregate(kind, layout, terms, target)


def required_tables(
    rho: DensityState,
    bases,
    kind: str = "tripartite",
    x_policy=-1,
    optimize_order: bool = True,
    target: Party = 0,
) -> dict[TableKey, OutcomeDistribution]:
    """Exact distributions of every table the witness formula reads, in first-use order."""
    seen: dict[TableKey, OutcomeDistribution] = {}
    exact = eur.exact_tables(rho)

    def recorder(assignment):
        full = {rho.labels[rho.index(p)]: b for p, b in assignment.items()}
        key = _key(rho, full)
        if key not in seen:
            ordered = dict(sorted(full.items(), key=lambda kv: rho.index(kv[0])))
            seen[key] = joint_distribution(rho, ordered)
        return exact(assignment)

    _evaluate(kind, rho, bases, recorder, shannon_bits, x_policy, optimize_order, target)
    return seen


def simulate_tables(
    dists: Mapping[TableKey, OutcomeDistribution], shots: int, seed: int
) -> dict[TableKey, CountTable]:
    """Sample every table with its own child seed, spawned in ``dists`` order."""
    children = np.random.SeedSequence(seed).spawn(len(dists))
    return {
        key: CountTable(
            d.axes,
            np.random.default_rng(child).multinomial(shots, d.probabilities.ravel()).reshape(d.probabilities.shape),
            shots,
            seed,
        )
        for (key, d), child in zip(dists.items(), children)
    }


@dataclass
class ShotEstimate:
    value: float
    stderr: float
    bootstrap: np.ndarray
    shots: int


def estimated_bound(
    tables: Mapping[TableKey, CountTable],
    layout: DensityState,
    bases,
    kind: str = "tripartite",
    x_policy=-1,
    optimize_order: bool = True,
    target: Party = 0,
    resamples: int = 200,
    seed: int = 0,
    miller_madow: bool = False,
) -> ShotEstimate:
    """Plug-in witness estimate from count tables, with bootstrap standard error.

    ``layout`` only supplies party labels and dimensions; its matrix is never
    read.
    """
    if not tables:
        raise MissingTable("no count tables supplied")
    shots = {t.shots for t in tables.values()}
    n = min(shots)
    entropy = miller_madow_bits(n) if miller_madow else shannon_bits
    freqs = {k: t.frequencies for k, t in tables.items()}
    value = _evaluate(kind, layout, bases, _TableLookup(layout, freqs), entropy, x_policy, optimize_order, target)

    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    boot = np.empty(resamples)
    for r in range(resamples):
        resampled = {
            k: rng.multinomial(tables[k].shots, f.ravel()).reshape(f.shape) / tables[k].shots
            for k, f in freqs.items()
        }
        boot[r] = _evaluate(kind, layout, bases, _TableLookup(layout, resampled), entropy, x_policy, optimize_order, target)
    stderr = float(np.std(boot, ddof=1)) if resamples > 1 else math.nan
    return ShotEstimate(float(value), stderr, boot, n)


def layout_of(rho: DensityState) -> DensityState:
    """Maximally mixed state with the same parties, for table-only evaluation."""
    return DensityState(np.eye(rho.dim) / rho.dim, rho.dims, rho.labels)


def simulate_bound(
    rho: DensityState,
    bases,
    shots: int,
    seed: int,
    kind: str = "tripartite",
    x_policy=-1,
    optimize_order: bool = True,
    target: Party = 0,
    resamples: int = 200,
    miller_madow: bool = False,
) -> tuple[ShotEstimate, float]:
    """Sample, estimate, and also return the exact experimental-mode value."""
    dists = required_tables(rho, bases, kind, x_policy, optimize_order, target)
    tables = simulate_tables(dists, shots, seed)
    est = estimated_bound(
        tables, layout_of(rho), bases, kind, x_policy, optimize_order, target, resamples, seed, miller_madow
    )
    exact = _evaluate(kind, rho, bases, eur.exact_tables(rho), shannon_bits, x_policy, optimize_order, target)
    return est, exact
