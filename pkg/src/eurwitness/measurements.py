"""Rank-1 projective measurements: bases, overlaps, dephasing, outcome statistics.

Outcome ``k`` of a basis is always its column ``k``; distributions and
overlap matrices inherit that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import AxisError, DimensionMismatch, PartyError
from .states import DensityState, Party, shannon_bits, von_neumann_entropy
from .tolerances import TOL


@dataclass(frozen=True, eq=False)
class ProjectiveBasis:
    """Orthonormal measurement basis; the columns of ``vectors`` are the outcomes."""

    vectors: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = linalg.as_matrix(self.vectors)
        linalg.check_square(v)
        err = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0])))
        if err > TOL.unitarity:
            raise DimensionMismatch(f"basis {self.name!r} is not orthonormal (error {err:.2e})")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def projector(self, k: int) -> np.ndarray:
        u = self.vectors[:, k]
        return np.outer(u, u.conj())

    @classmethod
    def computational(cls, dim: int, name: str = "computational") -> "ProjectiveBasis":
        return cls(np.eye(dim), name)


def random_basis(dim: int, rng: np.random.Generator, name: str = "random") -> ProjectiveBasis:
    """Haar-random basis from the QR decomposition of a Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return ProjectiveBasis(q * (d / np.abs(d)), name)


def overlaps(b1: ProjectiveBasis, b2: ProjectiveBasis) -> np.ndarray:
    """Doubly stochastic matrix ``c[i, j] = |<b1_i|b2_j>|^2``."""
    if b1.dim != b2.dim:
        raise DimensionMismatch(f"bases of dimension {b1.dim} and {b2.dim}")
    return np.abs(b1.vectors.conj().T @ b2.vectors) ** 2


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Joint outcome probabilities; axis ``k`` belongs to ``axes[k] = (party, basis, count)``."""

    axes: tuple[tuple[str, str, int], ...]
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != tuple(a[2] for a in self.axes):
            raise AxisError(f"table shape {p.shape} does not match axes {self.axes}")
        if p.min(initial=0.0) < -TOL.probability_clip:
            raise AxisError("negative probability in table")
        p = np.where(p < TOL.probability_clip, 0.0, p)
        if abs(p.sum() - 1.0) > TOL.distribution_sum:
            raise AxisError(f"probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "axes", tuple(tuple(a) for a in self.axes))

    @property
    def parties(self) -> list[str]:
        return [a[0] for a in self.axes]

    def axis(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            if 0 <= key < len(self.axes):
                return int(key)
        elif key in self.parties:
            return self.parties.index(key)
        raise AxisError(f"no axis {key!r} in {self.axes}")

    def marginal(self, keep: Iterable) -> np.ndarray:
        """Probabilities summed over every axis not in ``keep``, axes in ``keep`` order."""
        idx = [self.axis(k) for k in keep]
        drop = tuple(i for i in range(len(self.axes)) if i not in idx)
        m = self.probabilities.sum(axis=drop)
        remaining = [i for i in range(len(self.axes)) if i in idx]
        return np.transpose(m, [remaining.index(i) for i in idx])


def _check_assignments(rho: DensityState, assignments: Mapping[Party, ProjectiveBasis]) -> dict[int, ProjectiveBasis]:
    out = {}
    for party, basis in assignments.items():
        i = rho.index(party)
        if i in out:
            raise PartyError(f"party {party!r} assigned twice")
        if basis.dim != rho.dims[i]:
            raise DimensionMismatch(
                f"basis {basis.name!r} has dimension {basis.dim}, party {party!r} has {rho.dims[i]}"
            )
        out[i] = basis
    return out


def dephase(rho: DensityState, assignments: Mapping[Party, ProjectiveBasis]) -> DensityState:
    """Apply ``sum_k Pi_k rho Pi_k`` on every assigned party; others are untouched."""
    assigned = _check_assignments(rho, assignments)
    n = rho.n_parties
    u = linalg.kron_all(
        [assigned[i].vectors if i in assigned else np.eye(rho.dims[i]) for i in range(n)]
    )
    rot = (u.conj().T @ rho.matrix @ u).reshape(rho.dims * 2)
    grids = np.indices(rot.shape, sparse=True)
    keep = np.ones(rot.shape, dtype=bool)
    for i in assigned:
        keep = keep & (grids[i] == grids[n + i])
    rot = np.where(keep, rot, 0).reshape(rho.dim, rho.dim)
    return DensityState(u @ rot @ u.conj().T, rho.dims, rho.labels)


def joint_distribution(rho: DensityState, assignments: Mapping[Party, ProjectiveBasis]) -> OutcomeDistribution:
    """Outcome table for measuring each assigned party in its basis.

    Axes follow the iteration order of ``assignments``. Parties that are not
    assigned are traced out.
    """
    assigned = _check_assignments(rho, assignments)
    if not assigned:
        raise PartyError("no party assigned a basis")
    order = list(assigned)
    ascending = sorted(order)
    red = rho.reduce(ascending)
    u = linalg.kron_all([assigned[i].vectors for i in ascending])
    p = np.real(np.einsum("ij,ik,kj->j", u.conj(), red.matrix, u))
    p = p.reshape([rho.dims[i] for i in ascending])
    p = np.transpose(p, [ascending.index(i) for i in order])
    p = np.clip(p, 0.0, None)
    axes = tuple((rho.labels[i], assigned[i].name, rho.dims[i]) for i in order)
    return OutcomeDistribution(axes, p)


def classical_conditional_entropy(dist: OutcomeDistribution, target: Iterable, conditioning: Iterable = ()) -> float:
    """``H(target | conditioning)`` in bits; other axes are marginalised away."""
    t = [dist.axis(k) for k in target]
    c = [dist.axis(k) for k in conditioning]
    if not t or set(t) & set(c) or len(set(t)) != len(t) or len(set(c)) != len(c):
        raise AxisError("target and conditioning axes must be disjoint and nonempty target")
    joint = shannon_bits(dist.marginal(t + c))
    return joint - (shannon_bits(dist.marginal(c)) if c else 0.0)


def post_measurement_conditional_entropy(
    rho: DensityState, party: Party, basis: ProjectiveBasis, memory: Iterable[Party]
) -> float:
    """``S(M|memory)`` of the state after measuring ``party`` in ``basis``."""
    t = rho.index(party)
    mem = rho.indices(memory)
    if t in mem:
        raise PartyError("measured party cannot be part of the memory")
    red = rho.reduce([t] + mem)
    measured = dephase(red, {rho.labels[t]: basis})
    marg = von_neumann_entropy(red.reduce([rho.labels[i] for i in mem])) if mem else 0.0
    return von_neumann_entropy(measured) - marg
