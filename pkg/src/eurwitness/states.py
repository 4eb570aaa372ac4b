"""Density matrices with party structure, and entropy functionals in bits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidState, PartyError
from .tolerances import TOL

Party = Union[int, str]


@dataclass(frozen=True, eq=False)
class DensityState:
    """A validated density matrix over an ordered list of parties.

    ``labels`` default to ``A, B, C, ...``. Parties can be addressed either
    by position or by label everywhere in the package.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != m.shape[0] or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"dims {dims} do not match matrix shape {m.shape}")
        if not linalg.is_hermitian(m):
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL.trace:
            raise InvalidState(f"trace {tr!r} differs from 1")
        if np.linalg.eigvalsh(m).min() < -TOL.negative_eigenvalue:
            raise InvalidState("density matrix has a negative eigenvalue")
        labels = tuple(self.labels) or tuple(_default_labels(len(dims)))
        if len(labels) != len(dims) or len(set(labels)) != len(labels):
            raise PartyError(f"labels {labels} do not fit {len(dims)} parties")
        m = linalg.hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int], labels: Sequence[str] = ()) -> "DensityState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims), tuple(labels))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def index(self, party: Party) -> int:
        if isinstance(party, (int, np.integer)):
            if 0 <= party < self.n_parties:
                return int(party)
            raise PartyError(f"party index {party} out of range")
        try:
            return self.labels.index(party)
        except ValueError:
            raise PartyError(f"unknown party {party!r}; have {self.labels}") from None

    def indices(self, parties: Iterable[Party]) -> list[int]:
        idx = [self.index(p) for p in parties]
        if len(set(idx)) != len(idx):
            raise PartyError(f"repeated party in {list(parties)}")
        return idx

    def reduce(self, keep: Iterable[Party]) -> "DensityState":
        """Marginal on ``keep``; parties keep their original relative order."""
        idx = sorted(self.indices(keep))
        m = linalg.partial_trace(self.matrix, self.dims, idx)
        return DensityState(m, tuple(self.dims[i] for i in idx), tuple(self.labels[i] for i in idx))

    def permute(self, order: Sequence[Party]) -> "DensityState":
        idx = self.indices(order)
        if sorted(idx) != list(range(self.n_parties)):
            raise PartyError(f"{order} is not a permutation of all parties")
        m = linalg.permute_subsystems(self.matrix, self.dims, idx)
        return DensityState(m, tuple(self.dims[i] for i in idx), tuple(self.labels[i] for i in idx))


def _default_labels(n: int) -> list[str]:
    return [chr(ord("A") + i) if i < 26 else f"P{i}" for i in range(n)]


def _spectrum(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityState) else linalg.as_matrix(rho)
    w = linalg.eigvalsh(m)
    if w.min(initial=0.0) < -TOL.negative_eigenvalue:
        raise InvalidState(f"eigenvalue {w.min():.3e} is below the clipping tolerance")
    if abs(w.sum() - 1.0) > TOL.reconstruction:
        raise InvalidState(f"trace {w.sum()!r} differs from 1")
    return np.clip(w, 0.0, None)


def shannon_bits(p) -> float:
    """Shannon entropy of a probability array, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > TOL.probability_clip]
    return float(-(p * np.log2(p)).sum())


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho`` for a ``DensityState`` or a bare density matrix."""
    return shannon_bits(_spectrum(rho))


def conditional_entropy(rho: DensityState, target: Party, memory: Iterable[Party]) -> float:
    """``S(target | memory) = S(target, memory) - S(memory)``.

    Parties outside ``target`` and ``memory`` are traced out first.
    """
    t = rho.index(target)
    mem = rho.indices(memory)
    if t in mem:
        raise PartyError("target party cannot also be memory")
    joint = von_neumann_entropy(rho.reduce([t] + mem))
    marg = von_neumann_entropy(rho.reduce(mem)) if mem else 0.0
    return joint - marg


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log2 rho - log2 sigma)``; ``inf`` when supp(rho) is not in supp(sigma).

    ``sigma`` only needs to be positive semidefinite, not normalized.
    """
    r = rho.matrix if isinstance(rho, DensityState) else linalg.as_matrix(rho)
    s = sigma.matrix if isinstance(sigma, DensityState) else linalg.as_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes {r.shape} and {s.shape} differ")
    ws, vs = linalg.eigh(s)
    if ws.min(initial=0.0) < -TOL.negative_eigenvalue:
        raise InvalidState("sigma is not positive semidefinite")
    # weight of rho along each eigenvector of sigma
    weights = np.real(np.einsum("ik,ij,jk->k", vs.conj(), r, vs))
    null = ws <= TOL.support
    if np.any(weights[null] > TOL.support):
        return float("inf")
    cross = float(np.sum(weights[~null] * np.log2(ws[~null])))
    return -von_neumann_entropy(r) - cross


# random ensembles used by the property suites

def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityState:
    """Ginibre-distributed density matrix of the given rank (full rank by default)."""
    d = int(np.prod(dims))
    k = rank or d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityState(m / np.trace(m).real, tuple(dims))


def random_pure(dims: Sequence[int], rng: np.random.Generator) -> DensityState:
    return DensityState.from_ket(random_ket(int(np.prod(dims)), rng), dims)


def random_separable(dims: Sequence[int], rng: np.random.Generator, terms: int = 8) -> DensityState:
    """Random convex mixture of ``terms`` fully product pure states."""
    weights = rng.dirichlet(np.ones(terms))
    m = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for w in weights:
        psi = linalg.kron_all([random_ket(d, rng)[:, None] for d in dims]).ravel()
        m += w * np.outer(psi, psi.conj())
    return DensityState(m, tuple(dims))
