"""Builders for the physical settings: lattice pair, Werner families, qubit bases."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .errors import ConfigError, NoCrossing
from .measurements import ProjectiveBasis
from .states import DensityState
from .tolerances import TOL


@dataclass(frozen=True)
class HubbardSpec:
    L: int
    J: float = 1.0
    U: float = -100.0

    def __post_init__(self):
        if self.L < 2:
            raise ConfigError("need at least two lattice sites")
        if not (math.isfinite(self.J) and math.isfinite(self.U)):
            raise ConfigError("J and U must be finite")

    @property
    def fixed_time(self) -> float:
        """Evolution time of the fixed tilted basis, ``0.38 L``."""
        return 0.38 * self.L


@dataclass(frozen=True)
class WernerSpec:
    family: str  # "ghz" or "w"
    p: float

    def __post_init__(self):
        if self.family not in ("ghz", "w"):
            raise ConfigError(f"unknown Werner family {self.family!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"mixing weight {self.p} outside [0, 1]")


def hopping_matrix(L: int, J: float = 1.0) -> np.ndarray:
    """Single-particle open-chain hopping matrix, ``-J`` on the off-diagonals."""
    h = np.zeros((L, L))
    idx = np.arange(L - 1)
    h[idx, idx + 1] = h[idx + 1, idx] = -J
    return h


def hubbard_hamiltonian(spec: HubbardSpec) -> np.ndarray:
    """Two distinguishable particles on ``L`` sites; basis index ``i_A * L + i_B``."""
    L = spec.L
    h1 = hopping_matrix(L, spec.J)
    eye = np.eye(L)
    double = np.diag(np.eye(L).ravel())  # 1 where i_A == i_B
    return (np.kron(h1, eye) + np.kron(eye, h1) + spec.U * double).astype(complex)


@dataclass
class GroundState:
    state: DensityState
    energy: float
    degenerate: bool
    multiplicity: int


def ground_state(h, dims: Sequence[int] | None = None, labels: Sequence[str] = ()) -> GroundState:
    """Projector onto the lowest eigenspace, normalised by its dimension.

    Eigenvalues within ``TOL.degeneracy`` of the minimum count as degenerate.
    """
    w, v = linalg.eigh(h)
    k = int(np.sum(w <= w[0] + TOL.degeneracy))
    vs = v[:, :k]
    m = vs @ vs.conj().T / k
    dims = tuple(dims) if dims is not None else (m.shape[0],)
    return GroundState(DensityState(m, dims, tuple(labels)), float(w[0]), k > 1, k)


def hubbard_ground_state(spec: HubbardSpec) -> GroundState:
    return ground_state(hubbard_hamiltonian(spec), (spec.L, spec.L))


def site_basis(L: int) -> ProjectiveBasis:
    return ProjectiveBasis(np.eye(L), "site")


def tilted_basis(L: int, t: float, name: str | None = None) -> ProjectiveBasis:
    """Site basis evolved by ``exp(i t h)`` with the free (J=1, U=0) hopping matrix."""
    if not math.isfinite(t):
        raise ConfigError("evolution time must be finite")
    r = linalg.expm_hermitian(hopping_matrix(L, 1.0), t)
    return ProjectiveBasis(r, name or f"tilted({t:g})")


_PAULI = {
    "x": np.array([[1, 1], [1, -1]]) / math.sqrt(2),
    "y": np.array([[1, 1], [1j, -1j]]) / math.sqrt(2),
    "z": np.eye(2),
}


def pauli_basis(axis: str) -> ProjectiveBasis:
    """Eigenbasis of a Pauli operator; the +1 eigenvector is outcome 0."""
    try:
        return ProjectiveBasis(_PAULI[axis], axis)
    except KeyError:
        raise ConfigError(f"unknown Pauli axis {axis!r}") from None


def rotated_basis(theta: float, name: str | None = None) -> ProjectiveBasis:
    """Real rotation of the computational basis by ``theta``.

    ``theta = pi/8`` gives the eigenbasis of ``(sigma_z + sigma_x)/sqrt(2)``.
    """
    c, s = math.cos(theta), math.sin(theta)
    return ProjectiveBasis(np.array([[c, -s], [s, c]]), name or f"rot({theta:g})")


def qubit_basis(name: str) -> ProjectiveBasis:
    """``x``, ``y``, ``z`` or ``r`` (the basis halfway between z and x)."""
    if name == "r":
        return rotated_basis(math.pi / 8, "r")
    return pauli_basis(name)


def ghz_ket(n: int = 3) -> np.ndarray:
    psi = np.zeros(2**n)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


def w_ket(n: int = 3) -> np.ndarray:
    psi = np.zeros(2**n)
    psi[[1 << k for k in range(n)]] = 1 / math.sqrt(n)
    return psi


def werner_state(spec: WernerSpec) -> DensityState:
    """``p |psi><psi| + (1 - p) I/8`` for the GHZ or W state."""
    psi = ghz_ket() if spec.family == "ghz" else w_ket()
    m = spec.p * np.outer(psi, psi) + (1 - spec.p) * np.eye(8) / 8
    return DensityState(m, (2, 2, 2))


@dataclass
class Threshold:
    p_star: float
    monotone: bool
    bracket: tuple[float, float]


def threshold_scan(
    bound: Callable[[float], float],
    grid: Sequence[float] | None = None,
    xtol: float = 1e-6,
    values: Sequence[float] | None = None,
) -> Threshold:
    """Locate where ``bound(p)`` turns positive.

    The bound is first tabulated on ``grid`` (step 1e-3 on [0, 1] by default);
    the last sign change from non-positive to positive is refined by root
    bracketing to ``xtol``. ``monotone`` reports whether the tabulated values
    were non-decreasing. Pass ``values`` to reuse an existing tabulation.
    """
    grid = np.linspace(0.0, 1.0, 1001) if grid is None else np.asarray(grid, dtype=float)
    if values is None:
        values = np.array([bound(p) for p in grid])
    values = np.asarray(values, dtype=float)
    pos = values > 0
    if pos.all() or not pos.any():
        raise NoCrossing("bound does not change sign on the scanned range")
    monotone = bool(np.all(np.diff(values) >= -1e-12))
    i = int(np.flatnonzero(~pos)[-1])
    if i + 1 >= len(grid):
        raise NoCrossing("bound is not positive at the end of the range")
    lo, hi = float(grid[i]), float(grid[i + 1])
    if values[i] == 0.0:
        return Threshold(lo, monotone, (lo, hi))
    p_star = brentq(bound, lo, hi, xtol=xtol)
    return Threshold(float(p_star), monotone, (lo, hi))
