"""Parameter sweeps producing one row per grid point, for the figure scenarios."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Sequence

import numpy as np

from . import witness
from .errors import ConfigError
from .measurements import overlaps
from .scenarios import HubbardSpec, WernerSpec, hubbard_ground_state, qubit_basis, site_basis, tilted_basis, werner_state
from .states import conditional_entropy, von_neumann_entropy


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of ``stop`` when it lands on the grid) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return np.round(start + step * np.arange(count), 12)
        values = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if values.size == 0:
        raise ConfigError("empty grid")
    return values


def run_grid(fn: Callable[[float], dict], grid: Sequence[float], jobs: int = 1) -> list[dict]:
    """Evaluate ``fn`` on every grid point; rows come back in grid order."""
    if jobs <= 1:
        return [fn(float(p)) for p in grid]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, [float(p) for p in grid], chunksize=max(1, len(grid) // (4 * jobs))))


def _per_party(prefix: str, terms: dict, attr: str) -> dict:
    return {f"{prefix}_{p}": getattr(t, attr) for p, t in terms.items()}


def werner_bound(p: float, family: str, basis_names: Sequence[str], x_policy=-1, optimize_order: bool = True,
                 experimental: bool = True, state_independent: bool = False) -> float:
    """Tripartite witness value for one Werner mixing weight."""
    rho = werner_state(WernerSpec(family, p))
    bases = [qubit_basis(n) for n in basis_names]
    return witness.tripartite_ef3_bound(
        rho, bases, experimental, x_policy, optimize_order, state_independent
    ).bound_value


def werner_row(p: float, family: str, basis_names: Sequence[str], x_policy, optimize_order: bool) -> dict:
    rho = werner_state(WernerSpec(family, p))
    bases = [qubit_basis(n) for n in basis_names]
    kw = dict(x_policy=x_policy, optimize_order=optimize_order)
    exp_terms = witness.party_terms(rho, bases, True, **kw)
    exact_terms = witness.party_terms(rho, bases, False, **kw)
    row = {
        "parameter": p,
        "bound_state_dependent": 0.5 * sum(t.value for t in exp_terms.values()),
        "bound_state_independent": 0.5 * sum(t.value for t in witness.party_terms(rho, bases, True, state_independent=True, **kw).values()),
        "bound_state_dependent_exact": 0.5 * sum(t.value for t in exact_terms.values()),
        "bound_state_independent_exact": 0.5 * sum(t.value for t in witness.party_terms(rho, bases, False, state_independent=True, **kw).values()),
        "coherent_information_bound": 0.5 * sum(witness.true_coherent_informations(rho).values()),
    }
    row.update(_per_party("q_m", exp_terms, "q_m"))
    row.update(_per_party("best_order", exp_terms, "order_label"))
    row.update(_per_party("lhs", exp_terms, "lhs"))
    return row


def werner_sweep(
    family: str, basis_names: Sequence[str], grid: Sequence[float], x_policy=-1, optimize_order: bool = True, jobs: int = 1
) -> list[dict]:
    fn = partial(werner_row, family=family, basis_names=list(basis_names), x_policy=x_policy, optimize_order=optimize_order)
    return run_grid(fn, grid, jobs)


HUBBARD_BASES = ("site", "tilted", "tilted-fixed")


def hubbard_bases(spec: HubbardSpec, names: Sequence[str], t: float):
    out = []
    for name in names:
        if name == "site":
            out.append(site_basis(spec.L))
        elif name == "tilted":
            out.append(tilted_basis(spec.L, t, "tilted"))
        elif name == "tilted-fixed":
            out.append(tilted_basis(spec.L, spec.fixed_time, "tilted-fixed"))
        elif name.startswith("tilted:"):
            out.append(tilted_basis(spec.L, float(name.split(":", 1)[1]), name))
        else:
            raise ConfigError(f"unknown lattice basis {name!r}; use site, tilted, tilted-fixed or tilted:<t>")
    return out


def is_mub_set(bases, tol: float = 1e-6) -> bool:
    """True when every pair of bases is mutually unbiased."""
    d = bases[0].dim
    return all(
        np.max(np.abs(overlaps(a, b) - 1.0 / d)) <= tol
        for i, a in enumerate(bases)
        for b in bases[i + 1:]
    )


def hubbard_row(s: float, spec: HubbardSpec, basis_names: Sequence[str], time_unit: float, x_policy, optimize_order: bool) -> dict:
    """One sweep point; the swept basis evolves for ``t = s * time_unit``."""
    gs = hubbard_ground_state(spec)
    rho = gs.state
    t = s * time_unit
    bases = hubbard_bases(spec, basis_names, t)
    kw = dict(x_policy=x_policy, optimize_order=optimize_order)
    sd = witness.bipartite_bound(rho, bases, 0, True, **kw)
    row = {
        "parameter": s,
        "time": t,
        "bound_state_dependent": sd.bound_value,
        "bound_state_independent": witness.bipartite_bound(rho, bases, 0, True, state_independent=True, **kw).bound_value,
        "bound_state_dependent_exact": witness.bipartite_bound(rho, bases, 0, False, **kw).bound_value,
        "bound_state_independent_exact": witness.bipartite_bound(rho, bases, 0, False, state_independent=True, **kw).bound_value,
    }
    if len(bases) > 2:
        two = bases[:2]
        row["bound_two_state_dependent"] = witness.bipartite_bound(rho, two, 0, True, **kw).bound_value
        row["bound_two_state_dependent_exact"] = witness.bipartite_bound(rho, two, 0, False, **kw).bound_value
    row.update(
        q_m=sd.summary["q_m"]["A"],
        best_order=sd.summary["orders"]["A"],
        mub=int(is_mub_set(bases)),
        coherent_information=-conditional_entropy(rho, 0, [1]),
        entropy_a=von_neumann_entropy(rho.reduce([0])),
        degenerate=int(gs.degenerate),
    )
    return row


def hubbard_sweep(
    spec: HubbardSpec,
    basis_names: Sequence[str],
    grid: Sequence[float],
    time_unit: float | None = None,
    x_policy=-1,
    optimize_order: bool = True,
    jobs: int = 1,
) -> list[dict]:
    unit = spec.fixed_time if time_unit is None else time_unit
    fn = partial(hubbard_row, spec=spec, basis_names=list(basis_names), time_unit=unit, x_policy=x_policy, optimize_order=optimize_order)
    return run_grid(fn, grid, jobs)
