"""Entanglement lower bounds built on the uncertainty relations.

Three evaluation modes share one formula,
``-S(A|B) >= (q_m - sum_i T_i - H(X|Y)) / N``:

* ``experimental=False`` ("exact mode") uses ``T_i = S(M_i|B)`` and needs
  the full state;
* ``experimental=True`` uses ``T_i = H(M_i|M_i')``, which only needs outcome
  tables and is never larger than the exact-mode bound;
* the ``true_*`` helpers return the coherent-information quantities
  themselves, used as upper references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from . import eur
from .errors import ConfigError, PartyError
from .eur import EntropyFn, MeasurementConfig, TableProvider
from .measurements import ProjectiveBasis, post_measurement_conditional_entropy
from .states import DensityState, Party, conditional_entropy, shannon_bits, von_neumann_entropy

BasisSpec = Union[Sequence[ProjectiveBasis], Mapping[Party, Sequence[ProjectiveBasis]]]
XPolicy = Union[int, str]  # basis index, or "maximize"


@dataclass
class WitnessResult:
    bound_value: float
    per_party_terms: dict[str, float]
    summary: dict = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        # zero is reachable by separable states, so only a strictly positive bound counts
        return self.bound_value > 0.0


@dataclass
class PartyTerm:
    """One coherent-information bound together with what produced it."""

    value: float
    q_m: float
    best_order: tuple[int, ...]
    order_label: str
    x_index: int
    lhs: float


def _bases_for(rho: DensityState, bases: BasisSpec, party: Party) -> list[ProjectiveBasis]:
    if isinstance(bases, Mapping):
        for key, val in bases.items():
            if rho.index(key) == rho.index(party):
                return list(val)
        raise PartyError(f"no bases given for party {party!r}")
    return list(bases)


def mirrored_config(
    rho: DensityState, bases: BasisSpec, target: Party, memory: Sequence[Party], x_index: int = -1
) -> MeasurementConfig:
    """Config where every party uses the basis with the same list position.

    Basis ``x_index`` is the referenced measurement (on the target and on each
    memory party); the rest, in listed order, are the uncertainty
    measurements and their memory-side partners.
    """
    own = _bases_for(rho, bases, target)
    if len(own) < 2:
        raise ConfigError("need at least two bases per party (one referenced, one uncertainty)")
    k = len(own)
    xi = x_index % k
    rest = [i for i in range(k) if i != xi]
    mem_bases = {}
    for m in memory:
        mb = _bases_for(rho, bases, m)
        if len(mb) != k:
            raise ConfigError("every party needs the same number of bases")
        mem_bases[m] = mb
    return MeasurementConfig(
        target=target,
        referenced=own[xi],
        referenced_memory={m: mb[xi] for m, mb in mem_bases.items()},
        uncertainty=tuple(own[i] for i in rest),
        partners=tuple({m: mb[i] for m, mb in mem_bases.items()} for i in rest),
    )


def coherent_bound_from_tables(
    config: MeasurementConfig,
    probs: TableProvider,
    entropies: Sequence[float] | None = None,
    optimize_order: bool = True,
    entropy: EntropyFn = shannon_bits,
) -> PartyTerm:
    """Coherent-information lower bound from outcome tables.

    ``entropies`` overrides the ``T_i`` terms (exact mode passes ``S(M_i|B)``);
    by default the partner tables supply ``H(M_i|M_i')``. With
    ``optimize_order=False`` the X-first ordering is used.
    """
    if optimize_order:
        q_m, order = eur.best_order(eur.factors_by_order(config, probs))
    else:
        order = config.theorem1_order()
        q_m = eur.Chain(config, probs).factor(order)
    t = list(entropies) if entropies is not None else eur.partner_conditional_entropies(config, probs, entropy)
    h_xy = eur.referenced_conditional_entropy(config, probs, entropy)
    lhs = sum(t) + h_xy
    return PartyTerm((q_m - lhs) / config.n, q_m, order, config.describe(order), -1, lhs)


def baseline_bound_from_tables(
    config: MeasurementConfig,
    probs: TableProvider,
    entropies: Sequence[float] | None = None,
    entropy: EntropyFn = shannon_bits,
) -> float:
    """Overlap-only counterpart: ``(-log2 b - sum over all N+1 bases of T) / N``.

    In experimental mode the referenced basis enters with ``H(X|Y)`` like any
    other measurement, so for mutually unbiased bases both bounds coincide.
    """
    if entropies is None:
        entropies = [eur.referenced_conditional_entropy(config, probs, entropy)]
        entropies += eur.partner_conditional_entropies(config, probs, entropy)
    return (eur.best_state_independent_b(config.chain)[0] - sum(entropies)) / config.n


def _exact_entropies(rho: DensityState, config: MeasurementConfig, include_x: bool) -> list[float]:
    bases = config.chain if include_x else config.uncertainty
    return [post_measurement_conditional_entropy(rho, config.target, b, config.memory) for b in bases]


def coherent_info_bound(
    rho: DensityState,
    config: MeasurementConfig,
    experimental: bool = False,
    optimize_order: bool = True,
) -> float:
    """Lower bound on ``-S(target|memory)``."""
    return coherent_term(rho, config, experimental, optimize_order).value


def coherent_term(
    rho: DensityState, config: MeasurementConfig, experimental: bool = False, optimize_order: bool = True
) -> PartyTerm:
    probs = eur.exact_tables(rho)
    ent = None if experimental else _exact_entropies(rho, config, include_x=False)
    return coherent_bound_from_tables(config, probs, ent, optimize_order)


def baseline_info_bound(rho: DensityState, config: MeasurementConfig, experimental: bool = False) -> float:
    """State-independent lower bound on ``-S(target|memory)``."""
    probs = eur.exact_tables(rho)
    ent = None if experimental else _exact_entropies(rho, config, include_x=True)
    return baseline_bound_from_tables(config, probs, ent)


def _party_term(
    rho: DensityState,
    bases: BasisSpec,
    target: Party,
    memory: Sequence[Party],
    experimental: bool,
    x_policy: XPolicy,
    optimize_order: bool,
    state_independent: bool,
    probs: TableProvider | None = None,
    entropy: EntropyFn = shannon_bits,
) -> PartyTerm:
    k = len(_bases_for(rho, bases, target))
    candidates = range(k) if x_policy == "maximize" else [int(x_policy) % k]
    best = None
    for xi in candidates:
        config = mirrored_config(rho, bases, target, memory, xi)
        if probs is not None:
            if not experimental:
                raise ConfigError("table-only evaluation is experimental mode")
            if state_independent:
                v = baseline_bound_from_tables(config, probs, None, entropy)
                term = PartyTerm(v, math.nan, (), "", xi, math.nan)
            else:
                term = coherent_bound_from_tables(config, probs, None, optimize_order, entropy)
        elif state_independent:
            term = PartyTerm(baseline_info_bound(rho, config, experimental), math.nan, (), "", xi, math.nan)
        else:
            term = coherent_term(rho, config, experimental, optimize_order)
        term.x_index = xi
        if best is None or term.value > best.value:
            best = term
    return best


def party_terms(
    rho: DensityState,
    bases: BasisSpec,
    experimental: bool = False,
    x_policy: XPolicy = -1,
    optimize_order: bool = True,
    state_independent: bool = False,
    probs: TableProvider | None = None,
    entropy: EntropyFn = shannon_bits,
) -> dict[str, PartyTerm]:
    """Bound on ``-S(A_k | all other parties)`` for every party ``A_k``."""
    out = {}
    for k, label in enumerate(rho.labels):
        memory = [m for m in rho.labels if m != label]
        out[label] = _party_term(
            rho, bases, label, memory, experimental, x_policy, optimize_order, state_independent, probs, entropy
        )
    return out


def _result(terms: dict[str, PartyTerm], value: float, **summary) -> WitnessResult:
    summary.setdefault("orders", {p: t.order_label for p, t in terms.items()})
    summary.setdefault("q_m", {p: t.q_m for p, t in terms.items()})
    summary.setdefault("x_index", {p: t.x_index for p, t in terms.items()})
    return WitnessResult(value, {p: t.value for p, t in terms.items()}, summary)


def bipartite_bound(
    rho: DensityState,
    bases: BasisSpec,
    target: Party = 0,
    experimental: bool = False,
    x_policy: XPolicy = -1,
    optimize_order: bool = True,
    state_independent: bool = False,
) -> WitnessResult:
    """Coherent-information bound for one target against all remaining parties."""
    label = rho.labels[rho.index(target)]
    memory = [m for m in rho.labels if m != label]
    term = _party_term(rho, bases, label, memory, experimental, x_policy, optimize_order, state_independent)
    return _result({label: term}, term.value, mode="experimental" if experimental else "exact")


def tripartite_ef3_bound(
    rho: DensityState,
    bases: BasisSpec,
    experimental: bool = False,
    x_policy: XPolicy = -1,
    optimize_order: bool = True,
    state_independent: bool = False,
    probs: TableProvider | None = None,
    entropy: EntropyFn = shannon_bits,
) -> WitnessResult:
    """Lower bound on the tripartite entanglement of formation.

    Half the sum of the three coherent-information bounds, each party taking
    the other two as memory.
    """
    if rho.n_parties != 3:
        raise PartyError("tripartite bound needs exactly three parties")
    terms = party_terms(rho, bases, experimental, x_policy, optimize_order, state_independent, probs, entropy)
    return _result(terms, 0.5 * sum(t.value for t in terms.values()))


def true_coherent_informations(rho: DensityState) -> dict[str, float]:
    """``-S(A_k | rest)`` for every party."""
    return {
        label: -conditional_entropy(rho, label, [m for m in rho.labels if m != label])
        for label in rho.labels
    }


def mpartite_bound(
    rho: DensityState,
    bases: BasisSpec | None = None,
    experimental: bool = False,
    x_policy: XPolicy = -1,
    optimize_order: bool = True,
) -> WitnessResult:
    """``(1/2) sum_k -S(A_k | rest)``; with ``bases`` each term is replaced by its measured bound."""
    if rho.n_parties < 2:
        raise PartyError("need at least two parties")
    if bases is None:
        per = true_coherent_informations(rho)
        return WitnessResult(0.5 * sum(per.values()), per, {"mode": "true"})
    terms = party_terms(rho, bases, experimental, x_policy, optimize_order)
    return _result(terms, 0.5 * sum(t.value for t in terms.values()))


def gme_bound(
    rho: DensityState,
    bases: BasisSpec | None = None,
    experimental: bool = False,
    x_policy: XPolicy = -1,
    optimize_order: bool = True,
) -> WitnessResult:
    """``-S(A|BC) - S(B|AC) - S(C|AB) - 2 log2 d_max`` or its measured variant."""
    if rho.n_parties != 3:
        raise PartyError("the genuine multipartite bound is for three parties")
    penalty = 2.0 * math.log2(max(rho.dims))
    if bases is None:
        per = true_coherent_informations(rho)
        return WitnessResult(sum(per.values()) - penalty, per, {"mode": "true"})
    terms = party_terms(rho, bases, experimental, x_policy, optimize_order)
    return _result(terms, sum(t.value for t in terms.values()) - penalty)


def pure_state_ef3(rho: DensityState) -> float:
    """``(S_A + S_B + S_C) / 2``, the exact value for a pure state."""
    return 0.5 * sum(von_neumann_entropy(rho.reduce([p])) for p in rho.labels)
