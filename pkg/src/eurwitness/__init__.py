"""State-dependent entropic uncertainty bounds and entanglement witnesses.

Typical use::

    >>> from eurwitness import scenarios, witness
    >>> rho = scenarios.werner_state(scenarios.WernerSpec("ghz", 0.9))
    >>> bases = [scenarios.pauli_basis("x"), scenarios.pauli_basis("z")]
    >>> witness.tripartite_ef3_bound(rho, bases, experimental=True).bound_value
"""

__version__ = "0.1.0"

from .errors import EurError  # noqa: F401
