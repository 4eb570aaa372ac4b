import numpy as np
import pytest

from eurwitness import shots
from eurwitness.errors import ConfigError, InvalidDistribution, MissingTable
from eurwitness.measurements import OutcomeDistribution
from eurwitness.scenarios import WernerSpec, qubit_basis, werner_state
from eurwitness.states import DensityState

XZ = [qubit_basis("x"), qubit_basis("z")]
AXES4 = (("A", "z", 2), ("B", "z", 2))


def test_point_mass():
    d = OutcomeDistribution(AXES4, np.array([[0.0, 1.0], [0.0, 0.0]]))
    t = shots.sample_counts(d, 1000, 3)
    assert t.counts[0, 1] == 1000 and t.counts.sum() == 1000


def test_uniform_counts_within_five_sigma():
    d = OutcomeDistribution(AXES4, np.full((2, 2), 0.25))
    n = 10**6
    t = shots.sample_counts(d, n, 11)
    sigma = np.sqrt(n * 0.25 * 0.75)
    assert np.all(np.abs(t.counts - n / 4) <= 5 * sigma)


def test_sampling_is_deterministic():
    d = OutcomeDistribution(AXES4, np.array([[0.1, 0.2], [0.3, 0.4]]))
    a, b = shots.sample_counts(d, 500, 42), shots.sample_counts(d, 500, 42)
    np.testing.assert_array_equal(a.counts, b.counts)


def test_sampling_errors():
    d = OutcomeDistribution(AXES4, np.full((2, 2), 0.25))
    with pytest.raises(ConfigError):
        shots.sample_counts(d, 0, 1)
    with pytest.raises(InvalidDistribution):
        shots.CountTable(AXES4, np.array([[1, 2], [3, 4]]), 11, None)


def test_zero_entropy_tables_exact_at_any_shot_count():
    bell = DensityState.from_ket([1, 0, 0, 1], (2, 2))
    for n in (50, 1000, 10**5):
        est, exact = shots.simulate_bound(bell, XZ, n, 5, kind="bipartite", resamples=20)
        assert est.value == pytest.approx(exact, abs=1e-12) == pytest.approx(1.0)
        assert est.stderr == pytest.approx(0.0, abs=1e-12)


def test_required_tables_cover_the_formula():
    rho = werner_state(WernerSpec("ghz", 0.9))
    dists = shots.required_tables(rho, XZ)
    keys = set(dists)
    assert (("A", "z"), ("B", "z"), ("C", "z")) in keys
    assert (("A", "x"), ("B", "x"), ("C", "x")) in keys
    assert (("A", "x"), ("B", "z"), ("C", "z")) in keys
    # every table needed by the estimator is present
    tables = shots.simulate_tables(dists, 1000, 1)
    shots.estimated_bound(tables, shots.layout_of(rho), XZ, resamples=2)


def test_missing_table():
    rho = werner_state(WernerSpec("ghz", 0.9))
    dists = shots.required_tables(rho, XZ)
    tables = shots.simulate_tables(dists, 1000, 1)
    tables.pop((("A", "x"), ("B", "x"), ("C", "x")))
    with pytest.raises(MissingTable):
        shots.estimated_bound(tables, shots.layout_of(rho), XZ, resamples=2)
    with pytest.raises(MissingTable):
        shots.estimated_bound({}, shots.layout_of(rho), XZ)


def test_full_determinism():
    rho = werner_state(WernerSpec("w", 0.9))
    a, _ = shots.simulate_bound(rho, XZ, 5000, 9, resamples=30)
    b, _ = shots.simulate_bound(rho, XZ, 5000, 9, resamples=30)
    assert a.value == b.value and a.stderr == b.stderr
    np.testing.assert_array_equal(a.bootstrap, b.bootstrap)


def test_miller_madow_raises_the_entropies():
    rho = werner_state(WernerSpec("ghz", 0.9))
    plain, _ = shots.simulate_bound(rho, XZ, 2000, 4, resamples=2)
    corrected, _ = shots.simulate_bound(rho, XZ, 2000, 4, resamples=2, miller_madow=True)
    assert corrected.value != plain.value


def test_stderr_scaling():
    rho = werner_state(WernerSpec("ghz", 0.9))
    ns = np.array([10**3, 10**4, 10**5])
    errs = [shots.simulate_bound(rho, XZ, int(n), 17, resamples=200)[0].stderr for n in ns]
    slope = np.polyfit(np.log10(ns), np.log10(errs), 1)[0]
    assert abs(slope + 0.5) <= 0.15


def test_error_shrinks_with_shots():
    rho = werner_state(WernerSpec("ghz", 0.9))
    med = []
    for n in (10**3, 10**4, 10**5):
        errs = [abs(est.value - exact) for est, exact in (shots.simulate_bound(rho, XZ, n, s, resamples=2) for s in range(9))]
        med.append(np.median(errs))
    assert med[0] > med[1] > med[2]
