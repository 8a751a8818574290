import math

import numpy as np
import pytest

from nonclassical import measures as ms
from nonclassical.errors import ValidationError
from nonclassical.search import Box, SearchConfig, search_over_family
from nonclassical.states import BathParams, coherent_state, fock_state, from_amplitudes, thermal_state


# -- search driver --------------------------------------------------------------


def test_quadratic_calibration():
    target = np.array([0.3137, -1.2718])
    res = search_over_family(lambda x: float(np.sum((x - target) ** 2)), Box(((-2, 2), (-2, 2))), SearchConfig())
    assert res.converged
    assert np.max(np.abs(res.x - target)) < 1e-5
    assert res.evaluations == len(res.history)


def test_search_is_deterministic():
    f = lambda x: math.cos(3 * x[0]) + 0.1 * x[0] ** 2
    a = search_over_family(f, Box(((-3, 3),)))
    b = search_over_family(f, Box(((-3, 3),)))
    assert a.value == b.value and a.evaluations == b.evaluations


def test_budget():
    empty = search_over_family(lambda x: x[0] ** 2, Box(((-1, 1),)), SearchConfig(max_evals=0))
    assert not empty.converged and empty.argopt is None
    small = search_over_family(lambda x: x[0] ** 2, Box(((-1, 1),)), SearchConfig(max_evals=20))
    assert not small.converged
    assert small.evaluations == 20
    assert small.value == min(h[1] for h in small.history)


def test_dodonov_argmax_matches_dense_scan():
    rho = fock_state(1, 2)
    fam = ms.CoherentFamily(4.0)
    rep = ms.dodonov_eta(rho, [fam])
    grid = np.arange(0.0, 4.0 + 1e-12, 1e-3)
    dim = fam.working_dim()
    target = rho.padded(dim)
    vals = [ms.normalized_overlap(target, coherent_state(a, dim)) for a in grid]
    assert abs(rep.argopt.alpha) == pytest.approx(grid[int(np.argmax(vals))], abs=1e-3)


# -- pairwise quantities --------------------------------------------------------


def test_hillery_distance():
    a = coherent_state(0.7, 30)
    assert ms.hillery_distance(a, a) == pytest.approx(0, abs=1e-12)
    assert ms.hillery_distance(fock_state(1, 30), fock_state(0, 30)) == pytest.approx(2)
    # two pure states: 2 sqrt(1 - |<1|alpha>|^2)
    v = ms.hillery_distance(fock_state(1, 30), coherent_state(1, 30))
    assert v == pytest.approx(2 * math.sqrt(1 - math.exp(-1)), abs=1e-10)


def test_bures_fidelity():
    rho = thermal_state(0.4, 50)
    assert ms.bures_fidelity(rho, rho) == pytest.approx(1, abs=1e-10)
    assert ms.bures_fidelity(fock_state(0, 3), fock_state(2, 3)) == pytest.approx(0, abs=1e-12)
    psi = np.array([0.6, 0.8j, 0.0])
    pure = from_amplitudes(psi)
    sigma = thermal_state(0.5, 60)
    direct = math.sqrt(np.real(np.vdot(np.pad(psi, (0, 57)), sigma.entries @ np.pad(psi, (0, 57)))))
    assert ms.bures_fidelity(pure.padded(60), sigma) == pytest.approx(direct, abs=1e-8)
    assert ms.bures_fidelity(sigma, pure.padded(60)) == pytest.approx(direct, abs=1e-8)


def test_report_range_check():
    with pytest.raises(ValidationError):
        ms.MeasureReport("hillery", 2.1)
    with pytest.raises(ValidationError):
        ms.MeasureReport("dodonov", -0.01)
    rep = ms.MeasureReport("bures", math.sqrt(2))
    assert rep.csv_row(3, 0.15, 0.06)[:2] == ["bures", 3]


# -- searched measures ------------------------------------------------------------


def test_classical_members_score_classical():
    bath = BathParams(1.0, 0.0)
    for rho in (coherent_state(1.1, 40), thermal_state(0.7, 60), ms.build_rho_nu_plus(2.4, bath, 40)):
        fams = ms.default_families(rho, bath=bath)
        assert ms.hillery_eta(rho, fams).value < 1e-4
        assert ms.bures_eta(rho, fams).value < 1e-2
        assert ms.dodonov_eta(rho, fams).value > 1 - 1e-6


def test_vacuum_measures():
    fams = [ms.CoherentFamily(3.0)]
    vac = fock_state(0, 1)
    assert ms.hillery_eta(vac, fams).value == pytest.approx(0, abs=1e-12)
    assert ms.bures_eta(vac, fams).value == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_dodonov_closed_form(n):
    rep = ms.dodonov_eta(fock_state(n, n + 1), [ms.CoherentFamily(math.sqrt(2 * n) + 3)])
    assert rep.value == pytest.approx(ms.fock_coherent_overlap(n), abs=1e-3)


def test_hillery_bounds_n1():
    rep = ms.hillery_eta(fock_state(1, 2), [ms.CoherentFamily(4.0)])
    g = math.exp(-1)
    assert 1 - g - 1e-9 <= rep.value <= 2 * math.sqrt(1 - g) + 1e-9


def test_bures_monotone_in_n():
    vals = [ms.bures_eta(fock_state(n, n + 1), [ms.CoherentFamily(math.sqrt(2 * n) + 3)]).value for n in range(6)]
    assert all(b >= a - 1e-6 for a, b in zip(vals, vals[1:]))
    assert max(vals) <= math.sqrt(2)


def test_superset_monotonicity():
    rho = fock_state(3, 4)
    base = ms.default_families(rho, ("coherent",))
    full = ms.default_families(rho, ("coherent", "thermal", "rho_nu_plus"))
    cfg = SearchConfig(max_evals=300)
    assert ms.hillery_eta(rho, full, cfg).value <= ms.hillery_eta(rho, base, cfg).value
    assert ms.bures_eta(rho, full, cfg).value <= ms.bures_eta(rho, base, cfg).value
    assert ms.dodonov_eta(rho, full, cfg).value >= ms.dodonov_eta(rho, base, cfg).value


def test_phase_invariance():
    # a global phase on the amplitudes leaves the density matrix unchanged
    psi = np.array([0.5, 0.5j, -0.5, 0.5])
    a = from_amplitudes(psi)
    b = from_amplitudes(psi * np.exp(0.83j))
    assert np.max(np.abs(a.entries - b.entries)) < 1e-15
    fams = ms.default_families(a, ("coherent",))
    assert ms.hillery_eta(a, fams).value == pytest.approx(ms.hillery_eta(b, fams).value, abs=1e-12)


def test_phase_symmetric_objective():
    # for diagonal states the coherent objective depends on |alpha| only
    rho = fock_state(2, 3).padded(40)
    vals = [ms.hillery_distance(rho, coherent_state(1.3 * np.exp(1j * phi), 40)) for phi in (0, 0.7, 2.1)]
    assert np.ptp(vals) < 1e-12
    assert ms.is_phase_symmetric(rho)
    assert not ms.is_phase_symmetric(from_amplitudes(np.array([1, 1])))


def test_rho_nu_plus():
    bath = BathParams(1.0, 0.06)
    r = ms.build_rho_nu_plus(2.9, bath, 30)
    expect = 0.1 * ms.rho_plus(2, bath, 30).entries + 0.9 * ms.rho_plus(3, bath, 30).entries
    assert np.max(np.abs(r.entries - expect)) < 1e-14
    assert ms.build_rho_nu_plus(3.0, bath, 30) == ms.rho_plus(3, bath, 30)
    ms.build_rho_nu_plus(4.5, bath, 30, verify=True)
    with pytest.raises(ValidationError):
        ms.build_rho_nu_plus(-0.5, bath, 30)


def test_measure_dispatch():
    with pytest.raises(ValidationError):
        ms.measure("purity", fock_state(1, 2))
    rep = ms.measure("negativity", fock_state(1, 2))
    assert rep.value == pytest.approx(4 / math.sqrt(math.e) - 2, abs=1e-4)
