import math
import warnings

import numpy as np
import pytest
from scipy import optimize

from squid_interface import constants as const
from squid_interface.errors import InvalidArgument, MonostableError
from squid_interface.squid import (
    BoreGeometry,
    SquidParams,
    backaction,
    biased_potential,
    combine_errors,
    detection_error_budget,
    dissipation,
    effective_inductance,
    effective_inductance_beta_form,
    emf_estimate,
    find_minima_numeric,
    geometric_delta,
    leakage_probability,
    li0_threshold,
    overlap_analytic,
    overlap_quadrature,
    potential,
    solve_epsilon,
    transit_time,
)

BETA_24 = 2 * math.pi * 2.4

# roots of pi - eps = beta sin(eps) from a 40-digit mpmath solve
FROZEN_EPS = {
    BETA_24: 0.19656172918976988424,
    15.08: 0.19655733502174076715,
    100.0: 0.031109845968287903049,
    3.0: 0.86272999351396492576,
    1.0001: 3.1170986134325918365,
}


@pytest.fixture
def device():
    return SquidParams.from_dimensionless(15.08, 1e-3)


def test_constants():
    assert const.phi0 == pytest.approx(2.067833848e-15, rel=1e-9)
    assert const.R_Q == pytest.approx(25812.80745, rel=1e-9)
    assert const.hbar == pytest.approx(1.054571817e-34, rel=1e-9)


def test_params_derived(device):
    assert device.beta == pytest.approx(15.08, rel=1e-14)
    assert device.E_C / device.E_J == pytest.approx(1e-3, rel=1e-12)
    assert device.L_J == pytest.approx(device.L / device.beta, rel=1e-14)
    assert device.E_J == pytest.approx(device.i0 * const.phi0 / (2 * math.pi), rel=1e-15)
    assert device.flux_bias == const.phi0 / 2


def test_params_validation():
    with pytest.raises(InvalidArgument):
        SquidParams(L=0, i0=1e-6, C=1e-15)
    with pytest.raises(InvalidArgument):
        SquidParams(L=1e-9, i0=-1, C=1e-15)


def test_potential_examples(device):
    assert potential(0.0, device) == pytest.approx(device.E_J, rel=1e-15)
    half = const.phi0 / 2
    assert potential(half, device) == pytest.approx(const.phi0**2 / (8 * device.L) - device.E_J, rel=1e-12)
    x = 0.3 * const.phi0
    assert potential(x, device) == potential(-x, device)


def test_potential_matches_written_form(device):
    phi = np.linspace(-1.5, 1.5, 301) * const.phi0
    written = phi**2 / (2 * device.L) - device.E_J * np.cos(2 * np.pi * phi / const.phi0 + np.pi)
    np.testing.assert_allclose(potential(phi, device), written, rtol=1e-12, atol=1e-12 * device.E_J)


def test_potential_even_exactly(device):
    phi = np.random.default_rng(0).uniform(-2, 2, 1000) * const.phi0
    np.testing.assert_array_equal(potential(phi, device), potential(-phi, device))


def test_biased_potential_zero_bias(device):
    phi = np.linspace(-1, 1, 101) * const.phi0
    np.testing.assert_array_equal(biased_potential(phi, 0.0, device), potential(phi, device))
    assert biased_potential(0.0, 0.0, device) == pytest.approx(device.E_J)


def test_biased_minima_asymmetry(device):
    i_b = const.e / 1e-9
    dphi = solve_epsilon(device.beta).delta_phi
    diff = biased_potential(dphi / 2, i_b, device) - biased_potential(-dphi / 2, i_b, device)
    assert diff == pytest.approx(-i_b * dphi, rel=1e-10)


def test_biased_split_at_qubit_flux(device):
    T = 1e-9
    i_b = const.e / T
    half = const.phi0 / 2
    split = biased_potential(-half, i_b, device) - biased_potential(half, i_b, device)
    assert split == pytest.approx(const.h / (2 * T), rel=1e-6)
    assert const.h / (2 * T) == pytest.approx(3.313035075e-25, rel=1e-9)


@pytest.mark.parametrize("beta", sorted(FROZEN_EPS))
def test_solve_epsilon_frozen(beta):
    sol = solve_epsilon(beta)
    tol = 1e-10 if beta < 1.01 else 1e-13
    assert sol.epsilon == pytest.approx(FROZEN_EPS[beta], abs=tol)
    assert sol.residual < 1e-10
    assert 0 < sol.epsilon < math.pi


def test_solve_epsilon_at_threshold_device():
    sol = solve_epsilon(BETA_24)
    assert sol.epsilon == pytest.approx(0.196, abs=1e-3)
    assert sol.detection_error == pytest.approx(0.0097, abs=5e-5)
    assert sol.detection_error < 0.01


def test_solve_epsilon_large_beta():
    assert solve_epsilon(100).epsilon < 0.05


def test_solve_epsilon_near_merge():
    assert solve_epsilon(1.0001).epsilon > 3.1


@pytest.mark.parametrize("beta", [1.0, 0.5, -2.0])
def test_solve_epsilon_monostable(beta):
    with pytest.raises(MonostableError):
        solve_epsilon(beta)


def test_minima_delta_phi_consistency():
    for beta in np.geomspace(1.01, 1000, 25):
        sol = solve_epsilon(beta)
        assert sol.delta_phi == pytest.approx(const.phi0 * (1 - sol.epsilon / math.pi), rel=1e-12)


def test_brentq_oracle():
    for beta in np.geomspace(1.05, 1000, 20):
        ref = optimize.brentq(lambda x: beta * math.sin(x) - math.pi + x, 1e-12, math.pi - 1e-9, xtol=1e-15)
        assert solve_epsilon(beta).epsilon == pytest.approx(ref, abs=1e-12)


def test_find_minima_numeric_matches():
    sol = find_minima_numeric(SquidParams.from_dimensionless(15.08, 1e-3))
    assert sol.epsilon == pytest.approx(solve_epsilon(15.08).epsilon, abs=1e-8)


def test_find_minima_grid_scan():
    beta = 3.0
    p = SquidParams.from_dimensionless(beta, 1e-3)
    phi = np.linspace(-1, 1, 100_001) * const.phi0
    U = potential(phi, p)
    interior = (U[1:-1] < U[:-2]) & (U[1:-1] < U[2:])
    minima = phi[1:-1][interior]
    assert len(minima) == 2
    assert minima[0] == pytest.approx(-minima[1], rel=1e-12)
    spacing = phi[1] - phi[0]
    half = find_minima_numeric(p).delta_phi / 2
    assert abs(minima[1] - half) <= spacing


def test_find_minima_monostable():
    with pytest.raises(MonostableError):
        find_minima_numeric(0.5)
    with pytest.raises(MonostableError):
        find_minima_numeric(SquidParams.from_dimensionless(0.5, 1e-3))


def test_root_vs_minimization_sweep():
    for beta in np.geomspace(1.01, 1e3, 50):
        assert abs(solve_epsilon(beta).epsilon - find_minima_numeric(beta).epsilon) < 1e-8


def test_li0_threshold():
    ratio = li0_threshold()
    assert 2.3 <= ratio <= 2.5
    # analytic crossing eps = 0.2 sits at L i0/phi0 = 2.35652...
    assert ratio == pytest.approx(2.36)


def test_effective_inductance_forms(device):
    eps = 0.196
    a, b = effective_inductance(device, eps), effective_inductance_beta_form(device, eps)
    assert a == pytest.approx(b, rel=1e-12)
    assert effective_inductance(device, 0.0) == pytest.approx(device.beta / (device.beta + 1) * device.L_J, rel=1e-13)


def test_effective_inductance_large_beta():
    p = SquidParams.from_dimensionless(1e9, 1e-3)
    assert effective_inductance(p, 0.0) == pytest.approx(p.L_J, rel=1e-8)
    assert effective_inductance(p, 0.1) == pytest.approx(p.L_J / (1 - 0.005), rel=1e-8)
    with pytest.raises(InvalidArgument):
        effective_inductance(p, math.pi)


def test_effective_inductance_is_inverse_curvature(device):
    # finite-difference curvature of U at the well, against the eps = 0 form
    eps = solve_epsilon(device.beta).epsilon
    phi_min = const.phi0 / 2 * (1 - eps / math.pi)
    h = 1e-4 * const.phi0
    curv = (potential(phi_min + h, device) - 2 * potential(phi_min, device) + potential(phi_min - h, device)) / h**2
    exact_L = 1 / curv
    # the curvature expansion keeps eps to second order
    assert effective_inductance(device, eps) == pytest.approx(exact_L, rel=5e-3)


def test_leakage_closed_form_example():
    p = SquidParams.from_dimensionless(15.08, 1e-3)
    leak = leakage_probability(p)
    assert leak.p_closed == pytest.approx(0.010827112641845192, rel=1e-12)
    # sqrt(beta/(beta+1)) -> 1 gives sqrt(1/8000) = 1.118e-2
    big = SquidParams.from_dimensionless(1e8, 1e-3)
    assert leakage_probability(big).p_closed == pytest.approx(math.sqrt(1e-3 / 8), rel=1e-7)


def test_leakage_approx_vs_closed_same_inductance(device):
    leak = leakage_probability(device, eps=0.0)
    assert leak.p_approx == pytest.approx(leak.p_closed, rel=1e-10)


def test_leakage_exact_vs_approx(device):
    leak = leakage_probability(device)
    assert leak.p_approx < 0.02
    assert leak.p_exact == pytest.approx(leak.p_approx, rel=1e-2)


def test_leakage_heavy_flux():
    p0 = SquidParams.from_dimensionless(15.08, 1e-3)
    vals = [leakage_probability(SquidParams(p0.L, p0.i0, p0.C * f)).p_exact for f in (1, 1e4, 1e8)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-3 * vals[0]


def test_leakage_monostable():
    with pytest.raises(MonostableError):
        leakage_probability(SquidParams.from_dimensionless(0.9, 1e-3))


def test_overlap_quadrature_oracle():
    r = np.random.default_rng(7)
    for _ in range(20):
        p = SquidParams.from_dimensionless(r.uniform(1.5, 200), 10 ** r.uniform(-5, -2.5))
        assert leakage_probability(p).p_exact < 0.05
        assert overlap_quadrature(p) == pytest.approx(overlap_analytic(p), rel=1e-8)
        assert 1 - overlap_quadrature(p) == pytest.approx(leakage_probability(p).p_exact, rel=1e-8)


def test_geometric_delta_aspect_10():
    assert geometric_delta(BoreGeometry.from_aspect(10))[0] == 0.05
    delta, vpc = geometric_delta(BoreGeometry(r=1e-6, l=10e-6))
    assert delta == pytest.approx(0.05, rel=1e-15)
    assert delta**2 / 4 == pytest.approx(6.25e-4, rel=1e-15)
    assert vpc.a_bore == pytest.approx(const.phi0 / 21e-6, rel=1e-12)
    assert vpc.a_bore * (10e-6 + 0.5e-6) == pytest.approx(const.phi0 / 2, rel=1e-12)
    assert vpc.q_A == pytest.approx(math.pi * 1e-12 * vpc.a_bore, rel=1e-12)
    assert vpc.dphi_A == pytest.approx(1e-6 * vpc.a_bore / 2, rel=1e-12)


def test_geometric_delta_aspect_2_warns():
    with pytest.warns(UserWarning):
        g = BoreGeometry.from_aspect(2)
    assert geometric_delta(g)[0] == 0.25


def test_geometry_validation():
    with pytest.raises(InvalidArgument):
        BoreGeometry(r=2e-6, l=1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        BoreGeometry.from_aspect(10)


def test_budget_example(device):
    budget = detection_error_budget(device, BoreGeometry.from_aspect(10))
    assert budget.p_delta == pytest.approx(6.25e-4)
    assert budget.p_epsilon == pytest.approx(9.7e-3, abs=1e-4)
    assert budget.p_leak == pytest.approx(1.08e-2, abs=1e-4)
    assert budget.p_total == pytest.approx(2.1e-2, abs=5e-4)
    expect = 1 - (1 - budget.p_delta) * (1 - budget.p_epsilon) * (1 - budget.p_leak)
    assert budget.p_total == pytest.approx(expect, rel=1e-15)


def test_budget_ideal_device():
    p = SquidParams.from_dimensionless(1e9, 1e-12)
    budget = detection_error_budget(p, BoreGeometry.from_aspect(1e9))
    assert budget.p_total < 1e-6


def test_combine_errors():
    assert combine_errors(0.1, 1.0, 0.3) == 1.0
    assert combine_errors() == 0.0
    with pytest.raises(InvalidArgument):
        combine_errors(1.5)


def test_budget_monostable():
    with pytest.raises(MonostableError):
        detection_error_budget(SquidParams.from_dimensionless(0.8, 1e-3), BoreGeometry.from_aspect(10))


def test_backaction_1ns():
    model = backaction(1e-9)
    assert model.delta_E == pytest.approx(1.6565175375e-25, rel=1e-12)
    assert model.delta_E / const.e == pytest.approx(1.03e-6, rel=1e-2)
    assert model.i_b * model.T == pytest.approx(const.e, rel=1e-12)
    assert model.phase == pytest.approx(math.pi, abs=1e-12)
    assert model.phi_L == pytest.approx(1e6 * const.phi0)
    assert model.phi_L / model.L_L == pytest.approx(model.i_b, rel=1e-12)


def test_backaction_scaling():
    assert backaction(2e-9).delta_E == pytest.approx(backaction(1e-9).delta_E / 2, rel=1e-14)
    with pytest.raises(InvalidArgument):
        backaction(0)


def test_dissipation_example():
    est = dissipation(25.8, 0.33e-12, 180e-6 * const.e)
    assert est.eta == pytest.approx(1.0e-3, rel=1e-3)
    assert est.delta_E == pytest.approx(2.006903792018718e-24, rel=1e-12)
    assert est.delta_E / const.e == pytest.approx(12.5e-6, rel=1e-2)
    assert est.delta_A == pytest.approx(est.eta * const.h, rel=1e-15)
    assert est.quasiparticle_safe


def test_dissipation_zero_resistance():
    est = dissipation(0.0, 1e-12)
    assert est.delta_E == 0 and est.quasiparticle_safe


def test_dissipation_energy_scale():
    # h/tau at 0.3 ps is about 13.8 meV; order-of-magnitude only
    est = dissipation(1.0, 0.3e-12)
    assert est.energy_scale / const.e == pytest.approx(13.8e-3, rel=1e-2)


def test_dissipation_flag_flips_at_short_tau():
    # delta_E = eta h / tau crosses the 180 ueV gap near tau = 0.023 ps
    assert not dissipation(25.8, 0.02e-12).quasiparticle_safe
    assert dissipation(25.8, 0.025e-12).quasiparticle_safe


def test_transit_time():
    assert transit_time(100e-6) == pytest.approx(0.33e-12, rel=1e-2)


def test_emf_estimate():
    omega = 2 * math.pi * 1e9
    assert emf_estimate(omega) == pytest.approx(2 * const.phi0 * 1e9, rel=1e-15)
