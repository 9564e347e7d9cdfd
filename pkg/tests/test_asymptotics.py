import numpy as np
import pytest

from kp2asym.asymptotics import (ConfluentChart, ExternalExpansion, StationaryChart, confluent_coefficients,
                                 external_coefficients, internal_coefficients, uniform_composite)
from kp2asym.dbar_solver import _wirtinger
from kp2asym.errors import ChartViolation, RegimeMismatch
from kp2asym.phase_geometry import PhaseParams, dS
from kp2asym.scattering import zero_data

BULK = PhaseParams(-1.0, 0.0, 100.0)


@pytest.fixture(scope="module")
def bulk(centred_family):
    return uniform_composite(centred_family, BULK)


def test_zero_data_composite():
    for p in (BULK, PhaseParams(0.0, 0.0, 100.0)):
        U = uniform_composite(zero_data(), p)
        k = np.array([0.3 + 0.2j, -1 + 1j])
        assert np.all(U.mu_hat(k) == 1) and np.all(U.nu_hat(k) == 0)


def test_zero_data_coefficients():
    ext = external_coefficients(zero_data(), BULK).external
    k = np.array([1.0 + 0.5j, -0.7 - 0.2j])
    for name in ("nu1", "mu1", "nu0_prime", "nu0"):
        assert np.all(np.abs(ext[name](k)) == 0)


def test_axis_jump_compensated(bulk):
    ext = bulk.external
    s = np.linspace(-1.5, 1.5, 7) + 0.013
    right = ext.nu1(1e-9 + 1j * s, check=False) + ext.nu0_prime(1e-9 + 1j * s)
    left = ext.nu1(-1e-9 + 1j * s, check=False) + ext.nu0_prime(-1e-9 + 1j * s)
    assert np.max(np.abs(right - left)) < 1e-6


def test_mu1_dbar(bulk, centred_family):
    F = centred_family
    z = np.array([0.7 + 0.4j, -1.1 + 0.3j, 0.2 - 0.9j])
    _, db = _wirtinger(bulk.external.mu1, z, 1e-4)
    want = -F.f(-np.conj(z)) * F.f(z) / (1j * dS(z, BULK))
    assert np.max(np.abs(db - want)) < 1e-4


def test_chart_violation(bulk):
    with pytest.raises(ChartViolation):
        bulk.external.mu(np.array([bulk.charts[0].kj + 1e-3]))


def test_internal_ode_and_decay(centred_family):
    for p in (BULK, PhaseParams(1.0, 0.0, 100.0)):
        for j in range(2):
            ch = internal_coefficients(centred_family, p, j).internal[0]["chart"]
            for l0 in (0.7 + 0.3j, -1.2 + 0.5j, 2 - 1j):
                assert ch.ode_residual(l0) < 1e-4
    ch = StationaryChart(centred_family, BULK, 0, ExternalExpansion(centred_family, BULK).mu1)
    # Q tends to its 1/l far field
    errs = []
    for R in (3.0, 6.0):
        k = np.array([ch._k_of_l(R * np.exp(0.7j))])
        errs.append(abs(ch.Q(k) - ch.Q_far(k))[0])
    assert errs[1] < errs[0]


def test_confluent(centred_family):
    p = PhaseParams(-0.1, 0.0, 100.0)
    assert p.regime == "Confluent"
    with pytest.raises(RegimeMismatch):
        ExternalExpansion(centred_family, p)
    coef = confluent_coefficients(centred_family, p)
    ch = coef.confluent["chart"]
    assert isinstance(ch, ConfluentChart)
    assert ch.ode_residual(0.7 + 0.3j) < 1e-4


def test_boundary_values(bulk):
    k = 6 * np.exp(1j * np.linspace(0.1, 6, 20))
    bound = 2 / (BULK.t * abs(BULK.theta))
    assert np.max(np.abs(bulk.mu_hat(k) - 1)) < bound
    assert np.max(np.abs(bulk.nu_hat(k))) < bound


def test_charts_used(bulk):
    assert bulk.charts_used(np.array([5.0 + 0j])) == ["external"]
    assert "internal[0]" in bulk.charts_used(np.array([bulk.charts[0].kj + 0.01]))
