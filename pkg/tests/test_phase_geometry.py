import numpy as np
import pytest

from kp2asym.errors import BranchAmbiguity, DegenerateHessian, DegenerateRegime, ValidationError
from kp2asym.phase_geometry import (PhaseParams, confluent_phase_omega, d2S, dS, phase_at_stationary,
                                    phase_Phi, phase_S, real_stationary_points, scaling_variable_l,
                                    stationary_phase_2d, stationary_points)


def test_params_derived():
    p = PhaseParams(-1.0, 0.5, 8.0)
    assert abs(p.theta**2 - (12 - 0.25)) < 1e-14
    assert p.v == pytest.approx(8 ** (1 / 3) * p.theta / np.sqrt(12))
    assert PhaseParams.from_xyt(-400, 40, 400).eta == pytest.approx(0.1)
    with pytest.raises(ValidationError):
        PhaseParams(0, 0, 0)


def test_regimes():
    assert PhaseParams(-1, 0, 100).regime == "OscillatoryBulk"
    assert PhaseParams(1, 0, 100).regime == "AxisStationary"
    assert PhaseParams(1, 0, 100).u_regime == "Decay"
    assert PhaseParams(0, 0, 100).regime == "Confluent"
    # one contiguous confluent band along eta = 0
    tags = [PhaseParams(x, 0, 100).regime for x in np.linspace(-2, 2, 401)]
    runs = [t for i, t in enumerate(tags) if i == 0 or t != tags[i - 1]]
    assert runs == ["OscillatoryBulk", "Confluent", "AxisStationary"]


def test_phase_values():
    p = PhaseParams(-1, 0)
    assert phase_S(0, p) == 0
    assert phase_S(1.0, p) == pytest.approx(6.0)
    rng = np.random.default_rng(3)
    k = rng.normal(size=100) + 1j * rng.normal(size=100)
    for xi, eta in rng.normal(size=(5, 2)):
        q = PhaseParams(xi, eta)
        assert np.max(np.abs(phase_S(k, q).imag)) < 1e-13
        assert np.max(np.abs(phase_Phi(k.real, k.imag, q) - phase_S(k, q).real)) < 1e-12


def test_omega():
    assert confluent_phase_omega(0, 1.3) == 0
    assert confluent_phase_omega(1.0, 0) == pytest.approx(8.0)
    p = PhaseParams(-1e-4, 0, 1e6)
    k = p.k0 + 1e-3
    lhs = confluent_phase_omega(p.t ** (1 / 3) * (k - p.k0), p.v)
    rhs = p.t * (phase_S(k, p) - phase_S(p.k0, p))
    assert abs(lhs - rhs) < 1e-3


def test_stationary_points():
    sp = stationary_points(PhaseParams(-1, 0))
    assert np.allclose(sp.points, [np.sqrt(3) / 6, -np.sqrt(3) / 6], atol=1e-14)
    assert np.allclose(sp.hessians, [4 * np.sqrt(3), -4 * np.sqrt(3)], atol=1e-12)
    assert not sp.degenerate
    ax = stationary_points(PhaseParams(1, 0))
    assert np.max(np.abs(np.real(ax.points))) < 1e-14
    assert np.allclose(sorted(np.imag(ax.points)), [-np.sqrt(3) / 6, np.sqrt(3) / 6])
    assert stationary_points(PhaseParams(0, 0)).degenerate
    p = PhaseParams(-0.7, 0.4)
    for k in stationary_points(p).points:
        assert abs(dS(k, p)) < 1e-12
    # Hessians against finite differences and +-2 theta
    h = 1e-5
    for k, s in zip(stationary_points(p).points, (1, -1)):
        fd = (dS(k + h, p) - dS(k - h, p)) / (2 * h)
        assert abs(fd - d2S(k, p)) < 1e-8
        assert abs(d2S(k, p) - s * 2 * p.theta) < 1e-12


def test_phase_at_stationary():
    p = PhaseParams(-1, 0)
    k1 = stationary_points(p).points[0]
    assert abs(phase_at_stationary(p) - phase_S(k1, p)) < 1e-14
    with pytest.raises(DegenerateRegime):
        phase_at_stationary(PhaseParams(0, 0))


def test_scaling_variable():
    p = PhaseParams(-1, 0, 100)
    sp = stationary_points(p)
    k1, h1 = sp.points[0], sp.hessians[0]
    assert scaling_variable_l(k1, 0, p) == 0
    d = 1e-4 * np.exp(0.3j)
    lead = np.sqrt(p.t) * d * np.sqrt(h1 / 2)
    assert abs(scaling_variable_l(k1 + d, 0, p) - lead) / abs(lead) < 1e-3
    d = 0.01
    l = scaling_variable_l(k1 + d, 0, p)
    exact_sq = p.t * (d**2 * h1 / 2 + 4 * d**3)
    assert abs(l**2 - exact_sq) < 1e-12 and l.real > 0
    with pytest.raises(BranchAmbiguity):
        scaling_variable_l(k1 + 1.0, 0, p)


def test_real_stationary_points():
    pts = sorted(real_stationary_points(PhaseParams(-1, 0)))
    assert np.allclose(pts, [(-np.sqrt(12) / 12, 0), (np.sqrt(12) / 12, 0)], atol=1e-12)


def test_stationary_phase_against_quadrature(std_family):
    # the rotated-contour quadrature of the reconstruction module is the oracle
    # (the generic 2D rule needs ~1e12 nodes at these t)
    from kp2asym.reconstruct import quadrature_value

    amp = lambda k: -4 * np.abs(np.real(k)) * std_family.f(k)
    errs = []
    for t in (100, 200, 400):
        p = PhaseParams(-1, 0, t)
        quad = quadrature_value(std_family, -t, 0.0, t).u
        errs.append(abs(stationary_phase_2d(amp, p) - quad) / abs(quad))
    assert errs[-1] < 0.05
    assert errs[2] < errs[0]
    assert stationary_phase_2d(lambda k: 0 * k, PhaseParams(-1, 0, 10)) == 0
    with pytest.raises(DegenerateHessian):
        stationary_phase_2d(amp, PhaseParams(0, 0, 10))
