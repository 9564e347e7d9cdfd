import numpy as np
import pytest

from kp2asym.errors import ValidationError
from kp2asym.scattering import (InitialCondition, ScatteringData, born_smooth_part, born_transform,
                                check_restriction, evolve, gaussian_family, symmetry_defect,
                                taylor_extract, zero_data)

# frozen regression constants (dense-probe sup of iint |F|/|k - z|)
RESTRICTION_EXP = 5.55080812006739


def _exp_data(c=1.0):
    return ScatteringData(lambda k: c * np.exp(-np.abs(k) ** 2) + 0j, 6.0,
                          lambda a, b: c * np.exp(-a**2 - b**2) + 0j, "g")


def test_sign_structure(std_family):
    assert std_family(0.5 + 0.1j) == -std_family.f(0.5 + 0.1j)
    assert std_family(-0.5 + 0.1j) == std_family.f(-0.5 + 0.1j)


def test_restriction_values(std_family):
    assert check_restriction(zero_data()) == 0.0
    assert check_restriction(_exp_data()) == pytest.approx(RESTRICTION_EXP, rel=1e-10)
    assert check_restriction(_exp_data(0.3)) / check_restriction(_exp_data()) == pytest.approx(0.3, rel=1e-10)
    assert check_restriction(std_family) / (2 * np.pi) == pytest.approx(0.5, rel=1e-6)


def test_evolve(std_family):
    assert evolve(std_family, 0) is std_family
    k = np.array([1.0 + 0j, 0.3 - 0.7j, -1.2 + 0.4j])
    e = evolve(std_family, 0.5)
    assert np.max(np.abs(np.abs(e(k)) - np.abs(std_family(k)))) < 1e-14
    assert e.f(1.0 + 0j) / std_family.f(1.0 + 0j) == pytest.approx(np.exp(4j))
    two = evolve(evolve(std_family, 0.2), 0.3)
    assert np.max(np.abs(two(k) - e(k))) < 1e-12
    with pytest.raises(ValidationError):
        evolve(std_family, -1)


def test_symmetry_defect():
    assert symmetry_defect(gaussian_family(0.5, 0.3j)) < 1e-15
    # f = sgn(-Re k) makes F identically 1
    const = ScatteringData(lambda k: np.sign(-np.real(np.asarray(k))) + 0j, 1.0)
    assert symmetry_defect(const, [1.0 + 0j]) == pytest.approx(2.0)
    ie = ScatteringData(lambda k: 1j * np.exp(-np.abs(k) ** 2) * np.sign(-np.real(k)), 6.0)
    assert symmetry_defect(ie) < 1e-15


def test_born_transform():
    u0 = InitialCondition(lambda x, y: np.exp(-x**2 - y**2), 6.0)
    k = 0.3 + 0.1j
    got = born_transform(u0, k)
    # exp(-i(k+kbar)x - (k^2-kbar^2)y) with Gaussian u0 factorises into two 1D transforms
    a, b = 2 * k.real, 4 * k.real * k.imag
    exact = -np.pi * np.exp(-(a**2 + b**2) / 4) / (2 * np.pi)
    assert abs(got - exact) < 1e-8
    small = InitialCondition(lambda x, y: 0.5 * np.exp(-x**2 - y**2), 6.0)
    assert abs(born_transform(small, k) - 0.5 * got) < 1e-12
    zero = InitialCondition(lambda x, y: 0 * x, 6.0)
    assert born_transform(zero, k) == 0
    assert symmetry_defect(born_smooth_part(u0)) < 1e-10


def test_taylor_linear():
    F = ScatteringData(lambda k: np.asarray(k, dtype=complex), 4.0)
    tc = taylor_extract(F, 0.5j)
    assert abs(tc.f1["f10"] - 1) < 1e-6 and abs(tc.f1["f01"]) < 1e-6
    assert all(abs(v) < 1e-6 for v in tc.f2.values())
