import numpy as np
import pytest

from kp2asym import special_integrals as si
from kp2asym.errors import BudgetExceeded, CapExceeded, ValidationError

PHI00_ZERO = -1.6443397054520617j  # frozen after dual-regularization agreement


def test_fresnel_plane():
    assert abs(si.fresnel_plane(-1) + 1j * np.pi) < 1e-6
    # conjugating the integrand does not conjugate the measure -2i dA
    assert abs(si.fresnel_plane(1) - si.fresnel_plane(-1)) < 1e-12
    reg = si.fresnel_plane_regularizations(-1)
    assert reg["agreement"] < 1e-5


def test_fresnel_cauchy_K_derivative():
    l = np.array([1.3 + 0.4j])
    h = 1e-5
    dl = (si.fresnel_cauchy_K(l + h) - si.fresnel_cauchy_K(l - h)) / (2 * h)
    dly = (si.fresnel_cauchy_K(l + 1j * h) - si.fresnel_cauchy_K(l - 1j * h)) / (2 * h)
    d = 0.5 * (dl - 1j * dly)
    assert abs(d[0] + np.exp(-2j * np.real(l[0] ** 2))) < 1e-6


def test_moments():
    m = si.moments(0.0)
    assert m.phi_00 == pytest.approx(PHI00_ZERO, abs=1e-10)
    assert m.phi_01 == pytest.approx(m.phi_10, abs=1e-12)
    for v2 in (0.0, 4.0, 16.0):
        assert si.moments(v2).additivity_defect() < 1e-6
    with pytest.raises(CapExceeded):
        si.moments(60.0)


def test_pearcey_profile():
    assert si.pearcey_profile(0) == pytest.approx(2 * si.pearcey_mellin_zero(), abs=1e-10)
    assert si.pearcey_mellin_zero() == pytest.approx(np.sqrt(np.pi) / 12)
    for z in (-10.0, 0.0, 10.0):
        v = si.half_line_cubic(0.5, z)
        assert np.isfinite(v.real) and np.isfinite(v.imag)
    assert abs(si.pearcey_profile(50) / si.pearcey_stationary(50) - 1) < 0.05
    with pytest.raises(CapExceeded):
        si.pearcey_profile(150)


def test_pearcey_continuity():
    z = np.linspace(-50, 50, 41)
    d = 1e-3
    jumps = [abs(si.pearcey_profile(a + d) - si.pearcey_profile(a)) / d for a in z]
    assert max(jumps) < 10.0


def test_appendix_A1_derived_expansion():
    # the derived expansion has O(|l|^-3) remainders on both sides
    for ang in (0.3, 2.5):
        rep = si.verify_appendix_A1(4 * np.exp(1j * ang))
        assert rep["derived_pass"]
    with pytest.raises(ValidationError):
        si.verify_appendix_A1(1.0)


def test_appendix_A1_negative_control():
    # on Omega_plus the 1/l tail alone leaves an O(|l|^-1) error
    pts = 4 * np.exp(0.3j) * np.array([1.0, 2.0, 4.0])
    num = si.halfplane_cauchy_I(pts)
    bare = np.abs(num + 1j * np.pi / pts) * np.abs(pts) ** 2
    full = np.abs(num - si.appendix_A1_derived(pts)) * np.abs(pts) ** 2
    assert np.min(bare / full) > 20


def test_appendix_A2_derived_and_moment_sharing():
    rep = si.verify_appendix_A2(4 * np.exp(0.7j), 0.0)
    assert rep["W"]["derived_pass"] and rep["U"]["derived_pass"]
    m = si.moments(4.0)
    assert si.moments(4.0) is m or si.moments(4.0).phi_00 == m.phi_00


def test_appendix_B_budget():
    with pytest.raises(BudgetExceeded):
        si.verify_appendix_B("J1", 2 + 1j, 1.0)
    with pytest.raises(ValidationError):
        si.verify_appendix_B("nope", 2 + 1j)
