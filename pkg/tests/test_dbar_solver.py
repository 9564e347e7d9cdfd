import numpy as np
import pytest

from kp2asym.core_numerics import GridField, SpectralGrid
from kp2asym.dbar_solver import (apply_G, assemble_phi_psi, default_residual_probes, reflect,
                                 residual_of, solve)
from kp2asym.errors import NoConvergence, ResolutionExceeded
from kp2asym.phase_geometry import PhaseParams
from kp2asym.scattering import gaussian_family, zero_data

GRID = SpectralGrid(6.0, 64, 64)
P = PhaseParams(-1.0, 0.0, 0.002)


def _pair(values):
    return tuple(GridField(GRID, v) for v in values)


def test_apply_G_trivial(std_family):
    z = np.zeros(GRID.size)
    out = apply_G(std_family, _pair([z, z]), P)
    assert np.all(out[0].values == 0) and np.all(out[1].values == 0)
    rng = np.random.default_rng(0)
    V = _pair(rng.normal(size=(2, GRID.size)))
    out = apply_G(zero_data(), V, P)
    assert np.all(out[0].values == 0) and np.all(out[1].values == 0)


def test_apply_G_linear(std_family):
    rng = np.random.default_rng(1)
    V1 = _pair(rng.normal(size=(2, GRID.size)) + 1j * rng.normal(size=(2, GRID.size)))
    V2 = _pair(rng.normal(size=(2, GRID.size)))
    a, b = 0.7 - 0.2j, -1.3
    comb = _pair([a * V1[i].values + b * V2[i].values for i in range(2)])
    lhs = apply_G(std_family, comb, P)
    r1, r2 = apply_G(std_family, V1, P), apply_G(std_family, V2, P)
    for i in range(2):
        assert np.max(np.abs(lhs[i].values - a * r1[i].values - b * r2[i].values)) < 1e-12


def test_zero_data_is_exact():
    sol = solve(zero_data(), P, grid=GRID)
    assert sol.iterations == 1
    assert np.all(sol.mu.values == 1) and np.all(sol.nu.values == 0)
    phi, psi = assemble_phi_psi(sol)
    assert np.all(phi.values == 1) and np.all(psi.values == 1)


def test_standard_family_converges(std_family):
    sol = solve(std_family, P, grid=GRID)
    assert sol.iterations <= 30
    assert sol.contraction_ratio_observed <= 0.55
    assert sol.final_residual <= 1e-8
    # the outer ring still carries the 1/|k| tail of nu
    assert sol.boundary_defect() < 0.05


def test_second_order_remainder(std_family):
    # mu - 1 - G1 is O(F^2): halving F quarters it
    defects = []
    for c in (0.5, 0.25):
        F = std_family.scaled(c)
        sol = solve(F, P, tol=1e-12, grid=GRID)
        one = np.ones(GRID.size, dtype=complex)
        g1 = apply_G(F, _pair([one, 0 * one]), P)
        d = np.max(np.abs(sol.mu.values - 1 - g1[0].values))
        d = max(d, np.max(np.abs(sol.nu.values - g1[1].values)))
        defects.append(d)
    assert defects[0] / defects[1] == pytest.approx(4.0, rel=0.2)


def test_assembly_involution(std_family):
    sol = solve(std_family, P, grid=GRID)
    assert np.array_equal(reflect(reflect(sol.mu)).values, sol.mu.values)
    phi, psi = assemble_phi_psi(sol)
    # (phi, psi)(-conj k) = (psi, phi)(k)
    assert np.max(np.abs(reflect(phi).values - psi.values)) < 1e-14


def test_residual_of_constant_candidate(std_family):
    probes = default_residual_probes(GRID)
    r = residual_of((1.0, 0.0), std_family, P, probes=probes)
    assert r == pytest.approx(np.max(np.abs(std_family(probes))), rel=1e-12)


def test_grid_refinement(std_family):
    # the sgn jump across Re k = 0 limits the angular Fourier grid to ~1e-5
    coarse = solve(std_family, P, grid=SpectralGrid(6.0, 128, 128))
    fine = solve(std_family, P, grid=SpectralGrid(6.0, 256, 256))
    z = np.array([0.4 + 0.3j, -0.9 + 0.2j, 1.5 - 0.7j])
    assert np.max(np.abs(coarse.mu.interpolate(z) - fine.mu.interpolate(z))) < 1e-4


def test_failure_modes(std_family):
    with pytest.raises(ResolutionExceeded):
        solve(std_family, PhaseParams(-1.0, 0.0, 5.0), grid=GRID)
    with pytest.raises(NoConvergence):
        solve(std_family, P, grid=GRID, max_iter=3)
