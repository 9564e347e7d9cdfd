import numpy as np
import pytest

from kp2asym.core_numerics import (GridField, SpectralGrid, cauchy_green, nested_oracle,
                                   oscillatory_integral_2d, read_kp2grid, write_kp2grid)
from kp2asym.errors import ResolutionExceeded, TargetOutsideGrid, ValidationError


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(6.0, 64, 64)


def test_grid_weights_and_axis(grid):
    assert abs(grid.weights.sum() - np.pi * 36) / (np.pi * 36) < 1e-10
    assert np.min(np.abs(grid.nodes.real)) > 0


def test_grid_validation():
    with pytest.raises(ValidationError):
        SpectralGrid(-1.0, 16, 16)
    with pytest.raises(ValidationError):
        SpectralGrid(1.0, 4, 16)


def test_reflection_index_is_exact(grid):
    idx = grid.reflected_index()
    assert np.max(np.abs(grid.nodes[idx] + np.conj(grid.nodes))) < 1e-13


def test_cauchy_green_zero_and_symmetry(grid):
    zero = GridField(grid, np.zeros(grid.size))
    assert cauchy_green(zero, 0.3 + 0.2j) == 0
    g = GridField.from_function(grid, lambda m: np.exp(-np.abs(m) ** 2))
    assert abs(cauchy_green(g, 0j)) < 1e-12


def test_cauchy_green_inverts_dbar(grid):
    # g = mbar exp(-|m|^2)  =>  d_mbar g = (1 - |m|^2) exp(-|m|^2)
    fld = GridField.from_function(grid, lambda m: (1 - np.abs(m) ** 2) * np.exp(-np.abs(m) ** 2))
    z = 1 + 0.5j
    assert abs(cauchy_green(fld, z) - np.conj(z) * np.exp(-abs(z) ** 2)) < 1e-6


def test_cauchy_green_conjugation(grid):
    fld = GridField.from_function(grid, lambda m: (m + 0.2j) * np.exp(-np.abs(m - 0.5) ** 2))
    z = 0.4 - 0.7j
    a = cauchy_green(fld.conj(), z, "antiholomorphic")
    assert abs(a - np.conj(cauchy_green(fld, z))) < 1e-12


def test_cauchy_green_refuses_far_target(grid):
    fld = GridField(grid, np.ones(grid.size))
    with pytest.raises(TargetOutsideGrid):
        cauchy_green(fld, 13.0)


def test_kp2grid_roundtrip(tmp_path, grid):
    fld = GridField.from_function(grid, lambda m: np.exp(-np.abs(m) ** 2) * (1 + 1j * m))
    p = tmp_path / "f.kp2grid"
    write_kp2grid(p, fld)
    assert p.read_text().splitlines()[0] == "KP2GRID v1 R=6.0 NR=64 NA=64"
    back = read_kp2grid(p)
    assert np.array_equal(back.values, fld.values)


def test_oscillatory_integral():
    g = SpectralGrid(8.0, 32, 32)
    assert oscillatory_integral_2d(lambda k: np.zeros(k.shape), lambda k: np.real(k), g, 1.0) == 0
    val = oscillatory_integral_2d(lambda k: np.exp(-np.abs(k) ** 2), lambda k: 0 * k.real, g, 1.0)
    assert abs(val - np.pi) < 1e-6
    with pytest.raises(ResolutionExceeded):
        oscillatory_integral_2d(lambda k: np.exp(-np.abs(k) ** 2), lambda k: np.real(k**3), g, 1e4, cap=10_000)


def test_nested_oracle_zero_inner():
    v = nested_oracle(lambda n: np.exp(2j * np.real(n * n)), lambda m: 0 * m, "full", "full", 2 + 1j, n=16)
    assert v == 0
