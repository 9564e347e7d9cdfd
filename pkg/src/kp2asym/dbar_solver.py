"""Fixed-point solution of the dbar system for (mu, nu) with boundary values (1, 0).

The pair solves

    d_kbar mu =  F(-conj k) e^{itS} nu,
    d_k    nu = -F(k)       e^{-itS} mu,

which becomes (mu, nu) = (1, 0) + G[F](mu, nu) with

    G[F](mu, nu) = ( CG_hol[F(-conj m) e^{itS} nu], -CG_anti[F(m) e^{-itS} mu] ).

S(-conj k) = -S(k), so k -> -conj k maps solutions with boundary value
(1, 0) to solutions with boundary value (0, 1) after swapping the
components.  That gives (phi, psi) = (mu + nu o r, nu + mu o r) with
r(k) = -conj k.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core_numerics import GridField, SpectralGrid, cg_operator
from .errors import NoConvergence, ResolutionExceeded
from .phase_geometry import PhaseParams, dS, phase_S
from .scattering import ScatteringData, check_restriction

log = logging.getLogger(__name__)

DEFAULT_GRID = SpectralGrid(6.0, 128, 128)
# points per local wavelength demanded of the grid where |F| matters
POINTS_PER_WAVE = 4.0


@dataclass(frozen=True)
class DbarSolution:
    mu: GridField
    nu: GridField
    params: PhaseParams
    iterations: int
    final_residual: float
    contraction_ratio_observed: float
    history: tuple = ()

    @property
    def grid(self) -> SpectralGrid:
        return self.mu.grid

    def boundary_defect(self) -> float:
        """max(|mu - 1|, |nu|) on the outermost radial ring."""
        g = self.grid
        mu = self.mu.as_matrix()[-1]
        nu = self.nu.as_matrix()[-1]
        return float(max(np.max(np.abs(mu - 1)), np.max(np.abs(nu))))

    def diagnostics(self) -> dict:
        return {"iterations": self.iterations, "final_residual": self.final_residual,
                "contraction_ratio_observed": self.contraction_ratio_observed,
                "regime": self.params.regime, "boundary_defect": self.boundary_defect()}


# ---------------------------------------------------------------------------
# coefficients and resolution


def _coefficients(F: ScatteringData, grid: SpectralGrid, params: PhaseParams):
    k = grid.nodes
    e = np.exp(1j * params.t * np.real(phase_S(k, params)))
    a = F(-np.conj(k)) * e
    b = F(k) / e
    return a, b


def resolution_check(F: ScatteringData, grid: SpectralGrid, params: PhaseParams,
                     rel: float = 1e-12) -> float:
    """Largest phase step between neighbouring nodes where |F| is non-negligible.

    Raises ResolutionExceeded if it exceeds 2 pi / POINTS_PER_WAVE.
    """
    k = grid.nodes
    amp = np.abs(F.f(k))
    if not np.any(amp > 0):
        return 0.0
    live = amp > rel * np.max(amp)
    r = np.concatenate([[0.0], grid.r, [grid.radius]])
    dr = np.maximum(np.diff(r)[:-1], np.diff(r)[1:])
    h_loc = np.maximum(np.repeat(dr, grid.na), np.abs(k) * 2 * np.pi / grid.na)
    grad = 2 * np.abs(dS(k, params))
    step = float(np.max((params.t * grad * h_loc)[live]))
    if step > 2 * np.pi / POINTS_PER_WAVE:
        raise ResolutionExceeded(
            f"phase step {step:.3g} rad per node exceeds {2 * np.pi / POINTS_PER_WAVE:.3g}; "
            "refine the grid or lower t")
    return step


# ---------------------------------------------------------------------------
# operator


def _apply(a, b, op, mu, nu):
    return op.apply(a * nu, "holomorphic"), -op.apply(b * mu, "antiholomorphic")


def apply_G(F: ScatteringData, V: Sequence[GridField], params: PhaseParams,
            check: bool = True) -> tuple[GridField, GridField]:
    """One application of G[F] to the pair V = (mu, nu)."""
    mu, nu = V
    grid = mu.grid
    if check:
        resolution_check(F, grid, params)
    a, b = _coefficients(F, grid, params)
    g1, g2 = _apply(a, b, cg_operator(grid), mu.values, nu.values)
    return GridField(grid, g1), GridField(grid, g2)


def solve(F: ScatteringData, params: PhaseParams, tol: float = 1e-8, max_iter: int = 50,
          grid: SpectralGrid | None = None) -> DbarSolution:
    """Iterate V <- (1, 0) + G[F] V until successive iterates agree to ``tol``."""
    grid = grid or DEFAULT_GRID
    ones = np.ones(grid.size, dtype=complex)
    zeros = np.zeros(grid.size, dtype=complex)
    if F.is_zero():
        return DbarSolution(GridField(grid, ones), GridField(grid, zeros), params, 1, 0.0, 0.0, (0.0,))
    restr = check_restriction(F)
    if restr >= 2 * np.pi:
        warnings.warn(f"restriction integral {restr:.3g} >= 2 pi; contraction is not guaranteed",
                      RuntimeWarning, stacklevel=2)
    resolution_check(F, grid, params)
    a, b = _coefficients(F, grid, params)
    op = cg_operator(grid)
    mu, nu = ones, zeros
    hist = []
    for it in range(1, max_iter + 1):
        g1, g2 = _apply(a, b, op, mu, nu)
        mu_new, nu_new = 1 + g1, g2
        res = float(max(np.max(np.abs(mu_new - mu)), np.max(np.abs(nu_new - nu))))
        hist.append(res)
        mu, nu = mu_new, nu_new
        if not np.isfinite(res):
            break
        if res <= tol:
            ratios = [hist[i + 1] / hist[i] for i in range(len(hist) - 1) if hist[i] > 0]
            ratio = float(max(ratios)) if ratios else 0.0
            log.debug("dbar solve converged in %d iterations (ratio %.3f)", it, ratio)
            return DbarSolution(GridField(grid, mu), GridField(grid, nu), params, it, res, ratio,
                                tuple(hist))
    raise NoConvergence(f"no convergence after {max_iter} iterations (last step {hist[-1]:.3e})",
                        iterations=len(hist), residual=hist[-1])


# ---------------------------------------------------------------------------
# assembly and residuals


def reflect(fld: GridField) -> GridField:
    """fld(-conj k) on the same grid (exact index map)."""
    return GridField(fld.grid, fld.values[fld.grid.reflected_index()])


def assemble_phi_psi(sol: DbarSolution) -> tuple[GridField, GridField]:
    mu, nu = sol.mu, sol.nu
    phi = GridField(mu.grid, mu.values + reflect(nu).values)
    psi = GridField(mu.grid, nu.values + reflect(mu).values)
    return phi, psi


def _as_callable(c) -> Callable:
    if isinstance(c, GridField):
        return c.interpolate
    if callable(c):
        return lambda z: np.asarray(c(np.asarray(z, dtype=complex)), dtype=complex) * np.ones(np.shape(z))
    value = complex(c)
    return lambda z: np.full(np.shape(z), value, dtype=complex)


def _wirtinger(func: Callable, z: np.ndarray, h: float):
    """(d_z, d_zbar) of func at z by finite differences.

    Centred 4th-order stencils; where the x-stencil would cross Re k = 0
    a one-sided 2nd-order stencil pointing away from the axis is used.
    """
    f = func
    fy = (-f(z + 2j * h) + 8 * f(z + 1j * h) - 8 * f(z - 1j * h) + f(z - 2j * h)) / (12 * h)
    near = np.abs(z.real) < 2.5 * h
    fx = np.empty_like(fy)
    zc = z[~near]
    fx[~near] = (-f(zc + 2 * h) + 8 * f(zc + h) - 8 * f(zc - h) + f(zc - 2 * h)) / (12 * h)
    if np.any(near):
        zn = z[near]
        s = np.where(zn.real >= 0, 1.0, -1.0)
        fx[near] = s * (-3 * f(zn) + 4 * f(zn + s * h) - f(zn + 2 * s * h)) / (2 * h)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2


def default_residual_probes(grid: SpectralGrid, frac: float = 0.85, stride: int = 4) -> np.ndarray:
    """Every ``stride``-th radial ring of nodes inside frac * R, off the axis."""
    g = grid
    rows = np.arange(0, g.nr, stride)
    k = g.nodes.reshape(g.nr, g.na)[rows].ravel()
    return k[(np.abs(k) < frac * g.radius)]


def residual_of(candidate, F: ScatteringData, params: PhaseParams, probes=None,
                h: float | None = None, grid: SpectralGrid | None = None) -> float:
    """Sup norm of the defect of (mu, nu) in the dbar system.

    ``candidate`` is a pair of GridFields, callables of k, or constants.
    The defect is (-d_kbar mu + F(-conj k) e^{itS} nu, -d_k nu - F(k) e^{-itS} mu).
    """
    mu_c, nu_c = candidate
    if grid is None:
        grid = mu_c.grid if isinstance(mu_c, GridField) else DEFAULT_GRID
    z = default_residual_probes(grid) if probes is None else np.atleast_1d(np.asarray(probes, dtype=complex))
    if h is None:
        # resolve the phase: a small fraction of the local wavelength
        grad = 2 * np.max(np.abs(dS(z, params))) * params.t
        h = min(2e-3, 0.02 / max(grad, 1e-12))
    mu_f, nu_f = _as_callable(mu_c), _as_callable(nu_c)
    # keep stencils inside the disc for interpolated fields
    if isinstance(mu_c, GridField) or isinstance(nu_c, GridField):
        z = z[np.abs(z) + 3 * h < grid.radius]
    _, dbar_mu = _wirtinger(mu_f, z, h)
    d_nu, _ = _wirtinger(nu_f, z, h)
    e = np.exp(1j * params.t * np.real(phase_S(z, params)))
    r1 = -dbar_mu + F(-np.conj(z)) * e * nu_f(z)
    r2 = -d_nu - F(z) / e * mu_f(z)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
