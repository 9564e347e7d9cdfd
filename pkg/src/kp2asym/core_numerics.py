"""Complex-plane quadrature primitives.

Measure convention used everywhere: dm ^ dm-bar = -2i dkappa dlambda, so
the Cauchy-Green transform

    CG[g](z) = (-1/2 i pi) iint dm^dm-bar g(m) / (z - m)
             = (1/pi) iint g(m) / (z - m) dA

solves d/dz-bar CG[g] = g.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

from .errors import BudgetExceeded, ResolutionExceeded, TargetOutsideGrid, ValidationError

MEASURE = -2j  # dm ^ dm-bar in units of dA


# ---------------------------------------------------------------------------
# grids and fields


@dataclass(frozen=True)
class SpectralGrid:
    """Tensor polar grid: Gauss-Legendre in radius, half-step offset in angle.

    Nodes are stored radius-major, i.e. node ``i * na + a`` sits at radius
    ``r[i]`` and angle ``theta[a]``.
    """

    radius: float
    nr: int
    na: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("truncation radius must be positive")
        if self.nr < 8 or self.na < 8:
            raise ValidationError("need at least 8 radial and 8 angular nodes")
        if self.na % 4:
            # keeps the grid invariant under k -> -conj(k) and off the axis
            raise ValidationError("angular node count must be a multiple of 4")

    @cached_property
    def _radial(self):
        x, w = roots_legendre(self.nr)
        return 0.5 * self.radius * (x + 1), 0.5 * self.radius * w

    @property
    def r(self) -> np.ndarray:
        return self._radial[0]

    @property
    def theta(self) -> np.ndarray:
        return (np.arange(self.na) + 0.5) * (2 * np.pi / self.na)

    @cached_property
    def nodes(self) -> np.ndarray:
        return (self.r[:, None] * np.exp(1j * self.theta)[None, :]).ravel()

    @cached_property
    def weights(self) -> np.ndarray:
        r, wr = self._radial
        return np.repeat(wr * r * (2 * np.pi / self.na), self.na)

    @property
    def size(self) -> int:
        return self.nr * self.na

    def reflected_index(self) -> np.ndarray:
        """Index map of k -> -conj(k); exact because na is even."""
        a = np.arange(self.na)
        ref = (self.na // 2 - 1 - a) % self.na
        i = np.arange(self.nr)
        return (i[:, None] * self.na + ref[None, :]).ravel()

    def spacing(self) -> float:
        """Largest local node spacing (radial or arc)."""
        dr = np.max(np.diff(np.concatenate([[0.0], self.r, [self.radius]])))
        return max(dr, self.radius * 2 * np.pi / self.na)


@dataclass(frozen=True)
class GridField:
    grid: SpectralGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).ravel()
        if vals.size != self.grid.size:
            raise ValidationError("field length does not match the grid")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("field contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: SpectralGrid, func: Callable) -> "GridField":
        return cls(grid, func(grid.nodes))

    def as_matrix(self) -> np.ndarray:
        return self.values.reshape(self.grid.nr, self.grid.na)

    def conj(self) -> "GridField":
        return GridField(self.grid, np.conj(self.values))

    def integral(self) -> complex:
        """iint values dA (plain area measure)."""
        return complex(np.sum(self.values * self.grid.weights))

    def interpolate(self, z) -> np.ndarray:
        """Evaluate the field off-grid: Fourier in angle, Lagrange in radius."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g = self.grid
        modes = _angular_modes(self.as_matrix())
        n = np.fft.fftfreq(g.na, 1.0 / g.na)
        rho = np.abs(z)
        if np.any(rho > g.radius * (1 + 1e-12)):
            raise TargetOutsideGrid("interpolation point outside the grid")
        L = _lagrange_matrix(g.r, g.radius, rho)  # (len z, nr)
        radial = L @ modes  # (len z, na)
        phase = np.exp(1j * np.outer(np.angle(z), n))
        return np.sum(radial * phase, axis=1)


# ---------------------------------------------------------------------------
# KP2GRID text format


def write_kp2grid(path, fld: GridField) -> None:
    g = fld.grid
    with open(path, "w") as fh:
        fh.write(f"KP2GRID v1 R={float(g.radius)!r} NR={g.nr} NA={g.na}\n")
        for node, val in zip(g.nodes, fld.values):
            fh.write(f"{float(node.real)!r} {float(node.imag)!r} {float(val.real)!r} {float(val.imag)!r}\n")


def read_kp2grid(path) -> GridField:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[:2] != ["KP2GRID", "v1"]:
            raise ValidationError(f"{path}: not a KP2GRID v1 file")
        meta = dict(tok.split("=", 1) for tok in header[2:])
        grid = SpectralGrid(float(meta["R"]), int(meta["NR"]), int(meta["NA"]))
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (grid.size, 4):
        raise ValidationError(f"{path}: expected {grid.size} rows of 4 columns")
    if np.max(np.abs(data[:, 0] + 1j * data[:, 1] - grid.nodes)) > 1e-9 * grid.radius:
        raise ValidationError(f"{path}: node coordinates do not match the header grid")
    return GridField(grid, data[:, 2] + 1j * data[:, 3])


# ---------------------------------------------------------------------------
# Cauchy-Green transform on the polar grid


def _angular_modes(mat: np.ndarray) -> np.ndarray:
    """c_n(r_i) = (1/na) sum_a f(r_i, theta_a) exp(-i n theta_a), FFT order."""
    na = mat.shape[-1]
    n = np.fft.fftfreq(na, 1.0 / na)
    return np.fft.fft(mat, axis=-1) / na * np.exp(-1j * n * np.pi / na)


def _from_modes(modes: np.ndarray) -> np.ndarray:
    na = modes.shape[-1]
    n = np.fft.fftfreq(na, 1.0 / na)
    return np.fft.ifft(modes * np.exp(1j * n * np.pi / na), axis=-1) * na


def _lagrange_matrix(r_nodes: np.ndarray, radius: float, x: np.ndarray) -> np.ndarray:
    """Barycentric Lagrange basis of the radial Gauss nodes evaluated at x."""
    t = 2 * np.asarray(r_nodes) / radius - 1
    _, w = roots_legendre(len(t))
    lam = (-1.0) ** np.arange(len(t)) * np.sqrt((1 - t**2) * w)
    s = 2 * np.asarray(x, dtype=float) / radius - 1
    diff = s[:, None] - t[None, :]
    hit = np.isclose(diff, 0.0, atol=1e-15)
    diff[hit] = 1.0
    c = lam[None, :] / diff
    out = c / np.sum(c, axis=1, keepdims=True)
    rows = np.any(hit, axis=1)
    out[rows] = hit[rows].astype(float)
    # beyond the interval the interpolant is meaningless; callers zero it
    out[(s > 1 + 1e-12) | (s < -1 - 1e-12)] = 0.0
    return out


class CauchyGreenOperator:
    """Cauchy-Green transform on a polar grid via angular Laurent modes.

    Writing the field as sum_n c_n(r) e^{i n theta}, the kernel 1/(z-m)
    expands in powers of r/|z| (inside) or |z|/r (outside), so each output
    mode is a one-dimensional radial integral split exactly at |z|.  The
    partial radial integrals use Gauss rules on [0, |z|] and [|z|, R] with
    the mode coefficients interpolated from the radial nodes.  The kernel
    singularity is therefore integrated exactly, with no local patch.
    """

    def __init__(self, grid: SpectralGrid):
        self.grid = grid
        self.kmax = grid.na // 2
        self._q = grid.nr // 2 + grid.na // 4 + 8
        self._p_in, self._p_out = self._radial_matrices(grid.r)

    def _radial_matrices(self, rho: np.ndarray):
        g = self.grid
        xq, wq = roots_legendre(self._q)
        k = np.arange(self.kmax)
        p_in = np.zeros((self.kmax, len(rho), g.nr))
        p_out = np.zeros((self.kmax, len(rho), g.nr))
        for i, rh in enumerate(rho):
            a = min(rh, g.radius)
            if a > 0:
                rq = 0.5 * a * (xq + 1)
                w = 0.5 * a * wq
                pw = (rq[None, :] / rh) ** (k[:, None] + 1) * w[None, :]
                p_in[:, i, :] = pw @ _lagrange_matrix(g.r, g.radius, rq)
            if rh < g.radius:
                rq = rh + 0.5 * (g.radius - rh) * (xq + 1)
                w = 0.5 * (g.radius - rh) * wq
                pw = (rh / rq[None, :]) ** k[:, None] * w[None, :]
                p_out[:, i, :] = pw @ _lagrange_matrix(g.r, g.radius, rq)
        return p_in, p_out

    def _apply_modes(self, modes: np.ndarray, p_in, p_out) -> np.ndarray:
        """modes: (nr, na) FFT-ordered input; returns output modes (len rho, na)."""
        K = self.kmax
        na = self.grid.na
        k = np.arange(K)
        c_neg = modes[:, (-k) % na].T  # (K, nr): c_{-k}
        c_pos = modes[:, (k[: K - 1] + 1)].T  # (K-1, nr): c_{k+1}
        a_k = np.einsum("kij,kj->ki", p_in, c_neg)
        b_k = np.einsum("kij,kj->ki", p_out[: K - 1], c_pos)
        out = np.zeros((p_in.shape[1], na), dtype=complex)
        out[:, (-(k + 1)) % na] = 2 * a_k.T
        out[:, k[: K - 1]] = -2 * b_k.T
        return out

    def apply(self, values, kernel_side: str = "holomorphic") -> np.ndarray:
        """Transform sampled at every grid node (flat array in node order)."""
        vals = np.asarray(values, dtype=complex).reshape(self.grid.nr, self.grid.na)
        if kernel_side == "antiholomorphic":
            return np.conj(self.apply(np.conj(vals), "holomorphic"))
        if kernel_side != "holomorphic":
            raise ValidationError(f"unknown kernel side {kernel_side!r}")
        modes = _angular_modes(vals)
        return _from_modes(self._apply_modes(modes, self._p_in, self._p_out)).ravel()

    def at(self, values, target: complex, kernel_side: str = "holomorphic") -> complex:
        g = self.grid
        target = complex(target)
        if not np.isfinite(target):
            raise ValidationError("target must be finite")
        if abs(target) > 2 * g.radius:
            raise TargetOutsideGrid(f"|target| = {abs(target):.3g} exceeds 2R = {2 * g.radius:.3g}")
        vals = np.asarray(values, dtype=complex).reshape(g.nr, g.na)
        if kernel_side == "antiholomorphic":
            return np.conj(self.at(np.conj(vals), target, "holomorphic"))
        rho = abs(target)
        if rho < 1e-14:
            # at z = 0 the kernel is -1/m, which picks out mode +1
            modes = _angular_modes(vals)
            return complex(-2 * np.sum(g._radial[1] * modes[:, 1]))
        p_in, p_out = self._radial_matrices(np.array([rho]))
        out = self._apply_modes(_angular_modes(vals), p_in, p_out)[0]
        n = np.fft.fftfreq(g.na, 1.0 / g.na)
        return complex(np.sum(out * np.exp(1j * n * np.angle(target))))


_CG_CACHE: dict = {}


def cg_operator(grid: SpectralGrid) -> CauchyGreenOperator:
    op = _CG_CACHE.get(grid)
    if op is None:
        op = _CG_CACHE[grid] = CauchyGreenOperator(grid)
    return op


def cauchy_green(fld: GridField, target: complex, kernel_side: str = "holomorphic") -> complex:
    """(-1/2 i pi) iint dm^dm-bar field(m)/(target - m), or the conjugate kernel."""
    return cg_operator(fld.grid).at(fld.values, target, kernel_side)


# ---------------------------------------------------------------------------
# oscillatory quadrature


def gauss_panels(a: float, b: float, npanel: int, order: int = 16):
    x, w = roots_legendre(order)
    edges = np.linspace(a, b, npanel + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def adaptive_panels(edges: Sequence[float], density: Callable, order: int = 16,
                    fine: int = 20001) -> tuple[np.ndarray, np.ndarray]:
    """Gauss panels whose local count follows ``density`` (panels per unit length).

    ``edges`` are forced breakpoints; between them panel edges come from
    inverting the cumulative density on a fine sampling.
    """
    x, w = roots_legendre(order)
    cuts = [float(edges[0])]
    for a, b in zip(edges[:-1], edges[1:]):
        s = np.linspace(a, b, fine)
        d = np.asarray(density(s), float) + 1.0 / max(b - a, 1e-300)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(s))])
        n = max(1, int(np.ceil(cum[-1])))
        cuts.extend(np.interp(np.linspace(0, cum[-1], n + 1), cum, s)[1:])
    cuts = np.asarray(cuts)
    lo, hi = cuts[:-1], cuts[1:]
    nodes = (0.5 * (hi - lo)[:, None] * x[None, :] + 0.5 * (hi + lo)[:, None]).ravel()
    weights = (0.5 * (hi - lo)[:, None] * w[None, :]).ravel()
    return nodes, weights


def _phase_gradient_bound(phase: Callable, radius: float, probes: int = 256) -> float:
    """Max |grad phase| over the disc, estimated on rings and by central differences."""
    rings = np.linspace(0.05, 1.0, 12) * radius
    ang = (np.arange(probes) + 0.5) * 2 * np.pi / probes
    z = (rings[:, None] * np.exp(1j * ang)[None, :]).ravel()
    h = 1e-6 * max(radius, 1.0)
    gx = (np.real(phase(z + h)) - np.real(phase(z - h))) / (2 * h)
    gy = (np.real(phase(z + 1j * h)) - np.real(phase(z - 1j * h))) / (2 * h)
    return float(np.max(np.hypot(gx, gy)))


def oscillatory_integral_2d(amplitude: Callable, phase: Callable, grid: SpectralGrid,
                            t: float, cap: int = 4_000_000, order: int = 16) -> complex:
    """iint_{|k|<R} amplitude(k) exp(i t phase(k)) dkappa dlambda.

    Gauss panels in radius and in angle (the angle split at the imaginary
    axis so one-sided discontinuities of the amplitude are respected).
    Panels are sized so that at least 8 nodes fall in every oscillation at
    the grid edge; if that needs more than ``cap`` nodes the call fails.
    """
    if not t > 0:
        raise ValidationError("t must be positive")
    R = grid.radius
    kmax = t * _phase_gradient_bound(phase, R)
    n_rad = max(grid.nr, int(np.ceil(8 * kmax * R / (2 * np.pi))) + order)
    n_ang = max(grid.na, int(np.ceil(8 * kmax * np.pi * R / (2 * np.pi))) + 2 * order)
    if n_rad * n_ang > cap:
        raise ResolutionExceeded(
            f"needs about {n_rad * n_ang:.3g} nodes (cap {cap}); raise the cap, lower t or shrink R")
    rr, wr = gauss_panels(0.0, R, max(1, -(-n_rad // order)), order)
    half = max(1, -(-n_ang // (2 * order)))
    a1, w1 = gauss_panels(-np.pi / 2, np.pi / 2, half, order)
    a2, w2 = gauss_panels(np.pi / 2, 3 * np.pi / 2, half, order)
    aa = np.concatenate([a1, a2])
    wa = np.concatenate([w1, w2])
    e = np.exp(1j * aa)
    total = 0j
    chunk = max(1, 2_000_000 // len(aa))
    for s in range(0, len(rr), chunk):
        r = rr[s:s + chunk, None]
        z = r * e[None, :]
        vals = amplitude(z) * np.exp(1j * t * np.real(phase(z)))
        total += np.sum(vals * (wr[s:s + chunk, None] * r) * wa[None, :])
    return complex(total)


# ---------------------------------------------------------------------------
# damped polar quadrature (used for non-decaying oscillatory plane integrals)


def damped_polar_integral(integrand: Callable, center: complex, eps: float, phase_scale: Callable,
                          tail: float = 36.0, order: int = 16, cap: int = 40_000_000,
                          domain: Callable | None = None) -> complex:
    """iint integrand(n) exp(-eps |n|^2) dA, in polar coordinates about ``center``.

    ``integrand`` receives (n, rho, phi) so a kernel singular at the center
    can absorb the Jacobian.  ``phase_scale(R)`` bounds |grad phase| on a
    disc of radius R and sets the resolution.  ``domain`` optionally masks
    nodes (half-plane integrals).
    """
    R = np.sqrt(tail / eps) + abs(center)
    kmax = phase_scale(R)
    n_rad = int(np.ceil(8 * kmax * R / (2 * np.pi))) + 4 * order
    n_ang = int(np.ceil(8 * kmax * 2 * np.pi * R / (2 * np.pi))) + 4 * order
    if n_rad * n_ang > cap:
        raise BudgetExceeded(f"damped quadrature needs {n_rad * n_ang:.3g} nodes (cap {cap})")
    rr, wr = gauss_panels(0.0, R, -(-n_rad // order), order)
    aa, wa = gauss_panels(0.0, 2 * np.pi, -(-n_ang // order), order)
    e = np.exp(1j * aa)
    total = 0j
    chunk = max(1, 4_000_000 // len(aa))
    for s in range(0, len(rr), chunk):
        rho = rr[s:s + chunk, None]
        n = center + rho * e[None, :]
        vals = integrand(n, rho, aa[None, :]) * np.exp(-eps * np.abs(n) ** 2)
        if domain is not None:
            vals = np.where(domain(n), vals, 0.0)
        total += np.sum(vals * wr[s:s + chunk, None] * wa[None, :])
    return complex(total)


def richardson_zero(xs: Sequence[float], ys: Sequence[complex]) -> tuple[complex, float]:
    """Polynomial extrapolation of y(x) to x = 0; returns (value, error estimate).

    The error estimate is the change when the coarsest sample is dropped.
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, complex)

    def extrap(x, y):
        V = np.vander(x, len(x), increasing=True)
        return np.linalg.solve(V, y)[0]

    full = extrap(xs, ys)
    if len(xs) > 2:
        order = np.argsort(xs)
        reduced = extrap(xs[order[:-1]], ys[order[:-1]])
        err = abs(full - reduced)
    else:
        err = abs(full - ys[np.argmin(xs)])
    return complex(full), float(err)


# ---------------------------------------------------------------------------
# nested (four-fold) oracle


DOMAINS = {
    "full": lambda z: np.ones(np.shape(z), dtype=bool),
    "Omega_plus": lambda z: np.real(z * np.exp(-1j * np.pi / 4)) > 0,
    "Omega_minus": lambda z: np.real(z * np.exp(-1j * np.pi / 4)) < 0,
}


def nested_oracle(outer_kernel: Callable, inner_kernel: Callable, outer_domain: str,
                  inner_domain: str, l: complex, *, radius: float = 6.0, n: int = 48,
                  eps: float = 0.2, budget: int = 2 * 10**9) -> complex:
    """Direct four-fold quadrature of

        (1/2 i pi) iint_outer dn^dn-bar outer(n)/(l - n)
            x (1/2 i pi) iint_inner dm^dm-bar inner(m)/conj(n - m)

    with Gaussian damping exp(-eps(|n|^2 + |m|^2)) on a disc of the given
    radius.  Both singular kernels are integrated in polar coordinates
    centred on the singular point (the Jacobian cancels them).  Cost is
    O(n^4); this is a brute-force oracle for small n only.
    """
    if outer_domain not in DOMAINS or inner_domain not in DOMAINS:
        raise ValidationError("domain must be full, Omega_plus or Omega_minus")
    if (n * n) ** 2 > budget:
        raise BudgetExceeded(f"{(n * n) ** 2:.3g} kernel evaluations exceed the oracle budget {budget:.3g}")
    rr, wr = gauss_panels(0.0, radius, max(1, n // 16), min(16, n))
    aa, wa = gauss_panels(0.0, 2 * np.pi, max(1, n // 16), min(16, n))
    e = np.exp(1j * aa)
    rho = rr[:, None]
    w2 = (wr[:, None] * wa[None, :]).ravel()
    in_dom = DOMAINS[inner_domain]
    out_dom = DOMAINS[outer_domain]

    def inner(npt):
        m = npt + rho * e[None, :]
        g = inner_kernel(m) * np.exp(-eps * np.abs(m) ** 2) * in_dom(m)
        # -(1/pi) iint g/conj(n-m) dA,  conj(n-m) = -rho e^{-i phi}
        return np.sum((g * e[None, :]).ravel() * w2) / np.pi

    npts = (l + rho * e[None, :]).ravel()
    vals = np.array([inner(p) for p in npts])
    g_out = outer_kernel(npts) * np.exp(-eps * np.abs(npts) ** 2) * out_dom(npts)
    # -(1/pi) iint h/(l-n) dA,  l-n = -rho e^{i phi}
    return complex(np.sum(g_out * vals * np.conj(np.tile(e, len(rr))) * w2) / np.pi)
