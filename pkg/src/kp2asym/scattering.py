"""Scattering data F(k) = sgn(-Re k) f(k) and the operations on it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .core_numerics import GridField, SpectralGrid, gauss_panels
from .errors import StepTooLarge, ValidationError


def sgn_minus_re(k) -> np.ndarray:
    """sgn(-Re k); zero exactly on the axis, which averages the two sides."""
    return -np.sign(np.real(k))


class ScatteringData:
    """Piecewise smooth scattering data.

    Parameters
    ----------
    f : callable
        Smooth part, vectorised over complex arrays.
    decay_radius : float
        Radius beyond which |f| is negligible (sets truncation radii).
    f_real : callable, optional
        f written as a function of the real pair (kappa, lambda), analytic
        in each argument, so quadrature can deform lambda into C.
    """

    def __init__(self, f: Callable, decay_radius: float = 6.0, f_real: Callable | None = None,
                 name: str = "custom", params: dict | None = None):
        self.f = f
        self.decay_radius = float(decay_radius)
        self._f_real = f_real
        self.name = name
        self.params = dict(params or {})

    def __call__(self, k):
        k = np.asarray(k, dtype=complex)
        return sgn_minus_re(k) * self.f(k)

    F = __call__

    def f_real(self, kappa, lam):
        if self._f_real is None:
            return self.f(np.asarray(kappa) + 1j * np.asarray(lam))
        return self._f_real(kappa, lam)

    @property
    def has_continuation(self) -> bool:
        return self._f_real is not None

    def is_zero(self) -> bool:
        return self.name == "zero"

    def scaled(self, c: float) -> "ScatteringData":
        fr = None if self._f_real is None else (lambda a, b: c * self._f_real(a, b))
        params = dict(self.params)
        if "amp" in params:
            params["amp"] = params["amp"] * c
        return ScatteringData(lambda k: c * self.f(k), self.decay_radius, fr, self.name, params)

    def __repr__(self):
        return f"ScatteringData({self.name}, {self.params})"


def zero_data() -> ScatteringData:
    return ScatteringData(lambda k: np.zeros(np.shape(k), dtype=complex), 1.0,
                          lambda a, b: np.zeros(np.broadcast(a, b).shape, dtype=complex), "zero")


def gaussian_family(amp: float = 1 / np.sqrt(np.pi), center: complex = 0j) -> ScatteringData:
    """F(k) = A sgn(-Re k) exp(-|k - c|^2).

    Symmetric (F(-conj k) = -conj F(k)) exactly when A is real and c is
    purely imaginary.
    """
    c = complex(center)
    A = amp

    def f(k):
        return A * np.exp(-np.abs(np.asarray(k) - c) ** 2) + 0j

    def fr(kappa, lam):
        return A * np.exp(-(kappa - c.real) ** 2 - (lam - c.imag) ** 2) + 0j

    radius = abs(c) + np.sqrt(40.0)
    return ScatteringData(f, radius, fr, "gaussian", {"amp": A, "center": c})


# ---------------------------------------------------------------------------
# Born approximation


@dataclass(frozen=True)
class InitialCondition:
    u0: Callable  # (x, y) -> real
    support_radius: float


def _born_nodes(u0: InitialCondition, n: int = 64):
    R = u0.support_radius
    x, w = gauss_panels(-R, R, 4, n // 4)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    vals = np.asarray(u0.u0(X, Y), dtype=float) * W
    keep = vals != 0
    return X[keep], Y[keep], vals[keep]


def born_smooth_part(u0: InitialCondition, n: int = 64) -> ScatteringData:
    """First Born iterate: f(k) = (1/2pi) iint u0 exp(-i(k+kbar)x - (k^2-kbar^2)y).

    Only exact in the small-amplitude limit.  In real coordinates the
    exponent is -i(2 kappa x + 4 kappa lambda y), entire in (kappa, lambda).
    """
    X, Y, W = _born_nodes(u0, n)

    def fr(kappa, lam):
        kappa = np.asarray(kappa)
        lam = np.asarray(lam)
        shape = np.broadcast(kappa, lam).shape
        a = np.broadcast_to(kappa, shape).ravel()
        b = np.broadcast_to(lam, shape).ravel()
        out = np.empty(a.size, dtype=complex)
        step = max(1, 2_000_000 // max(1, X.size))
        for s in range(0, a.size, step):
            ph = -1j * (2 * a[s:s + step, None] * X[None, :] + 4 * a[s:s + step, None] * b[s:s + step, None] * Y[None, :])
            out[s:s + step] = np.exp(ph) @ W / (2 * np.pi)
        return out.reshape(shape)

    def f(k):
        k = np.asarray(k, dtype=complex)
        return fr(k.real, k.imag)

    # |f| decays like the Fourier transform of u0; a generous fixed radius
    return ScatteringData(f, 8.0, fr, "born", {"support_radius": u0.support_radius})


def born_transform(u0: InitialCondition, k, n: int = 64):
    """F(k) from the first Born iterate, sgn factor included."""
    return born_smooth_part(u0, n)(k)


# ---------------------------------------------------------------------------
# norms and symmetry


def _restriction_at(F: ScatteringData, z: np.ndarray, nrho: int = 96, nphi: int = 96) -> np.ndarray:
    # polar coordinates about z: |F|/|k - z| dA = |f| drho dphi
    R = F.decay_radius
    out = np.empty(len(z))
    phi = (np.arange(nphi) + 0.5) * 2 * np.pi / nphi
    e = np.exp(1j * phi)
    for i, zi in enumerate(z):
        rr, wr = gauss_panels(0.0, R + abs(zi), 6, nrho // 6)
        k = zi + rr[:, None] * e[None, :]
        out[i] = np.sum(np.abs(F.f(k)) * wr[:, None]) * (2 * np.pi / nphi)
    return out


def check_restriction(F: ScatteringData, grid: SpectralGrid | None = None, n_random: int = 64,
                      seed: int = 0) -> float:
    """sup_z iint |F(k)| / |k - z| dkappa dlambda over grid nodes plus random probes.

    Compare the result with 2 pi.
    """
    if F.is_zero():
        return 0.0
    R = F.decay_radius
    grid = grid or SpectralGrid(min(R, 4.0), 8, 16)
    rng = np.random.default_rng(seed)
    rad = R * np.sqrt(rng.uniform(0, 1, n_random)) * 0.5
    z = np.concatenate([grid.nodes, rad * np.exp(2j * np.pi * rng.uniform(0, 1, n_random))])
    center = F.params.get("center")
    if center is not None:
        z = np.concatenate([z, [complex(center)]])
    return float(np.max(_restriction_at(F, z)))


def evolve(F: ScatteringData, t: float) -> ScatteringData:
    """Multiply by the unimodular factor exp(4it(k^3 + kbar^3))."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0:
        return F
    base = F

    def f(k):
        k = np.asarray(k, dtype=complex)
        return base.f(k) * np.exp(4j * t * np.real(2 * k**3))

    def fr(kappa, lam):
        # k^3 + kbar^3 = 2 kappa^3 - 6 kappa lambda^2
        return base.f_real(kappa, lam) * np.exp(4j * t * (2 * kappa**3 - 6 * kappa * lam**2))

    params = dict(F.params, evolved=F.params.get("evolved", 0.0) + t)
    return ScatteringData(f, F.decay_radius, fr if F.has_continuation else None, F.name, params)


def default_probes(F: ScatteringData, n: int = 200, seed: int = 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    R = min(F.decay_radius, 4.0)
    z = rng.uniform(-R, R, n) + 1j * rng.uniform(-R, R, n)
    return z[np.real(z) != 0]


def symmetry_defect(F: ScatteringData, probes=None) -> float:
    """max |F(-conj k) + conj F(k)| over probe points."""
    k = default_probes(F) if probes is None else np.asarray(probes, dtype=complex)
    return float(np.max(np.abs(F(-np.conj(k)) + np.conj(F(k)))))


# ---------------------------------------------------------------------------
# one-sided Taylor coefficients at the imaginary axis


TAYLOR_KEYS = ("f00", "f10", "f01", "f20", "f02", "f11")


@dataclass(frozen=True)
class TaylorCoefficients:
    """f_ab = f1_ab + sgn(-Re k) f2_ab near a point of the imaginary axis."""

    f1: dict
    f2: dict
    k0: complex
    h: float

    def as_dict(self) -> dict:
        out = {}
        for key in TAYLOR_KEYS:
            out[f"{key}_1"] = self.f1[key]
            out[f"{key}_2"] = self.f2[key]
        return out


def _one_sided_fit(f: Callable, k0: complex, h: float, side: float) -> dict:
    """Least-squares quartic fit of f on a one-sided stencil; Wirtinger coefficients at k0."""
    xs = side * (np.arange(6) + 0.5) * h
    ys = np.arange(-3, 4) * h
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X = X.ravel()
    Y = Y.ravel()
    vals = f(k0 + X + 1j * Y)
    powers = [(p, q) for p in range(5) for q in range(5 - p)]
    A = np.stack([(X / h) ** p * (Y / h) ** q for p, q in powers], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    a = {pq: c / h ** (pq[0] + pq[1]) for pq, c in zip(powers, coef)}
    return {
        "f00": a[(0, 0)],
        "f10": (a[(1, 0)] - 1j * a[(0, 1)]) / 2,
        "f01": (a[(1, 0)] + 1j * a[(0, 1)]) / 2,
        "f20": (a[(2, 0)] - 1j * a[(1, 1)] - a[(0, 2)]) / 4,
        "f02": (a[(2, 0)] + 1j * a[(1, 1)] - a[(0, 2)]) / 4,
        "f11": (a[(2, 0)] + a[(0, 2)]) / 2,
    }


def taylor_extract(F: ScatteringData, k0: complex, h: float = 1e-2, tol: float = 1e-5) -> TaylorCoefficients:
    """One-sided Taylor sets of f at k0 on the imaginary axis.

    The left set (Re k < 0) equals f1 + f2, the right set f1 - f2.  A
    half-step rerun estimates the truncation error; StepTooLarge if it
    exceeds ``tol``.
    """
    k0 = complex(k0)
    if abs(k0.real) > 1e-12:
        raise ValidationError("k0 must lie on the imaginary axis")
    if abs(k0) + 8 * h > F.decay_radius:
        raise StepTooLarge("stencil leaves the truncation disc")
    left = _one_sided_fit(F.f, k0, h, -1.0)
    right = _one_sided_fit(F.f, k0, h, +1.0)
    left2 = _one_sided_fit(F.f, k0, h / 2, -1.0)
    right2 = _one_sided_fit(F.f, k0, h / 2, +1.0)
    scale = max(1.0, max(abs(v) for v in left.values()))
    err = max(max(abs(left[k] - left2[k]), abs(right[k] - right2[k])) for k in TAYLOR_KEYS)
    if err > tol * scale:
        raise StepTooLarge(f"Richardson estimate {err:.2e} exceeds tolerance {tol:.1e}; reduce h")
    f1 = {k: (left2[k] + right2[k]) / 2 for k in TAYLOR_KEYS}
    f2 = {k: (left2[k] - right2[k]) / 2 for k in TAYLOR_KEYS}
    return TaylorCoefficients(f1, f2, k0, h)
