"""Leading-order matched asymptotics of the dbar solution (mu, nu).

Notation: h(k) = 4k^3 + xi k - i eta k^2, so d_k S = h'(k); a(k) = F(-conj k),
b(k) = F(k), E = exp(itS).  The system is d_kbar mu = a E nu,
d_k nu = -b conj(E) mu with (mu, nu) -> (1, 0).

External expansion (away from the stationary points k_j):

    nu ~ (1/t) [ b conj(E) / (i h') + nu0'(kbar) + nu0(kbar) ],
    mu ~ 1 + (1/t) mu1,        d_kbar mu1 = a b / (i h').

nu0' is the Cauchy integral along the imaginary axis that cancels the
jump of b/(i h'); nu0 holds the antiholomorphic poles fixed by matching.

Internal expansion near k_j, with l^2 = t (h(k) - h(k_j)) and
sigma_j = sqrt(h''_j / 2):

    nu ~ t^{-1/2} exp(-itS_j) Q_j(l),   d_l Q_j = -(b / sigma_j) exp(-i(l^2 + lbar^2)),
    mu ~ 1 + (1/t) M_j(l).

In the confluent regime p = t^{1/3}(k - k0) and nu ~ t^{-1/3} N(p), with N
written through the half-plane integrals W_plus.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import dawsn, wofz

from .core_numerics import gauss_panels
from .errors import ChartViolation, DegenerateRegime, RegimeMismatch
from .phase_geometry import (DEGENERATE_THETA, PhaseParams, confluent_phase_omega, dS,
                             phase_S, scaling_variable_l, stationary_points)
from .scattering import ScatteringData
from .special_integrals import (W_plus, appendix_A2_derived, fresnel_cauchy_K, halfplane_cauchy_I,
                                moments, n_hat)

log = logging.getLogger(__name__)

EXTERNAL_DISC = 3.0          # external coefficients need |k - k_j| >= 3 / sqrt(t |theta|)
CHART_FRACTION = 1.0 / 12    # internal charts end at |theta| / 12 (half the point separation)
CONFLUENT_ANNULUS = (2.0, 4.0)  # blending band in |p|


def _ones_like(k):
    return np.ones(np.shape(k), dtype=complex)


# ---------------------------------------------------------------------------
# Cauchy-Green transform of the smooth product f(-conj m) f(m)


def _phi_product(F: ScatteringData) -> Callable:
    return lambda m: F.f(-np.conj(m)) * F.f(m)


def _gaussian_fast_path(F: ScatteringData):
    c = F.params.get("center")
    if F.name != "gaussian" or c is None or "evolved" in F.params or complex(c).real != 0:
        return None
    A2 = F.params["amp"] ** 2
    c = complex(c)

    def cg(z):
        d = np.asarray(z, dtype=complex) - c
        x = 2 * np.abs(d) ** 2
        # (1 - exp(-2|d|^2)) / (2 d) = conj(d) (1 - e^{-x}) / x
        ratio = np.where(x > 1e-300, -np.expm1(-x) / np.where(x > 1e-300, x, 1.0), 1.0)
        return A2 * np.conj(d) * ratio

    return cg


def cg_smooth(func: Callable, z, radius: float, nrho: int = 96, nang: int = 64) -> np.ndarray:
    """(1/pi) iint func(m) / (z - m) dA for a smooth, decaying density.

    Polar coordinates about each target remove the kernel singularity:
    the integrand becomes -func(z + rho e^{ia}) e^{-ia} / pi.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ang = (np.arange(nang) + 0.5) * 2 * np.pi / nang
    e = np.exp(1j * ang)
    out = np.empty(z.shape, dtype=complex)
    for i, zi in enumerate(z.ravel()):
        top = abs(zi) + radius
        rho, w = gauss_panels(0.0, top, max(2, int(np.ceil(top / 1.5))), nrho // 6 or 16)
        vals = func(zi + rho[:, None] * e[None, :])
        out.ravel()[i] = -np.sum(w[:, None] * vals / e[None, :]) * (2 * np.pi / nang) / np.pi
    return out


class Mu1:
    """mu1 = CG[a b / (i h')] written through CG[phi], phi = f(-conj m) f(m).

    With 1/h'(m) = sum_j rho_j / (m - k_j) one has
    CG[phi / h'](z) = CG[phi](z) / h'(z) - sum_j rho_j CG[phi](k_j) / (z - k_j),
    so only the smooth transform CG[phi] is ever integrated.
    """

    def __init__(self, F: ScatteringData, params: PhaseParams):
        if abs(params.theta) < DEGENERATE_THETA:
            raise DegenerateRegime("mu1 needs separated stationary points")
        self.params = params
        sp = stationary_points(params)
        self.kj = np.array(sp.points)
        k1, k2 = self.kj
        self.rho = np.array([1 / (12 * (k1 - k2)), 1 / (12 * (k2 - k1))])
        fast = _gaussian_fast_path(F)
        phi = _phi_product(F)
        self.cg = fast or (lambda z: cg_smooth(phi, z, F.decay_radius))
        self.cg_at_k = self.cg(self.kj)
        self.phi_at_k = phi(self.kj)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        hp = dS(z, self.params)
        val = self.cg(z) / hp
        for r, k, c in zip(self.rho, self.kj, self.cg_at_k):
            val = val - r * c / (z - k)
        # a b = -phi, and a b/(i h') = -phi/(i h')
        return -val / 1j

    def regular_part(self, j: int, h: float = 1e-4) -> complex:
        """lim_{k -> k_j} [mu1(k) - R_j conj(d)/d], R_j = -phi_j / (i h''_j)."""
        kj = self.kj[j]
        st = np.array([-2, -1, 1, 2]) * h
        wts = np.array([1, -8, 8, -1]) / (12 * h)
        dx = np.sum(wts * self.cg(kj + st))
        dy = np.sum(wts * self.cg(kj + 1j * st))
        dz = (dx - 1j * dy) / 2
        other = sum(r / (kj - k) for i, (r, k) in enumerate(zip(self.rho, self.kj)) if i != j)
        return complex(-(self.rho[j] * dz + self.cg_at_k[j] * other) / 1j)


# ---------------------------------------------------------------------------
# jump compensation along the imaginary axis


def _gauss_cauchy(z):
    """C(z) = int exp(-x^2) / (x - z) dx (principal value for real z)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    up = z.imag > 0
    lo = z.imag < 0
    re = ~(up | lo)
    out[up] = 1j * np.pi * wofz(z[up])
    out[lo] = -1j * np.pi * np.conj(wofz(np.conj(z[lo])))
    out[re] = -2 * np.sqrt(np.pi) * dawsn(z[re].real)
    return out


def _gauss_cauchy_diff(a, w, r):
    """int exp(-(x-r)^2) / ((x - a)(x - w)) dx, stable as w -> a."""
    a = np.asarray(a, dtype=complex)
    w = np.asarray(w, dtype=complex)
    za = a - r
    zw = w - r
    near = np.abs(za - zw) < 1e-7 * (1 + np.abs(za))
    same = np.sign(za.imag) == np.sign(zw.imag)
    out = np.empty(np.broadcast(a, w).shape, dtype=complex)
    dq = ~(near & same)
    Ca = _gauss_cauchy(np.broadcast_to(za, out.shape)[dq])
    Cw = _gauss_cauchy(np.broadcast_to(zw, out.shape)[dq])
    out[dq] = (Ca - Cw) / (np.broadcast_to(za, out.shape)[dq] - np.broadcast_to(zw, out.shape)[dq])
    if np.any(~dq):
        zz = np.broadcast_to(zw, out.shape)[~dq]
        Cz = _gauss_cauchy(zz)
        out[~dq] = -2 * zz * Cz - 2 * np.sqrt(np.pi)   # C'(z)
    return out


class AxisJump:
    """nu0'(k) = (i / 2 pi) int J(s) / (s - i conj k) ds.

    J(s) = -2 f(is) / (i h'(is)) is the jump (right minus left) of
    b/(i h') at k = is; nu0' has the opposite jump and is antiholomorphic.
    Poles of J (roots of h'(is)) are removed with Gaussian-weighted simple
    poles whose Cauchy transforms are Faddeeva functions; on the axis the
    integral is a principal value.
    """

    def __init__(self, F: ScatteringData, params: PhaseParams, panels: int = 96, order: int = 16):
        self.F = F
        self.params = params
        self.L = F.decay_radius
        sp = stationary_points(params)
        poles, res = [], []
        if not sp.degenerate:
            for k, h2 in zip(sp.points, sp.hessians):
                s = -1j * k
                if abs(s.imag) < 1e-12 or F.has_continuation:
                    fval = F.f_real(0.0, s) if F.has_continuation else F.f(np.array([1j * s.real]))[0]
                    poles.append(complex(s.real, 0.0) if abs(s.imag) < 1e-12 else s)
                    res.append(complex(2 * fval / h2))
        self.poles = np.array(poles, dtype=complex)
        self.res = np.array(res, dtype=complex)
        edges = np.linspace(-self.L, self.L, panels + 1)
        for s in self.poles:
            edges = np.append(edges, np.clip(s.real + np.array([-0.5, -0.1, 0.1, 0.5]), -self.L, self.L))
        edges = np.unique(edges)
        xs, ws = [], []
        xg, wg = np.polynomial.legendre.leggauss(order)
        for a, b in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (b - a) * (xg + 1) + a)
            ws.append(0.5 * (b - a) * wg)
        self.s = np.concatenate(xs)
        self.w = np.concatenate(ws)
        self.Js = self._J_smooth(self.s)

    def J(self, s):
        s = np.asarray(s, dtype=float)
        return -2 * self.F.f(1j * s) / (1j * dS(1j * s, self.params))

    def _pole_part(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for p, r in zip(self.poles, self.res):
            out += r * np.exp(-(s - p.real) ** 2) / (s - p)
        return out

    def _J_smooth(self, s):
        s = np.asarray(s, dtype=float)
        J = self.J(s)
        if not len(self.poles):
            return J
        out = J - self._pole_part(s)
        # at a real pole the difference has a removable singularity
        for p in self.poles:
            if p.imag == 0:
                bad = np.abs(s - p.real) < 1e-9
                if np.any(bad):
                    out[bad] = self._J_smooth(s[bad] + 2e-9) / 2 + self._J_smooth(s[bad] - 2e-9) / 2
        return out

    def __call__(self, k, chunk: int = 4096):
        k = np.asarray(k, dtype=complex)
        flat = k.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for st in range(0, flat.size, chunk):
            w = 1j * np.conj(flat[st:st + chunk])
            sr = np.clip(w.real, -self.L, self.L)
            Jr = self._J_smooth(sr)
            den = self.s[None, :] - w[:, None]
            val = np.sum(self.w[None, :] * (self.Js[None, :] - Jr[:, None]) / den, axis=1)
            on = w.imag == 0
            logs = np.where(on, np.log(np.abs(self.L - w) / np.abs(-self.L - w)) + 0j,
                            np.log(self.L - w) - np.log(-self.L - w + 0j * w))
            val += Jr * logs
            for p, r in zip(self.poles, self.res):
                val += r * _gauss_cauchy_diff(p, w, p.real)
            out[st:st + chunk] = val
        return (1j / (2 * np.pi)) * out.reshape(k.shape)


# ---------------------------------------------------------------------------
# coefficient containers


@dataclass
class ExpansionCoefficients:
    regime: str
    external: dict = field(default_factory=dict)
    internal: list = field(default_factory=list)
    confluent: dict = field(default_factory=dict)


class ExternalExpansion:
    """External coefficients for the OscillatoryBulk and AxisStationary regimes."""

    def __init__(self, F: ScatteringData, params: PhaseParams):
        if params.regime == "Confluent":
            raise RegimeMismatch("external coefficients are for non-confluent parameters")
        self.F = F
        self.params = params
        self.t = params.t
        sp = stationary_points(params)
        self.kj = np.array(sp.points)
        self.h2 = np.array(sp.hessians)
        self.Sj = np.real(np.array(sp.phase_values))
        self.disc = EXTERNAL_DISC / np.sqrt(params.t * abs(params.theta))
        self.nu0_prime = AxisJump(F, params)
        self.mu1 = Mu1(F, params)
        self.bulk = params.regime == "OscillatoryBulk"

    def _check(self, k):
        d = np.min(np.abs(np.asarray(k)[..., None] - self.kj), axis=-1)
        if np.any(d < self.disc):
            raise ChartViolation(f"external coefficients used within {self.disc:.3g} of a stationary point")

    def nu1(self, k, check: bool = True):
        """b / (i h'), the slowly varying factor of the leading oscillatory term."""
        if check:
            self._check(k)
        k = np.asarray(k, dtype=complex)
        return self.F(k) / (1j * dS(k, self.params))

    def nu0(self, k):
        """Antiholomorphic poles at the off-axis stationary points (bulk regime only)."""
        k = np.asarray(k, dtype=complex)
        out = np.zeros(k.shape, dtype=complex)
        if not self.bulk:
            return out
        for kj, h2, Sj in zip(self.kj, self.h2, self.Sj):
            bj = self.F(np.array([kj]))[0]
            out -= np.exp(-1j * self.t * Sj) * bj / (abs(h2) * (np.conj(k) - np.conj(kj)))
        return out

    def nu(self, k, check: bool = True):
        k = np.asarray(k, dtype=complex)
        E = np.exp(1j * self.t * np.real(phase_S(k, self.params)))
        return (self.nu1(k, check) / E + self.nu0_prime(k) + self.nu0(k)) / self.t

    def mu(self, k, check: bool = True):
        if check:
            self._check(k)
        return 1 + self.mu1(k) / self.t

    def as_dict(self) -> dict:
        return {"nu1": self.nu1, "mu1": self.mu1, "nu0_prime": self.nu0_prime, "nu0": self.nu0}


class StationaryChart:
    """Internal expansion at one stationary point.

    mode 'bulk': point off the axis, Q = c K(l).
    mode 'axis_x': point on the axis with h'' in the upper half-plane; the
    axis maps to Re(l e^{-i pi/4}) = 0 and Q = c s K(l), s = sgn(-Re k).
    mode 'axis_y': the other axis point; the axis maps to
    Im(l e^{-i pi/4}) = 0 and Q is written with the half-plane transform I.
    """

    def __init__(self, F: ScatteringData, params: PhaseParams, j: int, mu1: Mu1):
        sp = stationary_points(params)
        self.F = F
        self.params = params
        self.j = j
        self.t = params.t
        self.kj = sp.points[j]
        self.h2 = sp.hessians[j]
        self.sigma = np.sqrt(self.h2 / 2)
        self.Sj = float(np.real(sp.phase_values[j]))
        self.radius = CHART_FRACTION * abs(params.theta)
        inner = EXTERNAL_DISC / np.sqrt(params.t * abs(params.theta))
        self.inner = inner if inner < 0.8 * self.radius else 0.5 * self.radius
        if params.regime == "OscillatoryBulk":
            self.mode = "bulk"
            b = F(np.array([self.kj]))[0]
            a = F(np.array([-np.conj(self.kj)]))[0]
            self.c = b / self.sigma
            self.kappa = a * self.c / np.conj(self.sigma)
        else:
            self.mode = "axis_x" if self.h2.imag > 0 else "axis_y"
            fj = F.f(np.array([self.kj]))[0]
            self.c = fj / self.sigma
            self.kappa = -fj * self.c / np.conj(self.sigma) if self.mode == "axis_x" else None
        self.C = mu1.regular_part(j)

    # -- variables
    def l(self, k):
        return scaling_variable_l(k, self.j, self.params, check=False)

    def weight(self, k):
        d = np.abs(np.asarray(k) - self.kj)
        return np.clip((self.radius - d) / (self.radius - self.inner), 0.0, 1.0)

    def _sign(self, k):
        return -np.sign(np.real(k)) if self.mode != "bulk" else np.ones(np.shape(k))

    # -- nu
    def Q(self, k):
        l = self.l(k)
        if self.mode == "bulk":
            return self.c * fresnel_cauchy_K(l)
        if self.mode == "axis_x":
            return self.c * self._sign(k) * fresnel_cauchy_K(l)
        lam = -1j * l
        cg = 1j * np.conj(1j * halfplane_cauchy_I(lam) / np.pi + fresnel_cauchy_K(np.conj(lam)))
        return -self.c * cg

    def Q_far(self, k):
        l = self.l(k)
        e = np.exp(-2j * np.real(l * l))
        sgn = 1.0 if self.mode == "axis_y" else -1.0
        return self.c * self._sign(k) * (e / (2j * l) + sgn / (2 * np.conj(l)))

    def nu(self, k):
        return np.exp(-1j * self.t * self.Sj) * self.Q(k) / np.sqrt(self.t)

    def nu_far(self, k):
        return np.exp(-1j * self.t * self.Sj) * self.Q_far(k) / np.sqrt(self.t)

    # -- mu
    def M(self, k):
        if self.kappa is None:
            raise ChartViolation("no internal mu correction at this axis point")
        l = self.l(k)
        cg = np.conj(l) * n_hat(l) + 0.5 * np.exp(2j * np.real(l * l))
        return self.kappa * cg + self.C

    def M_far(self, k):
        if self.kappa is None:
            raise ChartViolation("no internal mu correction at this axis point")
        l = self.l(k)
        return self.kappa * np.conj(l) / (2j * l) + self.C

    def mu(self, k):
        return 1 + self.M(k) / self.t

    def mu_far(self, k):
        return 1 + self.M_far(k) / self.t

    def has_internal_mu(self) -> bool:
        return self.kappa is not None

    def ode_residual(self, l0: complex, h: float = 1e-5) -> float:
        """|d_l Q + (b/sigma) exp(-i(l^2+lbar^2))| at l0 by central differences in k."""
        # move in k so that l changes by about h
        dk = h / (np.sqrt(self.t) * abs(self.sigma))
        k0 = self._k_of_l(l0)
        f = self.Q
        fx = (f(np.array([k0 + dk])) - f(np.array([k0 - dk]))) / (2 * dk)
        fy = (f(np.array([k0 + 1j * dk])) - f(np.array([k0 - 1j * dk]))) / (2 * dk)
        dk_Q = (fx - 1j * fy)[0] / 2
        l = self.l(np.array([k0]))[0]
        dl_dk = self.t * dS(k0, self.params) / (2 * l)
        if self.mode == "bulk":
            b = self.F(np.array([self.kj]))[0]
        else:
            b = self._sign(k0) * self.F.f(np.array([self.kj]))[0]
        rhs = -(b / self.sigma) * np.exp(-2j * np.real(l * l))
        return float(abs(dk_Q / dl_dk - rhs))

    def _k_of_l(self, l0: complex) -> complex:
        k = self.kj + l0 / (np.sqrt(self.t) * self.sigma)
        for _ in range(30):
            l = self.l(np.array([k]))[0]
            dl = self.t * dS(k, self.params) / (2 * l)
            step = (l - l0) / dl
            k = k - step
            if abs(step) < 1e-15:
                break
        return complex(k)


class ConfluentChart:
    """Internal expansion at the merged point k0 = i eta / 12."""

    def __init__(self, F: ScatteringData, params: PhaseParams):
        if params.regime != "Confluent":
            raise RegimeMismatch("confluent coefficients need |v| <= 2.3")
        self.F = F
        self.params = params
        self.t = params.t
        self.k0 = params.k0
        self.v2 = params.v_sq
        self.f0 = complex(F.f(np.array([self.k0]))[0])
        self.m = moments(self.v2)
        self.p_in, self.p_out = CONFLUENT_ANNULUS

    def p(self, k):
        return self.t ** (1 / 3) * (np.asarray(k, dtype=complex) - self.k0)

    def weight(self, k):
        pa = np.abs(self.p(k))
        return np.clip((self.p_out - pa) / (self.p_out - self.p_in), 0.0, 1.0)

    def _W_pair(self, p):
        Wp = W_plus(p, self.v2)
        Wm = np.conj(W_plus(-np.conj(p), self.v2))
        return Wp, Wm

    def N(self, k):
        """N_1(p) = -f0 (i / 2 pi) (W_minus - W_plus)."""
        ps = np.atleast_1d(self.p(k))
        out = np.empty(ps.shape, dtype=complex)
        for i, p in enumerate(ps.ravel()):
            Wp, Wm = self._W_pair(complex(p))
            out.ravel()[i] = -self.f0 * 1j * (Wm - Wp) / (2 * np.pi)
        return out.reshape(np.shape(k)) if np.ndim(k) else out[0]

    def N_far(self, k):
        ps = np.atleast_1d(self.p(k))
        out = np.empty(ps.shape, dtype=complex)
        for i, p in enumerate(ps.ravel()):
            p = complex(p)
            Wp = appendix_A2_derived(p, self.v2, "W")
            Wm = np.conj(appendix_A2_derived(-np.conj(p), self.v2, "W"))
            out.ravel()[i] = -self.f0 * 1j * (Wm - Wp) / (2 * np.pi)
        return out.reshape(np.shape(k)) if np.ndim(k) else out[0]

    def nu(self, k):
        return self.N(k) / self.t ** (1 / 3)

    def nu_far(self, k):
        return self.N_far(k) / self.t ** (1 / 3)

    # antiholomorphic external pieces fixed by the far field of N
    def n01(self, k):
        """Coefficient of t^{-2/3}: (i f0 / pi) Re(psi00_minus) / (kbar - conj k0)."""
        d = np.conj(np.asarray(k, dtype=complex) - self.k0)
        return 1j * self.f0 * self.m.psi_00_minus.real / np.pi / d

    def n02(self, k):
        """Coefficient of t^{-1}, including the jump-compensating pi/12 term."""
        k = np.asarray(k, dtype=complex)
        d = np.conj(k - self.k0)
        ps = self.m.psi_01_minus
        jump = 2 * np.pi * np.sign(np.real(k)) / 12
        return -1j * self.f0 / (2 * np.pi) * (np.conj(ps) - ps + jump) / d**2

    def ode_residual(self, p0: complex, h: float = 1e-4) -> float:
        """|d_p N + sgn(-Re p) f0 exp(-i omega(p))| by central differences."""
        k0 = self.k0 + p0 / self.t ** (1 / 3)
        dk = h / self.t ** (1 / 3)
        vals = [self.N(np.array([k0 + s])) [0] for s in (dk, -dk, 1j * dk, -1j * dk)]
        dx = (vals[0] - vals[1]) / (2 * h)
        dy = (vals[2] - vals[3]) / (2 * h)
        dp = (dx - 1j * dy) / 2
        om = confluent_phase_omega(p0, np.sqrt(complex(self.v2)))
        rhs = -np.sign(-p0.real) * self.f0 * np.exp(-1j * om)
        return float(abs(dp - rhs))


class ConfluentExternal:
    """External expansion in the confluent regime: leading term plus matched poles."""

    def __init__(self, F: ScatteringData, params: PhaseParams, chart: ConfluentChart):
        self.F = F
        self.params = params
        self.t = params.t
        self.chart = chart
        self.mu1 = Mu1(F, params)

    def nu(self, k):
        k = np.asarray(k, dtype=complex)
        E = np.exp(1j * self.t * np.real(phase_S(k, self.params)))
        lead = self.F(k) / (1j * dS(k, self.params)) / E
        return lead / self.t + self.chart.n01(k) / self.t ** (2 / 3) + self.chart.n02(k) / self.t

    def mu(self, k):
        return 1 + self.mu1(k) / self.t


# ---------------------------------------------------------------------------
# public operations


def external_coefficients(F: ScatteringData, params: PhaseParams) -> ExpansionCoefficients:
    ext = ExternalExpansion(F, params)
    return ExpansionCoefficients(params.regime, external=ext.as_dict())


def internal_coefficients(F: ScatteringData, params: PhaseParams, j: int) -> ExpansionCoefficients:
    if params.regime == "Confluent":
        raise RegimeMismatch("use confluent_coefficients for merged stationary points")
    chart = StationaryChart(F, params, j, Mu1(F, params))

    def N1(l):
        # Q as a function of the scaled variable, through the inverse map
        l = np.atleast_1d(np.asarray(l, dtype=complex))
        return np.array([chart.Q(np.array([chart._k_of_l(x)]))[0] for x in l.ravel()]).reshape(l.shape)

    def M1(l):
        l = np.atleast_1d(np.asarray(l, dtype=complex))
        return np.array([chart.M(np.array([chart._k_of_l(x)]))[0] for x in l.ravel()]).reshape(l.shape)

    return ExpansionCoefficients(params.regime, internal=[{"N1": N1, "M1": M1, "C": chart.C,
                                                           "chart": chart}])


def confluent_coefficients(F: ScatteringData, params: PhaseParams) -> ExpansionCoefficients:
    chart = ConfluentChart(F, params)
    ext = ConfluentExternal(F, params, chart)
    return ExpansionCoefficients(params.regime, confluent={
        "N_script_1": chart.N, "m1": ext.mu1, "n0_1": chart.n01, "n0_2": chart.n02, "chart": chart})


@dataclass
class UniformAsymptote:
    """Composite mu_hat = ext + sum_j chi_j (int_j - far_j), likewise nu_hat.

    chi_j is 1 inside the inner radius of chart j and falls linearly to 0 at
    its outer radius; far_j is the internal solution's large-argument form,
    which is what the external expansion reduces to near k_j.
    """

    params: PhaseParams
    regime: str
    order_tag: str
    external: object = None
    charts: list = field(default_factory=list)
    zero: bool = False

    @property
    def order_magnitude(self) -> float:
        if self.regime == "Confluent":
            return 1.0 / self.params.t
        return 1.0 / (self.params.t * abs(self.params.theta))

    def _blend(self, k, ext_fn, int_fn, far_fn):
        k = np.asarray(k, dtype=complex)
        out = ext_fn(k)
        for ch in self.charts:
            w = ch.weight(k)
            live = w > 0
            if np.any(live):
                kl = k[live]
                inner = int_fn(ch, kl)
                far = far_fn(ch, kl)
                if far is None:
                    continue
                out = out.astype(complex)
                out[live] += w[live] * (inner - far)
        return out

    def nu_hat(self, k):
        k = np.asarray(k, dtype=complex)
        if self.zero:
            return np.zeros(k.shape, dtype=complex)
        return self._blend(k, self._ext_nu, lambda c, x: c.nu(x), lambda c, x: c.nu_far(x))

    def mu_hat(self, k):
        k = np.asarray(k, dtype=complex)
        if self.zero:
            return _ones_like(k)
        return self._blend(k, self._ext_mu, _chart_mu, _chart_mu_far)

    def _ext_nu(self, k):
        if isinstance(self.external, ExternalExpansion):
            return self.external.nu(k, check=False)
        return self.external.nu(k)

    def _ext_mu(self, k):
        if isinstance(self.external, ExternalExpansion):
            return self.external.mu(k, check=False)
        return self.external.mu(k)

    def charts_used(self, k) -> list:
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        used = ["external"]
        for i, ch in enumerate(self.charts):
            if np.any(ch.weight(k) > 0):
                used.append(f"internal[{i}]" if not isinstance(ch, ConfluentChart) else "confluent")
        return used

    def seam_points(self, chart, n: int = 12) -> np.ndarray:
        ang = (np.arange(n) + 0.25) * 2 * np.pi / n
        if isinstance(chart, ConfluentChart):
            rad = np.array([chart.p_in, 0.5 * (chart.p_in + chart.p_out), chart.p_out]) / self.params.t ** (1 / 3)
            center = chart.k0
        else:
            rad = np.array([chart.inner, 0.5 * (chart.inner + chart.radius), chart.radius])
            center = chart.kj
        pts = (center + rad[:, None] * np.exp(1j * ang)[None, :]).ravel()
        return pts[np.abs(pts.real) > 1e-9]

    def seam_jumps(self, n: int = 12) -> list[dict]:
        """Mismatch between internal and external forms over each blending annulus."""
        out = []
        for i, ch in enumerate(self.charts):
            z = self.seam_points(ch, n)
            dnu = float(np.max(np.abs(ch.nu(z) - self._ext_nu(z))))
            if isinstance(ch, ConfluentChart) or not ch.has_internal_mu():
                dmu = 0.0
                mu_tested = False
            else:
                dmu = float(np.max(np.abs(ch.mu(z) - self._ext_mu(z))))
                mu_tested = True
            out.append({"chart": i, "nu_jump": dnu, "mu_jump": dmu, "mu_tested": mu_tested,
                        "order": self.order_magnitude,
                        "ratio": max(dnu, dmu) / self.order_magnitude})
        return out


def _chart_mu(ch, k):
    if isinstance(ch, ConfluentChart):
        return np.zeros(k.shape, dtype=complex)
    if not ch.has_internal_mu():
        return np.zeros(k.shape, dtype=complex)
    return ch.mu(k)


def _chart_mu_far(ch, k):
    if isinstance(ch, ConfluentChart) or not ch.has_internal_mu():
        return np.zeros(k.shape, dtype=complex)
    return ch.mu_far(k)


def uniform_composite(F: ScatteringData, params: PhaseParams) -> UniformAsymptote:
    if F.is_zero():
        return UniformAsymptote(params, params.regime, "exact", zero=True)
    if params.regime == "Confluent":
        chart = ConfluentChart(F, params)
        return UniformAsymptote(params, "Confluent", "O(t^{-1})", ConfluentExternal(F, params, chart), [chart])
    ext = ExternalExpansion(F, params)
    charts = [StationaryChart(F, params, j, ext.mu1) for j in range(2)]
    return UniformAsymptote(params, params.regime, "O(1/(t|theta|))", ext, charts)
