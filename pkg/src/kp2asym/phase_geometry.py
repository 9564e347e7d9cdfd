"""Phase functions, stationary points and local scaling variables.

S(k) = 4(k^3 + kbar^3) + (k + kbar) xi - i(k^2 - kbar^2) eta = 2 Re h(k)
with h(k) = 4k^3 + xi k - i eta k^2, so d_k S = h'(k) and d_k^2 S = h''(k).
Around k0 = i eta/12 one has h(k) = h(k0) + 4 d^3 - (theta^2/12) d with
d = k - k0, which gives S(k0) = 0 and S(k1) = -theta^3/108 for real theta.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BranchAmbiguity, DegenerateHessian, DegenerateRegime, ValidationError

V_CONFLUENT = 2.3
DEGENERATE_THETA = 1e-4


@dataclass(frozen=True)
class PhaseParams:
    xi: float
    eta: float
    t: float = 1.0
    theta: complex = field(init=False)
    v: complex = field(init=False)
    z: float = field(init=False)
    regime: str = field(init=False)

    def __post_init__(self):
        if not self.t > 0:
            raise ValidationError("t must be positive")
        th = np.sqrt(complex(-12 * self.xi - self.eta**2))
        object.__setattr__(self, "theta", complex(th))
        object.__setattr__(self, "v", complex(self.t ** (1 / 3) * th / np.sqrt(12)))
        # z as printed in the confluent formula: 8(y^2/(12 t^{4/3}) + x/t^{1/3})
        object.__setattr__(self, "z", float(2 / 3 * self.t ** (2 / 3) * (12 * self.xi + self.eta**2)))
        object.__setattr__(self, "regime", classify(self.theta, self.t))

    @classmethod
    def from_xyt(cls, x: float, y: float, t: float) -> "PhaseParams":
        return cls(x / t, y / t, t)

    @property
    def theta_sq(self) -> float:
        return -12 * self.xi - self.eta**2

    @property
    def v_sq(self) -> float:
        """v^2 = t^{2/3} theta^2 / 12 (negative on the axis side)."""
        return float(self.t ** (2 / 3) * self.theta_sq / 12)

    @property
    def u_regime(self) -> str:
        """Regime label of the solution u: the axis side is where u decays."""
        return "Decay" if self.regime == "AxisStationary" else self.regime

    @property
    def k0(self) -> complex:
        return 1j * self.eta / 12

    def as_dict(self) -> dict:
        return {"xi": self.xi, "eta": self.eta, "t": self.t,
                "theta": [self.theta.real, self.theta.imag], "v": [self.v.real, self.v.imag],
                "z": self.z, "regime": self.regime, "u_regime": self.u_regime}


def classify(theta: complex, t: float) -> str:
    """Confluent if |v| <= 2.3, else by the sign of theta^2."""
    if abs(t ** (1 / 3) * theta / np.sqrt(12)) <= V_CONFLUENT:
        return "Confluent"
    return "OscillatoryBulk" if abs(theta.real) > abs(theta.imag) else "AxisStationary"


# ---------------------------------------------------------------------------
# phases


def h(k, params: PhaseParams):
    k = np.asarray(k, dtype=complex)
    return 4 * k**3 + params.xi * k - 1j * params.eta * k**2


def dS(k, params: PhaseParams):
    """d_k S = 12k^2 - 2i eta k + xi (holomorphic)."""
    k = np.asarray(k, dtype=complex)
    return 12 * k**2 - 2j * params.eta * k + params.xi


def d2S(k, params: PhaseParams):
    return 24 * np.asarray(k, dtype=complex) - 2j * params.eta


def phase_S(k, params: PhaseParams):
    """S(k), returned as a complex number with zero imaginary part."""
    k = np.asarray(k, dtype=complex)
    kb = np.conj(k)
    return 4 * (k**3 + kb**3) + (k + kb) * params.xi - 1j * (k**2 - kb**2) * params.eta


def phase_S_real(k, params: PhaseParams):
    return np.real(2 * h(k, params))


def phase_Phi(kappa, lam, params: PhaseParams):
    """Real-plane phase 8k^3 - 24k l^2 + 2k xi + 4k l eta."""
    return 8 * kappa**3 - 24 * kappa * lam**2 + 2 * kappa * params.xi + 4 * kappa * lam * params.eta


def confluent_phase_omega(p, v):
    p = np.asarray(p, dtype=complex)
    pb = np.conj(p)
    return 4 * (p**3 + pb**3) - v**2 * (p + pb)


# ---------------------------------------------------------------------------
# stationary points


@dataclass(frozen=True)
class StationaryPointSet:
    points: tuple
    hessians: tuple
    phase_values: tuple
    degenerate: bool


def _newton(k, params, steps=8):
    for _ in range(steps):
        g = dS(k, params)
        if abs(g) < 1e-15:
            break
        k = k - g / d2S(k, params)
    return complex(k)


def stationary_points(params: PhaseParams) -> StationaryPointSet:
    th = params.theta
    if abs(th) < DEGENERATE_THETA:
        k0 = params.k0
        return StationaryPointSet((k0,), (complex(d2S(k0, params)),), (complex(phase_S(k0, params)),), True)
    pts = tuple(_newton((1j * params.eta + s * th) / 12, params) for s in (1, -1))
    return StationaryPointSet(pts, tuple(complex(d2S(k, params)) for k in pts),
                              tuple(complex(phase_S(k, params)) for k in pts), False)


def phase_at_stationary(params: PhaseParams) -> complex:
    """S(k1) = -theta^3/108 (real for real theta, zero on the axis side)."""
    if abs(params.theta) < DEGENERATE_THETA:
        raise DegenerateRegime("stationary points have merged")
    return complex(np.real(-params.theta**3 / 108))


# ---------------------------------------------------------------------------
# local variables


def chart_radius(params: PhaseParams) -> float:
    return abs(params.theta) / 4


def scaling_variable_l(k, j: int, params: PhaseParams, check: bool = True):
    """l_j with l_j^2 = t(h(k) - h(k_j)), branch continuous from k_j.

    l_j = sqrt(t) d sqrt(h''_j/2) sqrt(1 + 8d/h''_j), d = k - k_j; the last
    root is principal, which is continuous on |d| < |theta|/4.
    """
    sp = stationary_points(params)
    if sp.degenerate:
        raise DegenerateRegime("no separate stationary points")
    kj = sp.points[j]
    hj = sp.hessians[j]
    d = np.asarray(k, dtype=complex) - kj
    if check and np.any(np.abs(d) > chart_radius(params) * (1 + 1e-12)):
        raise BranchAmbiguity("point outside the local chart |k - k_j| <= |theta|/4")
    return np.sqrt(params.t) * d * np.sqrt(hj / 2) * np.sqrt(1 + 8 * d / hj)


def scaling_variable_p(k, params: PhaseParams):
    return params.t ** (1 / 3) * (np.asarray(k, dtype=complex) - params.k0)


# ---------------------------------------------------------------------------
# stationary phase on the real plane


def real_stationary_points(params: PhaseParams) -> list[tuple[float, float]]:
    """Roots of grad Phi found by Newton from every algebraic branch."""
    xi, eta = params.xi, params.eta
    guesses = []
    ts = params.theta_sq
    if ts > 0:
        r = np.sqrt(ts) / 12
        guesses += [(r, eta / 12), (-r, eta / 12)]
    disc = eta**2 + 12 * xi
    if disc >= 0:
        s = np.sqrt(disc)
        guesses += [(0.0, (eta + s) / 12), (0.0, (eta - s) / 12)]
    roots = []
    for a, b in guesses:
        x = np.array([a, b], float)
        for _ in range(30):
            k, l = x
            g = np.array([24 * k**2 - 24 * l**2 + 2 * xi + 4 * l * eta, -48 * k * l + 4 * k * eta])
            H = np.array([[48 * k, -48 * l + 4 * eta], [-48 * l + 4 * eta, -48 * k]])
            if np.linalg.norm(g) < 1e-15:
                break
            try:
                x = x - np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                break
        if not any(np.hypot(x[0] - r[0], x[1] - r[1]) < 1e-10 for r in roots):
            roots.append((float(x[0]), float(x[1])))
    return roots


def stationary_phase_2d(amplitude: Callable, params: PhaseParams) -> complex:
    """Leading stationary-phase value of iint amplitude exp(i t Phi) dkappa dlambda."""
    t = params.t
    total = 0j
    for k, l in real_stationary_points(params):
        H = np.array([[48 * k, -48 * l + 4 * params.eta], [-48 * l + 4 * params.eta, -48 * k]])
        det = np.linalg.det(H)
        if abs(det) < 1e-12:
            raise DegenerateHessian("degenerate Hessian; use the confluent evaluator")
        sig = int(np.sum(np.sign(np.linalg.eigvalsh(H))))
        amp = complex(np.asarray(amplitude(np.array([k + 1j * l])))[0])
        total += (2 * np.pi / t) * amp * np.exp(1j * t * phase_Phi(k, l, params)) \
            / np.sqrt(abs(det)) * np.exp(1j * np.pi * sig / 4)
    return complex(total)
