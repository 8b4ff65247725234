"""Exact Barenblatt-Pattle solutions, waiting-time theory and initial data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Barenblatt:
    """Source-type solution of rho_t = Lap rho^alpha in ``dim`` dimensions.

    In 1D the constant in the bracket is 1; in higher dimensions it is ``C0``.
    """

    alpha: float
    dim: int = 1
    C0: float = 1.0

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError("alpha must exceed 1")
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.dim == 1 and self.C0 != 1.0:
            raise ValueError("the 1D solution uses C = 1")

    @property
    def k(self) -> float:
        return 1.0 / (self.alpha - 1.0 + 2.0 / self.dim)

    def value(self, x, t: float):
        if not t > 0:
            raise ValueError("Barenblatt solution needs t > 0")
        x = np.asarray(x, dtype=float)
        r2 = x ** 2 if self.dim == 1 else np.sum(x ** 2, axis=-1)
        a, d, k = self.alpha, self.dim, self.k
        bracket = self.C0 - k * (a - 1.0) / (2.0 * d * a) * r2 / t ** (2.0 * k / d)
        return t ** (-k) * np.maximum(bracket, 0.0) ** (1.0 / (a - 1.0))

    def radius(self, t: float) -> float:
        if not t > 0:
            raise ValueError("interface radius needs t > 0")
        a, d, k = self.alpha, self.dim, self.k
        return math.sqrt(2.0 * d * a * self.C0 / (k * (a - 1.0))) * t ** (k / d)

    def mass(self) -> float:
        """Total mass (time independent), by the closed-form Beta integral."""
        a, d, k = self.alpha, self.dim, self.k
        m = 1.0 / (a - 1.0)
        c = k * (a - 1.0) / (2.0 * d * a)  # at t = 1
        R = math.sqrt(self.C0 / c)
        # int_{|x|<R} (C0 - c|x|^2)^m dx = C0^m * |S^{d-1}| R^d * B(d/2, m+1) / 2
        sphere = 2.0 if d == 1 else 2.0 * math.pi
        beta = math.gamma(d / 2) * math.gamma(m + 1) / math.gamma(d / 2 + m + 1)
        return self.C0 ** m * sphere * R ** d * beta / 2.0


def barenblatt_value(B: Barenblatt, x, t: float):
    return B.value(x, t)


def interface_radius(B: Barenblatt, t: float) -> float:
    return B.radius(t)


def waiting_time_theory(theta: float, alpha: float):
    """Waiting time 1/(2(alpha+1)(1-theta)) of the sine-power datum.

    The formula only holds for ``0 <= theta <= 1/4``; outside that range
    ``None`` is returned.
    """
    if not 0.0 <= theta <= 0.25:
        return None
    return 1.0 / (2.0 * (alpha + 1.0) * (1.0 - theta))


# ----------------------------------------------------------------------------
# initial data; every function maps (k, d) reference points to densities
# ----------------------------------------------------------------------------


def _radius(X):
    X = np.asarray(X, dtype=float)
    return np.sqrt(np.sum(X ** 2, axis=-1)) if X.ndim > 1 and X.shape[-1] == 2 else np.abs(X.reshape(-1))


def sine_power(theta: float, alpha: float):
    """rho0 with alpha/(alpha-1) rho0^(alpha-1) = (1-theta) sin^2 X + theta sin^4 X on [-pi, 0]."""

    def rho0(X):
        X = np.asarray(X, dtype=float).reshape(-1)
        s2 = np.sin(X) ** 2
        v0 = np.where((X >= -np.pi) & (X <= 0.0), (1.0 - theta) * s2 + theta * s2 ** 2, 0.0)
        return ((alpha - 1.0) / alpha * v0) ** (1.0 / (alpha - 1.0))

    return rho0


def cosine_bump_2d():
    def rho0(X):
        r = _radius(X)
        return np.where(r <= 1.0, np.cos(0.5 * np.pi * np.minimum(r, 1.0)), 0.0)

    return rho0


def donut(alpha: float):
    """Horseshoe-shaped support: three quarters of an annulus with rounded ends."""

    def rho0(X):
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        x, y = X[:, 0], X[:, 1]
        r = np.hypot(x, y)
        q = 0.25 ** 2
        ring = np.where((r >= 0.5) & (r <= 1.0) & ((x < 0) | (y < 0)), q - (r - 0.75) ** 2, 0.0)
        cap1 = np.where(x >= 0, q - x ** 2 - (y - 0.75) ** 2, 0.0)
        cap2 = np.where(y >= 0, q - (x - 0.75) ** 2 - y ** 2, 0.0)
        v = np.maximum(np.maximum(ring, 0.0), np.maximum(np.maximum(cap1, 0.0), np.maximum(cap2, 0.0)))
        return (25.0 * v ** 1.5) ** (1.0 / (alpha - 1.0))

    return rho0


def donut_distance(p):
    """Signed distance (negative inside) to the donut support, for meshing."""
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    x, y = p[:, 0], p[:, 1]
    r = np.hypot(x, y)
    ring = np.abs(r - 0.75) - 0.25
    ring = np.where((x < 0) | (y < 0), ring, np.inf)
    cap1 = np.hypot(x, y - 0.75) - 0.25
    cap2 = np.hypot(x - 0.75, y) - 0.25
    return np.minimum(ring, np.minimum(cap1, cap2))


def two_peaks():
    def rho0(X):
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        x, y = X[:, 0], X[:, 1]
        upper = np.exp(-20.0 * ((x - 0.3) ** 2 + (y - 0.3) ** 2))
        lower = np.exp(-20.0 * ((x + 0.3) ** 2 + (y + 0.3) ** 2))
        return upper + lower + 0.001

    return rho0


def barenblatt_datum(alpha: float, dim: int = 1, C0: float = 1.0, t0: float = 1.0):
    B = Barenblatt(alpha, dim, C0)

    def rho0(X):
        X = np.asarray(X, dtype=float)
        if dim == 1:
            X = X.reshape(-1)
        return B.value(X, t0)

    return rho0


DATA = ("barenblatt", "sine-power", "cosine-bump-2d", "donut", "two-peaks")


def initial_datum(name: str, **params):
    """Initial density by name; see ``DATA`` for the choices."""
    if name == "barenblatt":
        return barenblatt_datum(params["alpha"], params.get("dim", 1), params.get("C0", 1.0), params.get("t0", 1.0))
    if name == "sine-power":
        return sine_power(params.get("theta", 0.0), params["alpha"])
    if name == "cosine-bump-2d":
        return cosine_bump_2d()
    if name == "donut":
        return donut(params["alpha"])
    if name == "two-peaks":
        return two_peaks()
    raise ValueError(f"unknown initial datum {name!r}; choose from {DATA}")
