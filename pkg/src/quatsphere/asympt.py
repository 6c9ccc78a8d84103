"""Large-N limiting densities: annulus radii, bulk and edge laws, near-real profile.

All densities here are normalized the way the limits are stated: bulk and
edge laws are rho / (n + L), the near-real profile is rho / sqrt(n + L).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import dawsn, erfc

from .params import EnsembleParams

REGIMES = ("BB", "SB", "BS", "SS")


@dataclass(frozen=True)
class Radii:
    mu1: Fraction
    mu2: Fraction | float  # inf when n == N

    @property
    def r_in(self) -> float:
        return math.sqrt(self.mu1)

    @property
    def r_out(self) -> float:
        return math.sqrt(self.mu2)

    @property
    def mid(self) -> float:
        return 0.5 * (self.r_in + self.r_out)


def radii(params: EnsembleParams) -> Radii:
    mu1 = Fraction(params.L, params.n)
    gap = params.n - params.N
    mu2 = Fraction(params.N + params.L, gap) if gap else math.inf
    return Radii(mu1, mu2)


@dataclass(frozen=True)
class Regime:
    """``tag[0]``: L big/small, ``tag[1]``: n - N big/small; a, b are L/N and (n-N)/N."""

    tag: str
    a: float
    b: float

    def __post_init__(self):
        if self.tag not in REGIMES:
            raise ValueError(f"unknown regime {self.tag!r}")


def classify(params: EnsembleParams, threshold: float = 0.1) -> Regime:
    """L (resp. n - N) counts as big when it is at least ``threshold * N``."""
    big_l = params.L >= threshold * params.N
    big_gap = params.n - params.N >= threshold * params.N
    tag = ("B" if big_l else "S") + ("B" if big_gap else "S")
    return Regime(tag, params.L / params.N, (params.n - params.N) / params.N)


def step(x):
    """Heaviside step with value 1/2 at 0."""
    return np.heaviside(x, 0.5)


def _sphere_weight(r):
    return 2.0 / (math.pi * (1.0 + r * r) ** 2)


def bulk_density(z, params: EnsembleParams):
    r = np.abs(np.asarray(z, dtype=complex))
    rad = radii(params)
    return _sphere_weight(r) * (step(r - rad.r_in) - step(r - rad.r_out))


def edge_density(side: str, xi, params: EnsembleParams):
    xi = np.asarray(xi, dtype=float)
    rad = radii(params)
    if side == "inner":
        mu, arg = float(rad.mu1), -2.0 * xi
    elif side == "outer":
        mu, arg = float(rad.mu2), 2.0 * xi
        if not math.isfinite(mu):
            return np.zeros_like(xi)
    else:
        raise ValueError("side must be 'inner' or 'outer'")
    return erfc(arg / (1.0 + mu)) / (math.pi * (1.0 + mu) ** 2)


def edge_point(side: str, xi, phi, params: EnsembleParams):
    """``(r_edge + xi / sqrt(n+L)) e^{i phi}``."""
    rad = radii(params)
    r0 = rad.r_in if side == "inner" else rad.r_out
    return (r0 + np.asarray(xi) / math.sqrt(params.scale)) * np.exp(1j * np.asarray(phi))


def regime_limit(regime: Regime | str, z, params: EnsembleParams):
    tag = regime.tag if isinstance(regime, Regime) else regime
    if tag not in REGIMES:
        raise ValueError(f"unknown regime {tag!r}")
    r = np.abs(np.asarray(z, dtype=complex))
    rad = radii(params)
    base = _sphere_weight(r)
    if tag == "BB":
        return base * (step(r - rad.r_in) - step(r - rad.r_out))
    if tag == "SB":
        return base * step(rad.r_out - r)
    if tag == "BS":
        return base * step(r - rad.r_in)
    return base


def near_real_expression(x, y, const: float = 1.0):
    """The conjectured near-real profile as printed, a complex number.

    ``const 4 pi y e^{-s^2} erfc(i s) / (i (1+x^2)^3)`` with
    ``s = 2 sqrt(2 pi) y / (1+x^2)``; ``e^{-s^2} erfc(i s) = e^{-s^2} - 2i F(s)/sqrt(pi)``
    with F the Dawson function keeps it finite for large y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = 1.0 + x * x
    s = 2.0 * math.sqrt(2.0 * math.pi) * y / d
    core = np.exp(-s * s) - 2j * dawsn(s) / math.sqrt(math.pi)
    return const * 4.0 * math.pi * y * core / (1j * d ** 3)


def near_real_conjecture(x, y, params: EnsembleParams | None = None, const: float = 1.0):
    """|Re| of the printed expression, ``8 sqrt(pi) |const| y F(s) / (1+x^2)^3``.

    ``params`` is accepted for symmetry with the other laws; the profile is in
    the scaled coordinate y = sqrt(n+L) Im z and does not depend on it.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    return np.abs(near_real_expression(x, y, const).real)


def annulus_mass(params: EnsembleParams) -> float:
    """(n+L) times the bulk law integrated over the upper half plane."""
    rad = radii(params)
    inner = 1.0 / (1.0 + float(rad.mu1))
    outer = 0.0 if not math.isfinite(rad.mu2) else 1.0 / (1.0 + float(rad.mu2))
    return params.scale * (inner - outer)
