"""Sampling regions in the upper half plane and their histogram coordinates.

Every interval is half open with the lower bound included, so membership of
boundary points is deterministic.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .asympt import radii
from .params import EnsembleParams
from .quadrature import gauss_legendre_2d


def _in(v, lo, hi):
    return (v >= lo) & (v < hi)


@dataclass(frozen=True)
class BulkStrip:
    """``|Re z| < half_width``, Im z in [y_lo, y_hi); histogram variable is Im z."""

    half_width: float
    y_lo: float = 0.0
    y_hi: float = math.inf
    kind = "strip"
    variable = "im"

    def __post_init__(self):
        if not (0 < self.half_width < math.inf and 0 <= self.y_lo < self.y_hi):
            raise ValueError(f"bad strip bounds {self}")

    def contains(self, z):
        z = np.asarray(z)
        return _in(np.abs(z.real), 0.0, self.half_width) & _in(z.imag, self.y_lo, self.y_hi)

    def coordinate(self, z):
        return np.asarray(z).imag

    def cell_measure(self, lo, hi):
        """Area of the part of the region whose coordinate lies in [lo, hi)."""
        return 2 * self.half_width * (hi - lo)

    def cell_integral(self, f, lo, hi, order=12):
        u, wu = np.polynomial.legendre.leggauss(order)
        x = self.half_width * u
        y = 0.5 * (hi + lo) + 0.5 * (hi - lo) * u
        xx, yy = np.meshgrid(x, y, indexing="ij")
        vals = f(xx + 1j * yy)
        return self.half_width * 0.5 * (hi - lo) * np.einsum("i,ij,j->", wu, vals, wu)

    def integrate(self, f, **kw):
        def g(x, t):
            y = self.y_lo + t / (1 - t) if math.isinf(self.y_hi) else t
            jac = 1 / (1 - t) ** 2 if math.isinf(self.y_hi) else 1.0
            return f(x + 1j * y) * jac

        trange = (0.0, 1.0) if math.isinf(self.y_hi) else (self.y_lo, self.y_hi)
        return gauss_legendre_2d(g, (-self.half_width, self.half_width), trange, **kw)[0]

    def variable_range(self):
        return self.y_lo, self.y_hi


@dataclass(frozen=True)
class EdgeSector:
    """``|z|`` in [r_lo, r_hi) and arg z in [theta_lo, theta_hi); histogram variable is |z|."""

    r_lo: float
    r_hi: float
    theta_lo: float
    theta_hi: float
    kind = "sector"
    variable = "r"

    def __post_init__(self):
        if not (0 <= self.r_lo < self.r_hi < math.inf and 0 <= self.theta_lo < self.theta_hi <= math.pi):
            raise ValueError(f"bad sector bounds {self}")

    def contains(self, z):
        z = np.asarray(z)
        return _in(np.abs(z), self.r_lo, self.r_hi) & _in(np.angle(z), self.theta_lo, self.theta_hi)

    def coordinate(self, z):
        return np.abs(np.asarray(z))

    def cell_measure(self, lo, hi):
        return 0.5 * (hi ** 2 - lo ** 2) * (self.theta_hi - self.theta_lo)

    def cell_integral(self, f, lo, hi, order=12):
        u, w = np.polynomial.legendre.leggauss(order)
        r = 0.5 * (hi + lo) + 0.5 * (hi - lo) * u
        th = 0.5 * (self.theta_hi + self.theta_lo) + 0.5 * (self.theta_hi - self.theta_lo) * u
        rr, tt = np.meshgrid(r, th, indexing="ij")
        vals = f(rr * np.exp(1j * tt)) * rr
        return 0.25 * (hi - lo) * (self.theta_hi - self.theta_lo) * np.einsum("i,ij,j->", w, vals, w)

    def integrate(self, f, **kw):
        def g(r, th):
            return f(r * np.exp(1j * th)) * r

        return gauss_legendre_2d(g, (self.r_lo, self.r_hi), (self.theta_lo, self.theta_hi), **kw)[0]

    def variable_range(self):
        return self.r_lo, self.r_hi


@dataclass(frozen=True)
class RealEdgeBox:
    """Im z in [0, height) and |Re z| in [x_lo, x_hi); histogram variable is Im z."""

    height: float
    x_lo: float
    x_hi: float
    kind = "box"
    variable = "im"

    def __post_init__(self):
        if not (0 < self.height < math.inf and 0 <= self.x_lo < self.x_hi < math.inf):
            raise ValueError(f"bad box bounds {self}")

    def contains(self, z):
        z = np.asarray(z)
        return _in(z.imag, 0.0, self.height) & _in(np.abs(z.real), self.x_lo, self.x_hi)

    def coordinate(self, z):
        return np.asarray(z).imag

    def cell_measure(self, lo, hi):
        return 2 * (self.x_hi - self.x_lo) * (hi - lo)

    def cell_integral(self, f, lo, hi, order=12):
        u, w = np.polynomial.legendre.leggauss(order)
        half = 0.5 * (self.x_hi - self.x_lo)
        x = 0.5 * (self.x_hi + self.x_lo) + half * u
        y = 0.5 * (hi + lo) + 0.5 * (hi - lo) * u
        xx, yy = np.meshgrid(x, y, indexing="ij")
        vals = f(xx + 1j * yy) + f(-xx + 1j * yy)
        return half * 0.5 * (hi - lo) * np.einsum("i,ij,j->", w, vals, w)

    def integrate(self, f, **kw):
        def g(x, y):
            return f(x + 1j * y) + f(-x + 1j * y)

        return gauss_legendre_2d(g, (self.x_lo, self.x_hi), (0.0, self.height), **kw)[0]

    def variable_range(self):
        return 0.0, self.height

    @property
    def x_mid(self):
        return 0.5 * (self.x_lo + self.x_hi)


@dataclass(frozen=True)
class RadialShell:
    """The whole upper half plane binned by |z| (r in [r_lo, r_hi))."""

    r_lo: float = 0.0
    r_hi: float = math.inf
    kind = "radial"
    variable = "r"

    def contains(self, z):
        return _in(np.abs(np.asarray(z)), self.r_lo, self.r_hi)

    def coordinate(self, z):
        return np.abs(np.asarray(z))

    def cell_measure(self, lo, hi):
        return 0.5 * math.pi * (hi ** 2 - lo ** 2)

    def variable_range(self):
        return self.r_lo, self.r_hi


Region = BulkStrip | EdgeSector | RealEdgeBox | RadialShell


def preset_region(name: str, params: EnsembleParams) -> Region:
    """The three sampling windows used for the large-N comparisons.

    ``bulk``: |Re z| < 0.01.  ``inner``: r_in -+ (r_out - r_in)/20 with
    pi/4 < arg z < 3pi/4.  ``real``: 0 < Im z < 0.06 with |Re z| within
    (r_out - r_in)/5 of the mid radius.
    """
    rad = radii(params)
    width = rad.r_out - rad.r_in
    if name == "bulk":
        return BulkStrip(0.01)
    if name == "inner":
        return EdgeSector(rad.r_in - width / 20, rad.r_in + width / 20, math.pi / 4, 3 * math.pi / 4)
    if name == "real":
        eps = width / 5
        return RealEdgeBox(0.06, rad.mid - eps, rad.mid + eps)
    raise ValueError(f"unknown preset region {name!r}")


def parse_region(spec: str, params: EnsembleParams | None = None) -> Region:
    """Parse ``strip:W[,ylo,yhi]``, ``sector:rlo,rhi,tlo,thi``, ``box:H,xlo,xhi``,
    ``radial[:rlo,rhi]`` or a preset ``preset-bulk|preset-inner|preset-real``."""
    head, _, tail = spec.partition(":")
    vals = [float(v) for v in tail.split(",")] if tail else []
    if head.startswith("preset-"):
        if params is None:
            raise ValueError("preset regions need ensemble parameters")
        return preset_region(head[len("preset-"):], params)
    if head == "strip":
        return BulkStrip(*vals)
    if head == "sector":
        return EdgeSector(*vals)
    if head == "box":
        return RealEdgeBox(*vals)
    if head == "radial":
        return RadialShell(*vals)
    raise ValueError(f"unknown region kind {head!r}")


def region_to_dict(region: Region) -> dict:
    d = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in asdict(region).items()}
    return {"kind": region.kind, **d}
