"""Region-filtered histograms and goodness-of-fit against reference densities.

Heights are densities in the units the curves are plotted in: eigenvalues per
realization per unit area (strip, sector, box) or per unit radius (radial
shell), divided by the reference normalization (``n + L`` for the bulk and
edge laws, ``sqrt(n + L)`` for the near-real law with its rescaled height,
1 for the radial density).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from . import asympt
from .kernel import density, radial_cdf, radial_density
from .params import EnsembleParams
from .regions import BulkStrip, EdgeSector, RadialShell, RealEdgeBox, Region, region_to_dict

REFERENCES = ("exact", "bulk", "edge", "near_real")
MIN_EXPECTED = 100.0


class EmptyRegionError(ValueError):
    """No stored eigenvalue falls in the requested region."""


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    realizations: int
    measures: np.ndarray  # region measure of each bin (area, or length for radial)
    norm: float = 1.0

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.measures = np.asarray(self.measures, dtype=float)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def exposure(self) -> np.ndarray:
        return self.realizations * self.measures * self.norm

    @property
    def heights(self) -> np.ndarray:
        return self.counts / self.exposure

    @property
    def errors(self) -> np.ndarray:
        """Multinomial standard errors of the heights."""
        total = max(self.total, 1)
        p = self.counts / total
        return np.sqrt(total * p * (1 - p)) / self.exposure


def bin_measure(region: Region, lo, hi):
    if isinstance(region, RadialShell):
        return np.asarray(hi) - np.asarray(lo)
    return np.array([region.cell_measure(a, b) for a, b in zip(np.atleast_1d(lo), np.atleast_1d(hi))])


def resolve_bins(coords: np.ndarray, region: Region, bins="fd") -> np.ndarray:
    """Bin edges from an int, ``"fd"`` (Freedman-Diaconis) or explicit edges."""
    lo, hi = region.variable_range()
    if not math.isfinite(hi):
        hi = float(np.max(coords)) * (1 + 1e-12) if coords.size else lo + 1.0
    if isinstance(bins, str) and bins != "fd":
        bins = [float(b) for b in bins.split(",")] if "," in bins else int(bins)
    if isinstance(bins, (list, tuple, np.ndarray)):
        edges = np.asarray(bins, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        return edges
    return np.histogram_bin_edges(coords, bins=bins, range=(lo, hi))


def histogram(eigenvalues, realizations: int, region: Region, bins="fd", norm: float = 1.0) -> Histogram:
    z = np.asarray(eigenvalues).ravel()
    inside = z[region.contains(z)]
    if inside.size == 0:
        raise EmptyRegionError(f"no eigenvalues in region {region_to_dict(region)}")
    coords = region.coordinate(inside)
    edges = resolve_bins(coords, region, bins)
    # Half-open bins [e_i, e_{i+1}); points outside the edge range are dropped.
    idx = np.searchsorted(edges, coords, side="right") - 1
    keep = (idx >= 0) & (idx < edges.size - 1)
    counts = np.bincount(idx[keep], minlength=edges.size - 1)
    return Histogram(edges, counts, realizations, bin_measure(region, edges[:-1], edges[1:]), norm)


# -- reference densities -----------------------------------------------------

def reference_norm(reference: str, params: EnsembleParams, region: Region) -> float:
    if isinstance(region, RadialShell):
        return 1.0
    if reference == "near_real":
        return math.sqrt(params.scale)
    return float(params.scale)


def reference_density(reference: str, params: EnsembleParams, region: Region, const: float = 1.0):
    """Expected eigenvalues per realization per unit area as a function of z."""
    s = params.scale
    if reference == "exact":
        return lambda z: density(z, params)
    if reference == "bulk":
        return lambda z: s * asympt.bulk_density(z, params)
    if reference == "edge":
        rad = asympt.radii(params)
        side = "inner"
        if isinstance(region, EdgeSector) and math.isfinite(rad.r_out):
            mid = 0.5 * (region.r_lo + region.r_hi)
            side = "inner" if abs(mid - rad.r_in) <= abs(mid - rad.r_out) else "outer"
        centre = rad.r_in if side == "inner" else rad.r_out
        return lambda z: s * asympt.edge_density(side, (np.abs(z) - centre) * math.sqrt(s), params)
    if reference == "near_real":
        return lambda z: math.sqrt(s) * asympt.near_real_conjecture(
            np.real(z), np.imag(z) * math.sqrt(s), params, const)
    raise ValueError(f"unknown reference {reference!r}; choose from {REFERENCES}")


def expected_counts(reference: str, params: EnsembleParams, region: Region, edges,
                    realizations: int, const: float = 1.0) -> np.ndarray:
    """Expected counts per bin, integrating the reference over each cell."""
    edges = np.asarray(edges, dtype=float)
    if isinstance(region, RadialShell):
        if reference == "exact":
            return realizations * np.diff(radial_cdf(edges, params))
        f = reference_density(reference, params, region, const)
        nodes, weights = np.polynomial.legendre.leggauss(24)
        out = []
        for a, b in zip(edges[:-1], edges[1:]):
            r = 0.5 * (a + b) + 0.5 * (b - a) * nodes
            out.append(0.5 * (b - a) * np.sum(weights * f(1j * r) * math.pi * r))
        return realizations * np.array(out)
    f = reference_density(reference, params, region, const)
    return realizations * np.array([region.cell_integral(f, a, b) for a, b in zip(edges[:-1], edges[1:])])


def reference_curve(reference: str, params: EnsembleParams, region: Region, x, const: float = 1.0):
    """Reference height at histogram coordinate ``x`` in plotting units."""
    x = np.asarray(x, dtype=float)
    if isinstance(region, RadialShell):
        if reference == "exact":
            return radial_density(x, params)
        f = reference_density(reference, params, region, const)
        return math.pi * x * f(1j * x)
    f = reference_density(reference, params, region, const)
    norm = reference_norm(reference, params, region)
    if isinstance(region, BulkStrip):
        z = 1j * x
    elif isinstance(region, EdgeSector):
        z = x * np.exp(0.5j * (region.theta_lo + region.theta_hi))
    elif isinstance(region, RealEdgeBox):
        z = region.x_mid + 1j * x
    else:
        raise TypeError(type(region))
    return f(z) / norm


# -- comparison --------------------------------------------------------------

@dataclass
class Comparison:
    params: EnsembleParams
    region: Region
    reference: str
    hist: Histogram
    expected: np.ndarray
    reference_heights: np.ndarray
    min_expected: float = MIN_EXPECTED
    extra: dict = field(default_factory=dict)

    @property
    def zscores(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.hist.counts - self.expected) / np.sqrt(self.expected)

    @property
    def used(self) -> np.ndarray:
        return self.expected >= self.min_expected

    @property
    def chi2(self) -> float:
        u = self.used
        return float(np.sum((self.hist.counts[u] - self.expected[u]) ** 2 / self.expected[u]))

    @property
    def dof(self) -> int:
        return int(self.used.sum())

    @property
    def pvalue(self) -> float | None:
        if self.dof == 0:
            return None
        return float(sps.chi2.sf(self.chi2, self.dof))

    def summary(self) -> dict:
        return {
            "reference": self.reference,
            "region": region_to_dict(self.region),
            "in_region": self.hist.total,
            "expected_in_bins": float(self.expected.sum()),
            "chi2": self.chi2,
            "dof": self.dof,
            "pvalue": self.pvalue,
            "min_expected": self.min_expected,
            **self.extra,
        }

    def rows(self):
        h = self.hist
        for i in range(len(h.counts)):
            yield (h.edges[i], h.edges[i + 1], h.centers[i], int(h.counts[i]), float(self.expected[i]),
                   float(h.heights[i]), float(h.errors[i]), float(self.reference_heights[i]),
                   float(self.zscores[i]))

    columns = ("bin_lo", "bin_hi", "center", "count", "expected", "height", "height_err",
               "reference", "zscore")


def compare(eigenvalues, realizations: int, params: EnsembleParams, region: Region,
            reference: str = "exact", bins="fd", const: float = 1.0,
            min_expected: float = MIN_EXPECTED) -> Comparison:
    norm = reference_norm(reference, params, region)
    hist = histogram(eigenvalues, realizations, region, bins, norm)
    exp = expected_counts(reference, params, region, hist.edges, realizations, const)
    ref = exp / hist.exposure
    return Comparison(params, region, reference, hist, exp, ref, min_expected)
