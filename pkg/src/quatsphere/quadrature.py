"""Adaptive tensor-product Gauss-Legendre quadrature used by the oracles."""
from __future__ import annotations

import numpy as np


class QuadratureError(ArithmeticError):
    def __init__(self, value, error):
        super().__init__(f"quadrature did not converge: value {value!r}, error estimate {error:.3e}")
        self.value = value
        self.error = error


def _panel_nodes(a, b, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gauss_legendre_2d(f, u_range, v_range, *, order=16, atol=1e-10, rtol=1e-12,
                      start_panels=(4, 4), max_panels=512):
    """Integrate vectorized ``f(u, v)`` over a rectangle.

    The panel count on both axes doubles until two successive estimates agree
    to ``atol + rtol * |I|``; the last difference is the error estimate.
    """
    pu, pv = start_panels
    prev = None
    while True:
        u, wu = _panel_nodes(*u_range, pu, order)
        v, wv = _panel_nodes(*v_range, pv, order)
        uu, vv = np.meshgrid(u, v, indexing="ij")
        val = np.einsum("i,ij,j->", wu, f(uu, vv), wv)
        if prev is not None:
            err = abs(val - prev)
            if err <= atol + rtol * abs(val):
                return val, err
            if max(pu, pv) >= max_panels:
                raise QuadratureError(val, err)
        prev = val
        pu, pv = 2 * pu, 2 * pv


def integrate_upper_half_plane(f, **kw):
    """Integrate ``f(z)`` (vectorized, complex argument) over Im z > 0.

    Polar coordinates with r = t / (1 - t) map the half plane to the unit
    square; the Jacobian is r dr dtheta with dr = dt / (1 - t)^2.
    """
    def g(t, theta):
        r = t / (1.0 - t)
        return f(r * np.exp(1j * theta)) * r / (1.0 - t) ** 2

    return gauss_legendre_2d(g, (0.0, 1.0), (0.0, np.pi), **kw)
