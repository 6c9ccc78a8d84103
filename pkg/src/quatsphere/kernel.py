"""Exact finite-N eigenvalue statistics of the induced quaternion spherical ensemble.

Conventions
-----------
``h(z) = |z|^{2L} sqrt(z - conj z) / (1 + |z|^2)^{n+L+1}`` with the principal
square root, so for z, w in the upper half plane ``h(z) h(conj w) =
2 sqrt(Im z Im w) |zw|^{2L} / ((1+|z|^2)(1+|w|^2))^{n+L+1}`` is real and
positive.  The kernel is

    S(z, w) = i h(z) h(conj w) sum_{0<=j<=k<N} c_{jk} (z^{2j} conj(w)^{2k+1} - z^{2k+1} conj(w)^{2j})

    c_{jk} = Gamma(2n+2L+2) / (2^{2(n+L)} Gamma(L+j+1) Gamma(L+k+3/2) Gamma(n-j+1/2) Gamma(n-k))

which equals the skew-orthogonal-polynomial form ``i h h sum_k (q_{2k} q_{2k+1} -
q_{2k+1} q_{2k}) / g_k`` and yields a nonnegative density ``rho = S(z, z)``.
The skew inner product is normalized so that ``<q_{2k}, q_{2k+1}> = +g_k``.

Every gamma-laden coefficient is carried as a logarithm; summands are formed
as ``exp(log-magnitude) * phase`` and summed with numpy's pairwise summation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, betaln, gammaln

from .params import EnsembleParams
from .quadrature import integrate_upper_half_plane
from .quatlin import pfaffian

LOG2 = math.log(2.0)
LOGPI = math.log(math.pi)

# rows of the 2-D (points x terms) work arrays kept under ~32M entries
_WORK_ENTRIES = 1 << 25


class LogGammaCache:
    """log Gamma at integers and half-integers on [0, max_arg], built once.

    ``integer(k) = log Gamma(k)`` for k >= 1 and ``half(k) = log Gamma(k + 1/2)``
    for k >= 0.
    """

    def __init__(self, max_arg: int):
        self.max_arg = int(max_arg)
        k = np.arange(self.max_arg + 2, dtype=float)
        with np.errstate(divide="ignore"):
            ints = gammaln(k)
        ints[0] = np.inf
        self._int = ints
        self._half = gammaln(k + 0.5)
        self._int.setflags(write=False)
        self._half.setflags(write=False)

    def integer(self, k):
        return self._int[np.asarray(k)]

    def half(self, k):
        return self._half[np.asarray(k)]


@lru_cache(maxsize=64)
def log_gamma_cache(params: EnsembleParams) -> LogGammaCache:
    return LogGammaCache(2 * (params.n + params.L) + 2)


@lru_cache(maxsize=64)
def _coefficients(params: EnsembleParams):
    """Flattened (j, k, log c_{jk}) over the triangle 0 <= j <= k < N."""
    N, n, L = params.N, params.n, params.L
    lg = log_gamma_cache(params)
    k, j = np.tril_indices(N)
    logc = (lg.integer(2 * n + 2 * L + 2) - 2 * (n + L) * LOG2
            - lg.integer(L + j + 1) - lg.half(L + k + 1) - lg.half(n - j) - lg.integer(n - k))
    for arr in (j, k, logc):
        arr.setflags(write=False)
    return j, k, logc


def log_KN(beta: int, params: EnsembleParams) -> float:
    """log of the matrix-pdf normalization constant for beta in {1, 2, 4}."""
    if beta not in (1, 2, 4):
        raise ValueError("beta must be 1, 2 or 4")
    N, n, L = params.N, params.n, params.L
    j = np.arange(1, N + 1, dtype=float)
    b = beta / 2.0
    terms = (gammaln(b * j) + gammaln(b * (n + L + j))
             - gammaln(b * (L + j)) - gammaln(b * (n - N + j)))
    return float(-beta * N * N / 2.0 * LOGPI + math.fsum(terms))


def log_abs_CN(params: EnsembleParams) -> float:
    N, n, L = params.N, params.n, params.L
    j = np.arange(1, N + 1)
    terms = gammaln(2 * n + 2 * L + 2) - gammaln(2 * L + 2 * j) - gammaln(2 * n - 2 * N + 2 * j)
    return float(-N * LOGPI + math.fsum(terms))


def constant_CN(params: EnsembleParams) -> complex:
    """Eigenvalue-jpdf constant ``(-1)^{N(N-1)/2} i^N pi^-N prod Gamma(...)`` (phase as printed)."""
    N = params.N
    phase = (-1) ** (N * (N - 1) // 2) * 1j ** N
    return complex(phase * math.exp(log_abs_CN(params)))


def _log_weight(z, params):
    """log |h(z)| and arg h(z) for the principal branch of sqrt(z - conj z)."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    y = z.imag
    with np.errstate(divide="ignore"):
        logmag = (_logpow(params.L, np.log(r2)) + 0.5 * np.log(2 * np.abs(y))
                  - (params.n + params.L + 1) * np.log1p(r2))
    phase = np.where(y >= 0, math.pi / 4, -math.pi / 4)
    return logmag, phase


def weight_h(z, params: EnsembleParams):
    logmag, phase = _log_weight(z, params)
    return np.exp(logmag + 1j * phase)


def weight_pair(z, params: EnsembleParams):
    """``h(z) h(conj z) = 2 |Im z| |z|^{4L} / (1 + |z|^2)^{2(n+L+1)}``, real and branch free."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    return 2 * np.abs(z.imag) * r2 ** (2 * params.L) / (1 + r2) ** (2 * (params.n + params.L + 1))


def even_sop_coefficients(k: int, params: EnsembleParams) -> np.ndarray:
    """Coefficients of z^0, z^2, ..., z^{2k} in the monic q_{2k}.

    Built downward from the leading 1 with the ratio
    ``c_{j-1} / c_j = (L + j) / (n - j + 1/2)`` so no gamma function at a
    negative half-integer is ever evaluated.
    """
    c = np.empty(k + 1)
    c[k] = 1.0
    for j in range(k, 0, -1):
        c[j - 1] = c[j] * (params.L + j) / (params.n - j + 0.5)
    return c


def sop(j: int, z, params: EnsembleParams):
    """Value of the degree-j monic skew-orthogonal polynomial q_j at z."""
    if not 0 <= j <= 2 * params.N - 1:
        raise ValueError(f"degree {j} outside 0..{2 * params.N - 1}")
    z = np.asarray(z, dtype=complex)
    if j % 2:
        return z ** j
    coeffs = even_sop_coefficients(j // 2, params)
    z2 = z * z
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z2 + c
    return acc


def log_norm_gk(k, params: EnsembleParams):
    k = np.asarray(k)
    if np.any((k < 0) | (k > params.N - 1)):
        raise ValueError(f"k must lie in 0..{params.N - 1}")
    n, L = params.n, params.L
    return LOGPI + gammaln(2 * n - 2 * k) + gammaln(2 * L + 2 * k + 2) - gammaln(2 * n + 2 * L + 2)


def norm_gk(k, params: EnsembleParams):
    return np.exp(log_norm_gk(k, params))


def _angular(d: int) -> float:
    # int_0^pi sin(t) sin(d t) dt for integer d
    return math.copysign(math.pi / 2, d) if abs(d) == 1 else 0.0


def skew_inner(a: int, b: int, params: EnsembleParams) -> float:
    """Closed form of the skew inner product of the monomials z^a and z^b.

    ``<z^a, z^b> = 4 A(b - a) R(a + b)`` where ``A(d) = int_0^pi sin t sin(dt) dt``
    vanishes unless |d| = 1 and ``R(s) = int_0^inf r^{4L+s+2} (1+r^2)^{-(2n+2L+2)} dr``
    is half a Beta function.
    """
    if a < 0 or b < 0:
        raise ValueError("exponents must be nonnegative")
    ang = _angular(b - a)
    if ang == 0.0:
        return 0.0
    p = (4 * params.L + a + b + 3) / 2.0
    q = 2 * params.n + 2 * params.L + 2 - p
    if q <= 0:
        return math.copysign(math.inf, ang)
    return 4 * ang * 0.5 * math.exp(betaln(p, q))


def skew_inner_quadrature(a: int, b: int, params: EnsembleParams, atol: float = 1e-10):
    """The same inner product by 2-D quadrature of the defining integral.

    Returns ``(value, error_estimate)``.  The integrand is
    ``h(z)h(conj z) (z^a conj(z)^b - conj(z)^a z^b) / i`` up to the overall
    sign fixed by ``<z^0, z^1> > 0``.
    """
    def f(z):
        zb = z.conj()
        return -(weight_pair(z, params) * (z ** a * zb ** b - zb ** a * z ** b) / 1j).real

    return integrate_upper_half_plane(f, atol=atol)


def skew_inner_polys(p, q, params: EnsembleParams) -> float:
    """Skew product of two polynomials given as ascending coefficient lists."""
    total = 0.0
    for a, ca in enumerate(p):
        if ca == 0:
            continue
        for b, cb in enumerate(q):
            if cb != 0:
                total += ca * cb * skew_inner(a, b, params)
    return total


def sop_coefficients(j: int, params: EnsembleParams) -> np.ndarray:
    out = np.zeros(j + 1)
    if j % 2:
        out[j] = 1.0
    else:
        out[0::2] = even_sop_coefficients(j // 2, params)
    return out


def gamma_matrix(params: EnsembleParams, size: int | None = None) -> np.ndarray:
    """``[<z^{j}, z^{k}>]`` for j, k < 2N (the monomial generalized-partition matrix)."""
    size = 2 * params.N if size is None else size
    return np.array([[skew_inner(a, b, params) for b in range(size)] for a in range(size)])


def partition_function(params: EnsembleParams) -> complex:
    """``C_N Pf[gamma]`` with the printed C_N and the monomial skew matrix."""
    return constant_CN(params) * pfaffian(gamma_matrix(params))


def _logpow(exponent, logr):
    # exponent * log r, with 0 * log 0 := 0
    with np.errstate(invalid="ignore"):
        out = exponent * logr
    return np.where(exponent == 0, 0.0, out)


def _chunks(npoints: int, nterms: int):
    step = max(1, _WORK_ENTRIES // max(nterms, 1))
    for s in range(0, npoints, step):
        yield slice(s, min(s + step, npoints))


def _pair_kernel(x, u, params: EnsembleParams):
    """``i h(x) h(u) sum c_{jk} (x^{2j} u^{2k+1} - x^{2k+1} u^{2j})``, vectorized.

    Exactly antisymmetric under x <-> u: both halves use the same summands in
    the same order.
    """
    x, u = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(u, dtype=complex))
    shape = x.shape
    x, u = x.ravel(), u.ravel()
    j, k, logc = _coefficients(params)
    lwx, pwx = _log_weight(x, params)
    lwu, pwu = _log_weight(u, params)
    with np.errstate(divide="ignore"):
        lx, lu = np.log(np.abs(x)), np.log(np.abs(u))
    ax, au = np.angle(x), np.angle(u)
    out = np.empty(x.size, dtype=complex)
    e_even, e_odd = 2 * j, 2 * k + 1
    for sl in _chunks(x.size, logc.size):
        lw = (lwx[sl] + lwu[sl])[:, None]
        pw = (pwx[sl] + pwu[sl])[:, None]
        mag_a = _logpow(e_even, lx[sl, None]) + _logpow(e_odd, lu[sl, None])
        mag_b = _logpow(e_odd, lx[sl, None]) + _logpow(e_even, lu[sl, None])
        ph_a = e_even * ax[sl, None] + e_odd * au[sl, None]
        ph_b = e_odd * ax[sl, None] + e_even * au[sl, None]
        with np.errstate(invalid="ignore", over="ignore"):
            a = np.exp(logc + mag_a + lw + 1j * (ph_a + pw)).sum(axis=1)
            b = np.exp(logc + mag_b + lw + 1j * (ph_b + pw)).sum(axis=1)
        out[sl] = 1j * (a - b)
    out = np.nan_to_num(out, nan=0.0)
    return out.reshape(shape)


def kernel_S(z, w, params: EnsembleParams):
    return _pair_kernel(z, np.conj(w), params)


def kernel_D(x, y, params: EnsembleParams):
    return _pair_kernel(x, y, params)


def kernel_I(x, y, params: EnsembleParams):
    return _pair_kernel(np.conj(x), np.conj(y), params)


def kernel_S_sop(z, w, params: EnsembleParams):
    """S(z, w) summed directly over skew-orthogonal polynomials and norms g_k.

    Independent of the closed coefficient form; intended for small N.
    """
    z = np.asarray(z, dtype=complex)
    wb = np.conj(np.asarray(w, dtype=complex))
    total = 0.0j
    for k in range(params.N):
        g = norm_gk(k, params)
        total = total + (sop(2 * k, z, params) * sop(2 * k + 1, wb, params)
                         - sop(2 * k + 1, z, params) * sop(2 * k, wb, params)) / g
    return 1j * weight_h(z, params) * weight_h(wb, params) * total


@dataclass(frozen=True)
class KernelValue:
    D: complex
    S: complex
    I: complex


def kernel_value(x: complex, y: complex, params: EnsembleParams) -> KernelValue:
    return KernelValue(complex(kernel_D(x, y, params)), complex(kernel_S(x, y, params)),
                       complex(kernel_I(x, y, params)))


def density(z, params: EnsembleParams):
    """One-point density rho(z) = S(z, z) for Im z >= 0 (zero on the real axis).

    Uses the real form ``i (conj(z)^m - z^m) = 2 |z|^m sin(m arg z)`` of the
    double sum, m = 2(k-j)+1.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    if np.any(z.imag < 0):
        raise ValueError("density is defined on the closed upper half plane")
    N, n, L = params.N, params.n, params.L
    j, k, logc = _coefficients(params)
    m = 2 * (k - j) + 1
    e_r = 4 * j + m
    r2 = np.abs(z) ** 2
    with np.errstate(divide="ignore"):
        lr = 0.5 * np.log(r2)
        logp = (np.log(2 * z.imag) + _logpow(4 * L, lr) - (2 * n + 2 * L + 2) * np.log1p(r2))
    th = np.angle(z)
    out = np.zeros(z.size)
    for sl in _chunks(z.size, logc.size):
        live = np.isfinite(logp[sl])
        if not live.any():
            continue
        idx = np.flatnonzero(live) + sl.start
        mags = np.exp(logp[idx, None] + logc + _logpow(e_r, lr[idx, None]))
        out[idx] = (mags * (2 * np.sin(m * th[idx, None]))).sum(axis=1)
    return out.reshape(shape)


def radial_density(r, params: EnsembleParams):
    """Angle-integrated density: int_0^pi rho(r e^{it}) r dt."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    N, n, L = params.N, params.n, params.L
    k = np.arange(N)
    logc = gammaln(2 * n + 2 * L + 2) - gammaln(2 * L + 2 * k + 2) - gammaln(2 * n - 2 * k)
    flat = r.ravel()
    with np.errstate(divide="ignore"):
        lr = np.log(flat)
        pre = math.log(2) + _logpow(4 * L + 3, lr) - (2 * n + 2 * L + 2) * np.log1p(flat ** 2)
    out = np.zeros(flat.size)
    for sl in _chunks(flat.size, N):
        out[sl] = np.exp(pre[sl, None] + logc + _logpow(4 * k, lr[sl, None])).sum(axis=1)
    return out.reshape(r.shape)


def radial_cdf(r, params: EnsembleParams):
    """int_0^r radial_density: a sum of regularized incomplete Beta functions.

    With t = r^2/(1+r^2) each k-term integrates to I_t(2L+2k+2, 2n-2k), so the
    expected count per realization below radius r is their sum.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        t = 1.0 / (1.0 + r ** -2.0)  # r^2/(1+r^2), finite at r = 0 and r = inf
    k = np.arange(params.N)
    a = 2 * params.L + 2 * k + 2
    b = 2 * params.n - 2 * k
    return betainc(a, b, t[..., None]).sum(axis=-1)


def correlation_m(points, params: EnsembleParams) -> float:
    """m-point correlation: Pfaffian of the 2m x 2m matrix of kernel blocks."""
    pts = np.asarray(points, dtype=complex).ravel()
    m = pts.size
    if m < 1:
        raise ValueError("need at least one point")
    if np.any(pts.imag <= 0):
        raise ValueError("points must lie in the open upper half plane")
    zs, ws = np.meshgrid(pts, pts, indexing="ij")
    D = kernel_D(zs, ws, params)
    S = kernel_S(zs, ws, params)
    I = kernel_I(zs, ws, params)
    K = np.empty((2 * m, 2 * m), dtype=complex)
    K[0::2, 0::2] = D
    K[0::2, 1::2] = S
    K[1::2, 0::2] = -S.T
    K[1::2, 1::2] = I
    return float(pfaffian(K, rtol=1e-10).real)


def expected_count(region, params: EnsembleParams, **kw) -> float:
    """Expected number of upper-half-plane eigenvalues per matrix inside a region.

    ``region`` is one of the shapes in ``quatsphere.regions``; keyword
    arguments go to its adaptive ``integrate``.
    """
    return region.integrate(lambda z: density(z, params), **kw)


def total_mass(params: EnsembleParams, atol: float = 1e-9):
    """Integral of rho over the upper half plane by 2-D quadrature; should equal N."""
    val, err = integrate_upper_half_plane(lambda z: density(z, params), atol=atol)
    return float(val), float(err)


@dataclass(frozen=True)
class CharpolyComparison:
    exact: complex
    estimate: complex
    standard_error: complex  # real and imaginary standard errors packed as a complex number
    literal_prefactor_estimate: complex
    realizations: int

    @property
    def zscore(self) -> float:
        d = self.estimate - self.exact
        se = self.standard_error
        parts = []
        if se.real > 0:
            parts.append(abs(d.real) / se.real)
        if se.imag > 0:
            parts.append(abs(d.imag) / se.imag)
        return max(parts, default=0.0 if d == 0 else math.inf)


def charpoly_prefactor(params: EnsembleParams) -> complex:
    """``i / g_{N-1}``: S(z,w) = pref (conj w - z) h(z) h(conj w) <phi(z) phi(conj w)>_{N-1}.

    Its modulus equals |C_N / C_{N-1}|; the printed phase ``1 / i^{N-2}`` times
    the printed C_N phases disagrees with the kernel already at N = 1, 2.
    """
    return 1j / float(norm_gk(params.N - 1, params))


def charpoly_average_check(z: complex, w: complex, params: EnsembleParams,
                           realizations: int, rng, workers: int = 1) -> CharpolyComparison:
    """Monte Carlo estimate of S(z, w) from characteristic polynomials of the N-1 ensemble."""
    from .sampler import sample_eigenvalues, _as_generator

    N = params.N
    zc, wb = complex(z), complex(np.conj(w))
    hh = complex(weight_h(zc, params) * weight_h(wb, params))
    if N == 1:
        samples = np.ones(realizations, dtype=complex)
    else:
        sub = EnsembleParams(N - 1, params.n, params.L)
        seed = int(_as_generator(rng).integers(2 ** 63))
        lam = sample_eigenvalues(sub, realizations, seed, workers=workers).eigenvalues
        lc = lam.conj()
        samples = np.prod((zc - lam) * (zc - lc) * (wb - lam) * (wb - lc), axis=1)
    mean = samples.mean()
    se = (samples.real.std(ddof=1) + 1j * samples.imag.std(ddof=1)) / math.sqrt(realizations) \
        if realizations > 1 else 0j
    factor = charpoly_prefactor(params) * (wb - zc) * hh
    sub_cn = constant_CN(EnsembleParams(N - 1, params.n, params.L)) if N > 1 else 1.0
    literal = constant_CN(params) / (1j ** (N - 2) * sub_cn) * (wb - zc) * hh
    est = factor * mean
    if abs(factor.real) > abs(factor.imag):
        se_est = complex(abs(factor) * se.real, abs(factor) * se.imag)
    else:
        se_est = complex(abs(factor) * se.imag, abs(factor) * se.real)
    return CharpolyComparison(
        exact=complex(kernel_S(zc, w, params)),
        estimate=complex(est),
        standard_error=se_est,
        literal_prefactor_estimate=complex(literal * mean),
        realizations=realizations,
    )


# --- the operator identity for the double sum ---------------------------------
#
# Bivariate Laurent polynomials are dicts {(power_z, power_w): coeff}.  D and A
# act on the first (active) variable; A has zero constant term and records
# any z^-1 it meets, which would integrate to a logarithm.

def sigma_polynomial(params: EnsembleParams) -> dict:
    N, n, L = params.N, params.n, params.L
    poly: dict = {}
    for k in range(N):
        for j in range(k + 1):
            c = math.exp(-(math.lgamma(L + j + 1) + math.lgamma(L + k + 1.5)
                           + math.lgamma(n - j + 0.5) + math.lgamma(n - k)))
            poly[(2 * j, 2 * k + 1)] = poly.get((2 * j, 2 * k + 1), 0.0) + c
            poly[(2 * k + 1, 2 * j)] = poly.get((2 * k + 1, 2 * j), 0.0) - c
    return poly


def _swap(poly: dict) -> dict:
    return {(b, a): c for (a, b), c in poly.items()}


def _shift(poly, p):
    return {(a + p, b): c for (a, b), c in poly.items()}


def _deriv(poly):
    return {(a - 1, b): a * c for (a, b), c in poly.items() if a != 0}


def _antideriv(poly, logs):
    out = {}
    for (a, b), c in poly.items():
        if a == -1:
            logs[(a, b)] = logs.get((a, b), 0.0) + c
            continue
        out[(a + 1, b)] = c / (a + 1)
    return out


def _apply_operator(poly: dict, params: EnsembleParams, logs: dict) -> dict:
    """``[x^{2n} A x^{-2n-2L-1} (x A)^L D (x^{-1} D)^L x^{2L} + x] poly`` in the first variable."""
    n, L = params.n, params.L
    p = _shift(poly, 2 * L)
    for _ in range(L):
        p = _shift(_deriv(p), -1)
    p = _deriv(p)
    for _ in range(L):
        p = _shift(_antideriv(p, logs), 1)
    p = _shift(p, -2 * n - 2 * L - 1)
    p = _antideriv(p, logs)
    p = _shift(p, 2 * n)
    return _add(p, _shift(poly, 1))


def _add(p, q, sign=1.0):
    out = dict(p)
    for key, c in q.items():
        out[key] = out.get(key, 0.0) + sign * c
    return out


def _rhs(params: EnsembleParams, shifted: bool) -> dict:
    n, L = params.n, params.L
    pref = 2.0 ** (2 * L + 2 * n) / math.pi
    out: dict = {}
    for k in range(0, 2 * n + 1):
        c = pref * math.exp(-(math.lgamma(2 * L + k + 1) + math.lgamma(2 * n - k + 1)))
        e = L + k if shifted else L
        out[(e, e)] = out.get((e, e), 0.0) + c
    return out


def _max_abs(poly: dict) -> float:
    return max((abs(c) for c in poly.values()), default=0.0)


@dataclass(frozen=True)
class SigmaDEReport:
    antisymmetry: float         # max coefficient of sigma(z,w) + sigma(w,z)
    sides: float                # max coefficient of LHS_z + LHS_w
    residual_literal: float     # LHS_z against the sum with (zw)^L
    residual_shifted: float     # LHS_z against the sum with (zw)^{L+k}
    scale: float                # max coefficient of LHS_z
    log_terms: int              # z^-1 terms met by the antiderivative


def sigma_de_residual(params: EnsembleParams) -> SigmaDEReport:
    """Apply both operator sides to the double sum and report coefficient residuals."""
    sigma = sigma_polynomial(params)
    logs: dict = {}
    lhs_z = _apply_operator(sigma, params, logs)
    lhs_w = _swap(_apply_operator(_swap(sigma), params, logs))
    drop = lambda p: {k: v for k, v in p.items() if v != 0.0}
    return SigmaDEReport(
        antisymmetry=_max_abs(drop(_add(sigma, _swap(sigma)))),
        sides=_max_abs(drop(_add(lhs_z, lhs_w))),
        residual_literal=_max_abs(drop(_add(lhs_z, _rhs(params, False), -1.0))),
        residual_shifted=_max_abs(drop(_add(lhs_z, _rhs(params, True), -1.0))),
        scale=_max_abs(lhs_z),
        log_terms=len(logs),
    )
