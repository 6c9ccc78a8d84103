"""Induced spherical real-quaternion matrices and their eigenvalues.

The construction is ``G = U (Y^D Y)^{1/2}`` with ``Y = X A^{-1/2}``, where
``X`` is an (N+L) x N quaternion Ginibre matrix, ``A`` an N x N quaternion
Wishart matrix with parameter ``n`` and ``U`` Haar on the symplectic group.
Every real component of every Gaussian draw is N(0, 1); the construction is
invariant under a common rescaling so the variance convention is immaterial.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .params import EnsembleParams
from .quatlin import (
    NearSingularError,
    QuatMatrix,
    components_to_block,
    eigenvalues,
    psd_inv_sqrt,
    psd_sqrt,
)

log = logging.getLogger(__name__)

GENERATOR_VERSION = "quatsphere-sampler/1"
PAIR_RTOL = 1e-8
WISHART_MAX_CONDITION = 1e12


class PairingError(ArithmeticError):
    def __init__(self, residual: float, tolerance: float):
        super().__init__(f"unpaired eigenvalue: conjugate residual {residual:.3e} > {tolerance:.3e}")
        self.residual = residual
        self.tolerance = tolerance


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by ``(seed, stream)``.

    Streams are split with numpy's ``SeedSequence`` spawn keys, so distinct
    stream indices give statistically independent generators.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def ginibre_quat(rows: int, cols: int, rng, sigma: float = 1.0) -> QuatMatrix:
    if rows <= 0 or cols <= 0:
        raise ValueError("Ginibre dimensions must be positive")
    gen = _as_generator(rng)
    return QuatMatrix.from_components(sigma * gen.standard_normal((rows, cols, 4)))


def wishart(n: int, N: int, rng, sigma: float = 1.0) -> QuatMatrix:
    """``A = X^D X`` with ``X`` an n x N quaternion Ginibre draw."""
    if n < N:
        raise ValueError(f"Wishart parameter n={n} must be >= N={N}")
    x = ginibre_quat(n, N, rng, sigma)
    b = x.block.conj().T @ x.block
    return QuatMatrix(0.5 * (b + b.conj().T), check=False)


def haar_symplectic(N: int, rng) -> QuatMatrix:
    """Haar-distributed N x N unitary quaternion matrix (an element of USp(2N)).

    Quaternionic Householder QR of a quaternion Ginibre matrix, with the
    unit-quaternion phases of R's diagonal moved into Q so that R has a
    positive real diagonal; that makes the factorization unique and Q Haar.
    """
    if N <= 0:
        raise ValueError("N must be positive")
    gen = _as_generator(rng)
    a = components_to_block(gen.standard_normal((N, N, 4)))
    q = np.eye(2 * N, dtype=complex)
    phases = np.empty((N, 2, 2), dtype=complex)
    for k in range(N):
        s = 2 * k
        x = a[s:, s:s + 2]
        xnorm = np.sqrt(np.sum(np.abs(x[:, 0]) ** 2))
        head = x[:2, :]
        hnorm = np.sqrt(abs(head[0, 0]) ** 2 + abs(head[0, 1]) ** 2)
        u = head / hnorm if hnorm > 0 else np.eye(2)
        v = x.copy()
        v[:2, :] += u * xnorm
        vnorm2 = np.sum(np.abs(v[:, 0]) ** 2)
        if vnorm2 > 0:
            a[s:, :] -= (2.0 / vnorm2) * v @ (v.conj().T @ a[s:, :])
            q[:, s:] -= (2.0 / vnorm2) * (q[:, s:] @ v) @ v.conj().T
        phases[k] = -u
    for k in range(N):
        s = 2 * k
        q[:, s:s + 2] = q[:, s:s + 2] @ phases[k]
    return QuatMatrix(q, check=False)


def induced_spherical(params: EnsembleParams, rng, sigma: float = 1.0) -> QuatMatrix:
    gen = _as_generator(rng)
    N, M = params.N, params.M
    x = ginibre_quat(M, N, gen, sigma)
    for attempt in (0, 1):
        try:
            a_inv_half = psd_inv_sqrt(wishart(params.n, N, gen, sigma), WISHART_MAX_CONDITION)
            break
        except NearSingularError:
            if attempt:
                raise
            log.warning("near-singular Wishart draw for %s; resampling once", params)
    y = x.block @ a_inv_half.block
    yy = y.conj().T @ y
    root = psd_sqrt(QuatMatrix(0.5 * (yy + yy.conj().T), check=False))
    u = haar_symplectic(N, gen)
    return u @ root


def pair_conjugates(ev, rtol: float = PAIR_RTOL) -> np.ndarray:
    """Greedy nearest-conjugate pairing of a conjugation-closed spectrum.

    Returns one representative (Im >= 0) per pair in index order of the
    first member. Ties go to the lowest index.
    """
    ev = np.asarray(ev, dtype=complex)
    if ev.size % 2:
        raise PairingError(float("inf"), 0.0)
    tol = rtol * max(np.abs(ev).max(initial=0.0), 1.0)
    used = np.zeros(ev.size, dtype=bool)
    out = []
    for i in range(ev.size):
        if used[i]:
            continue
        used[i] = True
        dist = np.abs(ev - ev[i].conjugate())
        dist[used] = np.inf
        j = int(np.argmin(dist))
        if not np.isfinite(dist[j]) or dist[j] > tol:
            raise PairingError(float(dist[j]), tol)
        used[j] = True
        a, b = ev[i], ev[j]
        if abs(a.imag) <= tol and abs(b.imag) <= tol:
            log.info("real eigenvalue pair at %r kept once", a.real)
            out.append(complex(0.5 * (a.real + b.real), 0.0))
        else:
            out.append(a if a.imag >= b.imag else b)
    return np.array(out)


def extract_eigenvalues(g: QuatMatrix, rtol: float = PAIR_RTOL) -> np.ndarray:
    return pair_conjugates(eigenvalues(g.block), rtol)


def stereographic_project(z) -> np.ndarray:
    """Inverse stereographic projection of the plane onto the unit sphere.

    0 maps to the south pole (0, 0, -1), the unit circle to the equator and
    infinity to the north pole. Output has shape ``z.shape + (3,)``.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    inf = ~np.isfinite(z)
    zz = np.where(inf, 0, z)
    d = 1.0 + np.abs(zz) ** 2
    out[..., 0] = 2 * zz.real / d
    out[..., 1] = 2 * zz.imag / d
    out[..., 2] = (np.abs(zz) ** 2 - 1.0) / d
    out[inf] = (0.0, 0.0, 1.0)
    return out


@dataclass
class EigenSample:
    """Upper-half-plane eigenvalues, ``N`` per realization, in realization order."""

    params: EnsembleParams
    seed: int
    eigenvalues: np.ndarray  # shape (realizations, N)
    generator_version: str = GENERATOR_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=complex)
        if ev.ndim != 2 or ev.shape[1] != self.params.N:
            raise ValueError(f"expected shape (R, {self.params.N}), got {ev.shape}")
        if (ev.imag < 0).any():
            raise ValueError("stored eigenvalues must lie in the closed upper half plane")
        self.eigenvalues = ev

    @property
    def realizations(self) -> int:
        return self.eigenvalues.shape[0]

    def flat(self) -> np.ndarray:
        return self.eigenvalues.ravel()


def _realization_chunk(args) -> np.ndarray:
    params, seed, start, stop = args
    out = np.empty((stop - start, params.N), dtype=complex)
    for i in range(start, stop):
        g = induced_spherical(params, RngStream(seed, i))
        out[i - start] = extract_eigenvalues(g)
    return out


def sample_eigenvalues(params: EnsembleParams, realizations: int, seed: int,
                       workers: int = 1, chunk: int | None = None) -> EigenSample:
    """Draw ``realizations`` matrices; realization i uses stream i of ``seed``.

    The payload does not depend on ``workers``: chunks are merged in
    realization order.
    """
    if realizations <= 0:
        raise ValueError("realizations must be positive")
    workers = max(1, int(workers))
    if chunk is None:
        chunk = max(1, min(256, -(-realizations // (4 * workers))))
    jobs = [(params, seed, s, min(s + chunk, realizations))
            for s in range(0, realizations, chunk)]
    if workers == 1 or len(jobs) == 1:
        parts = [_realization_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_realization_chunk, jobs))
    return EigenSample(params, seed, np.concatenate(parts))
