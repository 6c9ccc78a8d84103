"""Invariant suites behind ``quatsphere verify``.

Each check returns ``(passed, detail)``.  The ``fast`` level keeps N <= 5 and
skips Monte Carlo; ``full`` adds the statistical and large-N comparisons.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import asympt, kernel, quatlin, sampler
from .dataset import dumps_sample, loads_sample
from .params import EnsembleParams

LEVELS = ("fast", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _random_skew(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return a - a.T


# -- quatlin ---------------------------------------------------------------

def check_pfaffian():
    rng = np.random.default_rng(1)
    worst_det = worst_lap = 0.0
    for _ in range(60):
        dim = 2 * int(rng.integers(1, 7))
        a = _random_skew(rng, dim)
        pf = quatlin.pfaffian(a)
        worst_det = max(worst_det, _rel(pf ** 2, np.linalg.det(a)))
        if dim <= 8:
            scale = np.abs(a).max() ** (dim // 2)
            worst_lap = max(worst_lap, abs(pf - quatlin.pfaffian_laplace(a)) / scale)
    ok = worst_det < 1e-10 and worst_lap < 1e-12
    return ok, f"max rel |Pf^2-det| {worst_det:.1e}, max |Pf-Laplace|/scale {worst_lap:.1e}"


def check_qdet():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        x = sampler.ginibre_quat(5, 3, rng)
        w = x.dual() @ x
        d = quatlin.qdet(w)
        worst = max(worst, _rel(d ** 2, np.linalg.det(w.block).real))
    return worst < 1e-10, f"max rel |qdet^2 - det| {worst:.1e}"


def check_sqrt():
    rng = np.random.default_rng(3)
    w = sampler.wishart(6, 4, rng)
    s = quatlin.psd_sqrt(w)
    resid = np.abs((s @ s).block - w.block).max() / np.abs(w.block).max()
    real = quatlin.reality_residual(s.block)
    return resid < 1e-12 and real < 1e-12, f"|S^2 - A| {resid:.1e}, reality {real:.1e}"


def check_haar(N=5, draws=10):
    worst_u = worst_r = 0.0
    for i in range(draws):
        u = sampler.haar_symplectic(N, sampler.RngStream(4, i)).block
        worst_u = max(worst_u, np.abs(u @ u.conj().T - np.eye(2 * N)).max())
        worst_r = max(worst_r, quatlin.reality_residual(u))
    return worst_u < 1e-12 and worst_r < 1e-12, f"unitarity {worst_u:.1e}, reality {worst_r:.1e}"


# -- sampler ---------------------------------------------------------------

def _closure_residual(full: np.ndarray, stored: np.ndarray) -> float:
    """Largest mismatch between a block spectrum and stored values plus conjugates."""
    target = np.concatenate([stored, stored.conj()])
    cost = np.abs(full[:, None] - target[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max() / max(1.0, np.abs(full).max()))


def check_conjugate_closure(params=EnsembleParams(4, 6, 2), draws=5):
    worst = 0.0
    for i in range(draws):
        g = sampler.induced_spherical(params, sampler.RngStream(5, i))
        full = quatlin.eigenvalues(g.block)
        worst = max(worst, _closure_residual(full, sampler.extract_eigenvalues(g)))
    return worst < 1e-8, f"max closure residual {worst:.1e}"


def check_determinism():
    p = EnsembleParams(3, 5, 1)
    a = sampler.sample_eigenvalues(p, 6, seed=11)
    b = sampler.sample_eigenvalues(p, 6, seed=11, chunk=2)
    same = np.array_equal(a.eigenvalues, b.eigenvalues)
    text = dumps_sample(a, created="x")
    back = loads_sample(text)
    exact = np.array_equal(back.eigenvalues, a.eigenvalues)
    return same and exact, f"chunking invariant: {same}, file round trip exact: {exact}"


def check_projection():
    rng = np.random.default_rng(6)
    z = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    pts = sampler.stereographic_project(z)
    err = np.abs(np.linalg.norm(pts, axis=-1) - 1).max()
    south = np.allclose(sampler.stereographic_project(0.0), (0, 0, -1))
    return err < 1e-14 and south, f"max ||x|-1| {err:.1e}, origin to south pole: {south}"


# -- kernel ----------------------------------------------------------------

def check_skew_orthogonality(params=EnsembleParams(3, 4, 1)):
    g0 = kernel.norm_gk(0, params)
    worst_off = worst_norm = 0.0
    polys = [kernel.sop_coefficients(j, params) for j in range(2 * params.N)]
    for a in range(2 * params.N):
        for b in range(a + 1, 2 * params.N):
            v = kernel.skew_inner_polys(polys[a], polys[b], params)
            if a % 2 == 0 and b == a + 1:
                worst_norm = max(worst_norm, _rel(v, kernel.norm_gk(a // 2, params)))
            else:
                worst_off = max(worst_off, abs(v) / g0)
    ok = worst_off < 1e-8 and worst_norm < 1e-6
    return ok, f"off-diagonal/g0 {worst_off:.1e}, rel norm error {worst_norm:.1e}"


def check_density_n1():
    p = EnsembleParams(1, 1, 0)
    rng = np.random.default_rng(7)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0.01, 3, 100)
    exact = 24 * z.imag ** 2 / (math.pi * (1 + np.abs(z) ** 2) ** 4)
    err = np.abs(kernel.density(z, p) - exact).max()
    return err < 1e-12, f"max abs error {err:.1e}"


def check_mass(params=EnsembleParams(5, 7, 2)):
    val, _ = kernel.total_mass(params)
    err = _rel(val, params.N)
    return err < 1e-6, f"int rho = {val:.9f} (N={params.N})"


def check_kernel_routes(params=EnsembleParams(3, 5, 1)):
    z = np.array([0.3 + 0.7j, -1.1 + 0.2j, 0.05 + 2.0j])
    w = np.array([0.9 + 0.4j, 0.2 + 1.3j, -0.6 + 0.8j])
    a = kernel.kernel_S(z, w, params)
    b = kernel.kernel_S_sop(z, w, params)
    err = np.abs(a - b).max() / np.abs(b).max()
    return err < 1e-10, f"closed form vs skew-orthogonal sum {err:.1e}"


def check_partition_modulus():
    mods = [abs(kernel.partition_function(EnsembleParams(N, N + 2, 1))) for N in (2, 3)]
    err = max(abs(m - 1) for m in mods)
    return err < 1e-6, f"|C_N Pf gamma| = {mods[0]:.9f}, {mods[1]:.9f} (N=2,3)"


def check_radial(params=EnsembleParams(4, 6, 1)):
    r = np.array([0.3, 0.7, 1.5])
    from scipy.integrate import quad
    worst = 0.0
    for ri in r:
        ang, _ = quad(lambda t: float(kernel.density(ri * np.exp(1j * t), params)) * ri, 0, math.pi)
        worst = max(worst, _rel(kernel.radial_density(ri, params), ang))
    cdf_inf = float(kernel.radial_cdf(1e8, params))
    return worst < 1e-8 and abs(cdf_inf - params.N) < 1e-8, \
        f"radial vs angular integral {worst:.1e}, total {cdf_inf:.9f}"


# -- asympt ----------------------------------------------------------------

def check_radii():
    rad = asympt.radii(EnsembleParams(100, 140, 40))
    eps = (rad.r_out - rad.r_in) / 5
    got = (rad.r_in, rad.mid - eps, rad.mid + eps)
    want = (0.5345, 0.9354, 1.470)
    ok = all(float(f"{g:.4g}") == w for g, w in zip(got, want))
    return ok, "r_in, box bounds = " + ", ".join(f"{g:.4f}" for g in got)


def check_matching():
    p = EnsembleParams(100, 140, 40)
    rad = asympt.radii(p)
    errs = []
    for side, r0, far in (("inner", rad.r_in, 40.0), ("outer", rad.r_out, -40.0)):
        deep = asympt.edge_density(side, far, p)
        bulk = 2.0 / (math.pi * (1.0 + r0 * r0) ** 2)  # bulk law just inside the edge
        errs.append(_rel(deep, bulk))
    mass = _rel(asympt.annulus_mass(p), p.N)
    ok = max(errs) < 1e-12 and mass < 0.05
    return ok, f"edge->bulk matching {max(errs):.1e}, annulus mass rel error {mass:.1e}"


def check_near_real_zero():
    v = asympt.near_real_conjecture(np.linspace(0.9, 1.5, 7), 0.0)
    return bool(np.all(v == 0)), "conjectured profile vanishes on the real axis"


# -- full level ------------------------------------------------------------

def check_bulk_match():
    p = EnsembleParams(100, 140, 40)
    r = asympt.radii(p).mid
    exact = float(kernel.density(1j * r, p)) / p.scale
    law = float(asympt.bulk_density(1j * r, p))
    err = _rel(exact, law)
    return err < 0.03, f"rel error {err:.2%} at r={r:.4f}"


def check_edge_match():
    p = EnsembleParams(700, 980, 280)
    xi = np.linspace(-2, 2, 9)
    z = asympt.edge_point("inner", xi, math.pi / 2, p)
    exact = kernel.density(z, p) / p.scale
    law = asympt.edge_density("inner", xi, p)
    err = np.abs(exact - law) / law
    return bool(err.max() < 0.05), "rel errors " + " ".join(f"{e:.3f}" for e in err)


def check_mc_radial():
    from .regions import RadialShell
    from .stats import compare

    p = EnsembleParams(20, 28, 8)
    s = sampler.sample_eigenvalues(p, 400, seed=2024)
    cmp_ = compare(s.eigenvalues, s.realizations, p, RadialShell(), "exact", bins=20)
    ok = cmp_.pvalue is not None and cmp_.pvalue > 0.001
    return ok, f"chi2 {cmp_.chi2:.1f} on {cmp_.dof} bins, p={cmp_.pvalue}"


def check_skew_quadrature(params=EnsembleParams(3, 4, 1)):
    worst = 0.0
    for a, b in ((0, 1), (2, 3), (1, 4), (0, 3), (2, 5)):
        q, _ = kernel.skew_inner_quadrature(a, b, params)
        c = kernel.skew_inner(a, b, params)
        worst = max(worst, abs(q - c) / kernel.norm_gk(0, params))
    return worst < 1e-8, f"closed form vs quadrature {worst:.1e} (relative to g0)"


FAST = (
    ("quatlin.pfaffian", check_pfaffian),
    ("quatlin.qdet", check_qdet),
    ("quatlin.psd_sqrt", check_sqrt),
    ("sampler.haar_symplectic", check_haar),
    ("sampler.conjugate_closure", check_conjugate_closure),
    ("sampler.determinism", check_determinism),
    ("sampler.stereographic", check_projection),
    ("kernel.skew_orthogonality", check_skew_orthogonality),
    ("kernel.density_n1", check_density_n1),
    ("kernel.total_mass", check_mass),
    ("kernel.kernel_routes", check_kernel_routes),
    ("kernel.partition_modulus", check_partition_modulus),
    ("kernel.radial", check_radial),
    ("asympt.radii", check_radii),
    ("asympt.matching", check_matching),
    ("asympt.near_real_zero", check_near_real_zero),
)

FULL = FAST + (
    ("kernel.skew_quadrature", check_skew_quadrature),
    ("asympt.bulk_match", check_bulk_match),
    ("asympt.edge_match", check_edge_match),
    ("sampler.mc_radial", check_mc_radial),
)


def _run(name, fn) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed invariant, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def run_suite(level: str = "fast") -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    checks = FAST if level == "fast" else FULL
    return [_run(name, fn) for name, fn in checks]


def verify_dataset(sample, spot: int | None = 8) -> list[CheckResult]:
    """Re-draw stored realizations from their seed and check the stored values.

    Each regenerated block spectrum must equal the stored values together with
    their conjugates; an edited eigenvalue breaks this closure.  ``spot`` limits
    the check to that many realizations spread over the file (``None``: all).
    """
    def upper():
        bad = int((sample.eigenvalues.imag < 0).sum())
        return bad == 0, f"{bad} stored values below the real axis"

    def closure():
        R = sample.realizations
        idx = range(R) if spot is None or spot >= R else np.unique(np.linspace(0, R - 1, spot).astype(int))
        worst, worst_i = 0.0, -1
        for i in idx:
            g = sampler.induced_spherical(sample.params, sampler.RngStream(sample.seed, int(i)))
            res = _closure_residual(quatlin.eigenvalues(g.block), sample.eigenvalues[i])
            if res > worst:
                worst, worst_i = res, int(i)
        return worst < 1e-8, f"max residual {worst:.1e} (realization {worst_i}, {len(idx)} checked)"

    return [_run("dataset.upper_half_plane", upper), _run("dataset.conjugate_closure", closure)]
