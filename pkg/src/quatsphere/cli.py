"""``quatsphere`` command line: sampling, curves, comparisons, projection, checks.

Every command writes the JSON-header + CSV envelope (to ``--out`` or stdout).
With ``--plot`` a PNG is rendered next to ``--out``.

Exit codes: 0 success, 1 failed invariant or empty comparison, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import asympt, kernel
from .dataset import EnvelopeError, dumps_envelope, dumps_sample, load_sample, save_sample
from .params import EnsembleParams
from .regions import RadialShell, parse_region, region_to_dict
from .sampler import sample_eigenvalues, stereographic_project
from .stats import REFERENCES, EmptyRegionError, compare, reference_curve

log = logging.getLogger("quatsphere")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CURVE_KINDS = ("exact", "radial", "bulk", "edge", "near_real")

DEFAULTS = {
    "realizations": 100,
    "seed": 0,
    "workers": 1,
    "bins": "fd",
    "kind": None,
    "const": 1.0,
    "level": "fast",
}
CONFIG_KEYS = ("N", "n", "L", "realizations", "seed", "workers", "out", "region", "bins", "kind",
               "const", "level", "grid", "plot")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a sampling run."""

    N: int
    n: int
    L: int
    realizations: int
    seed: int
    workers: int = 1
    out: str | None = None
    region: str | None = None
    bins: str = "fd"

    @property
    def params(self) -> EnsembleParams:
        return EnsembleParams(self.N, self.n, self.L)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


# -- argument handling ------------------------------------------------------

def _add_params(p):
    g = p.add_argument_group("ensemble")
    g.add_argument("--N", type=int, help="matrix size (quaternion)")
    g.add_argument("--n", type=int, help="Wishart size, n >= N")
    g.add_argument("--L", type=int, help="inducing exponent, L >= 0")


def _add_common(p):
    p.add_argument("--config", type=Path, help="JSON file with the same keys as the flags")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quatsphere", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw eigenvalues and store the upper-half-plane values")
    _add_params(p)
    _add_common(p)
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("density-curve", help="exact or limiting density along a line")
    _add_params(p)
    _add_common(p)
    p.add_argument("--kind", choices=CURVE_KINDS)
    p.add_argument("--grid", help="start:stop:count for the curve coordinate")
    p.add_argument("--path", choices=("ray", "edge", "near-real"),
                   help="for --kind exact: evaluate along a ray, across an edge, or near the real axis")
    p.add_argument("--phi", type=float, default=math.pi / 2, help="ray / edge angle (default pi/2)")
    p.add_argument("--side", choices=("inner", "outer"), default="inner")
    p.add_argument("--x", type=float, help="Re z for near-real curves (default: mid radius)")
    p.add_argument("--const", type=float)
    p.add_argument("--plane", help="xmin:xmax:nx,ymin:ymax:ny (write --plane=... when xmin is "
                                   "negative); writes re,im,density instead of a curve")

    p = sub.add_parser("compare", help="histogram a dataset in a region against a reference")
    p.add_argument("dataset", type=Path)
    _add_params(p)
    _add_common(p)
    p.add_argument("--region", help="strip:W[,ylo,yhi] | sector:rlo,rhi,tlo,thi | box:H,xlo,xhi | "
                                    "radial[:rlo,rhi] | preset-bulk | preset-inner | preset-real")
    p.add_argument("--kind", choices=REFERENCES, help="reference density (default exact)")
    p.add_argument("--bins", help="fd, a bin count, or comma-separated edges")
    p.add_argument("--const", type=float)
    p.add_argument("--min-expected", type=float, default=100.0)

    p = sub.add_parser("project", help="map a dataset to the unit sphere")
    p.add_argument("dataset", type=Path)
    _add_common(p)
    p.add_argument("--ring-points", type=int, default=360)

    p = sub.add_parser("verify", help="run the invariant suites")
    _add_common(p)
    p.add_argument("--level", choices=("fast", "full"))
    p.add_argument("--dataset", type=Path, help="also re-derive and check a stored dataset")
    p.add_argument("--spot", type=int, default=8, help="realizations to re-derive (0: all)")
    return ap


def _merge_config(args) -> argparse.Namespace:
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(cfg) - set(CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key in CONFIG_KEYS:
        if hasattr(args, key) and getattr(args, key) in (None, False) and key in cfg:
            setattr(args, key, cfg[key])
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _params(args, required=True) -> EnsembleParams | None:
    vals = (args.N, args.n, args.L)
    if all(v is None for v in vals) and not required:
        return None
    if any(v is None for v in vals):
        raise UsageError("--N, --n and --L are all required")
    try:
        return EnsembleParams(*vals)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _parse_grid(spec: str):
    try:
        a, b, c = spec.split(":")
        return np.linspace(float(a), float(b), int(c))
    except ValueError:
        raise UsageError(f"grid must be start:stop:count, got {spec!r}") from None


def _emit(text: str, out) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _figure_path(args) -> Path | None:
    if not args.plot:
        return None
    if not args.out:
        raise UsageError("--plot needs --out (the figure is written next to it)")
    return Path(args.out).with_suffix(".png")


# -- commands ---------------------------------------------------------------

def cmd_sample(args) -> int:
    params = _params(args)
    cfg = RunConfig(params.N, params.n, params.L, int(args.realizations), int(args.seed),
                    int(args.workers), args.out)
    if cfg.realizations <= 0:
        raise UsageError("--realizations must be positive")
    sample = sample_eigenvalues(params, cfg.realizations, cfg.seed, workers=cfg.workers)
    if args.out:
        save_sample(sample, args.out)
    else:
        sys.stdout.write(dumps_sample(sample))
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_sphere

        pts = stereographic_project(np.concatenate([sample.flat(), sample.flat().conj()]))
        plot_sphere(pts, fig, _rings(params))
    log.info("stored %d eigenvalues from %d realizations", sample.eigenvalues.size, sample.realizations)
    return EXIT_OK


def _curve(args, params):
    s = params.scale
    rad = asympt.radii(params)
    kind = args.kind or "exact"
    path = args.path or {"bulk": "ray", "edge": "edge", "near_real": "near-real", "radial": "ray",
                         "exact": "ray"}[kind]
    if kind == "bulk" and path != "ray" or kind == "edge" and path != "edge" \
            or kind == "near_real" and path != "near-real":
        raise UsageError(f"--kind {kind} does not support --path {path}")
    x0 = rad.mid if args.x is None else args.x
    default_grid = {"ray": f"0:{3 * rad.mid if math.isfinite(rad.mid) else 3}:301",
                    "edge": "-3:3:121", "near-real": "0:4:201"}[path]
    t = _parse_grid(args.grid or default_grid)
    meta = {"kind": kind, "path": path}
    if kind == "radial":
        meta.update(coordinate="r = |z|", value="expected eigenvalues per unit radius in the upper half plane")
        return t, kernel.radial_density(t, params), meta
    if path == "ray":
        z = t * np.exp(1j * args.phi)
        meta.update(coordinate="t, z = t e^{i phi}", phi=args.phi, value="rho(z)/(n+L)")
        val = kernel.density(z, params) / s if kind == "exact" else asympt.bulk_density(z, params)
        return t, val, meta
    if path == "edge":
        z = asympt.edge_point(args.side, t, args.phi, params)
        meta.update(coordinate=f"xi, |z| = r_{args.side} + xi/sqrt(n+L)", side=args.side, phi=args.phi,
                    value="rho(z)/(n+L)")
        val = kernel.density(z, params) / s if kind == "exact" else asympt.edge_density(args.side, t, params)
        return t, val, meta
    meta.update(coordinate="y = sqrt(n+L) Im z", x=x0, value="rho(z)/sqrt(n+L)", const=args.const)
    if kind == "exact":
        val = kernel.density(x0 + 1j * t / math.sqrt(s), params) / math.sqrt(s)
    else:
        val = asympt.near_real_conjecture(x0, t, params, args.const)
    return t, val, meta


def cmd_density_curve(args) -> int:
    params = _params(args)
    base = {"format": "quatsphere.curve/1", "params": params.as_dict()}
    if args.plane:
        try:
            xs, ys = (_parse_grid(part) for part in args.plane.split(","))
        except ValueError:
            raise UsageError("--plane must be xmin:xmax:nx,ymin:ymax:ny") from None
        if ys.min() < 0:
            raise UsageError("the density is defined for Im z >= 0")
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        rho = kernel.density(xx + 1j * yy, params)
        rows = zip(xx.ravel(), yy.ravel(), rho.ravel())
        _emit(dumps_envelope({**base, "format": "quatsphere.grid/1"}, ("re", "im", "density"), rows), args.out)
        fig = _figure_path(args)
        if fig is not None:
            from .plotting import _pyplot

            plt = _pyplot()
            f, ax = plt.subplots(figsize=(6, 4))
            m = ax.pcolormesh(xs, ys, rho.T, shading="auto")
            f.colorbar(m, ax=ax, label="density")
            ax.set_xlabel("Re z")
            ax.set_ylabel("Im z")
            f.savefig(fig, dpi=120, bbox_inches="tight")
            plt.close(f)
        return EXIT_OK
    t, val, meta = _curve(args, params)
    _emit(dumps_envelope({**base, **meta}, ("coordinate", "value"), zip(t, np.asarray(val, float))),
          args.out)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_curves

        plot_curves(t, {meta["kind"]: val}, fig, meta["coordinate"], meta["value"])
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        sample = load_sample(args.dataset)
    except (OSError, EnvelopeError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load dataset {args.dataset}: {exc}") from None
    given = _params(args, required=False)
    if given is not None and given != sample.params:
        raise UsageError(f"reference parameters {given} differ from the dataset's {sample.params}")
    params = sample.params
    if not args.region:
        raise UsageError("--region is required")
    try:
        region = parse_region(args.region, params)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad region {args.region!r}: {exc}") from None
    reference = args.kind or "exact"
    header = {"format": "quatsphere.comparison/1", "params": params.as_dict(), "seed": sample.seed,
              "realizations": sample.realizations, "dataset": str(args.dataset)}
    try:
        result = compare(sample.eigenvalues, sample.realizations, params, region, reference,
                         args.bins, args.const, args.min_expected)
    except EmptyRegionError as exc:
        header.update(status="empty-region", region=region_to_dict(region), reference=reference,
                      in_region=0, message=str(exc))
        _emit(dumps_envelope(header, ("bin_lo", "bin_hi", "center", "count"), ()), args.out)
        print(f"empty region: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header.update(status="ok", **result.summary())
    _emit(dumps_envelope(header, result.columns, result.rows()), args.out)
    p = result.pvalue
    print(f"{result.hist.total} eigenvalues in region; chi2 = {result.chi2:.2f} on {result.dof} bins"
          + ("" if p is None else f", p = {p:.4g}"), file=sys.stderr)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_comparison

        lo, hi = result.hist.edges[0], result.hist.edges[-1]
        x = np.linspace(lo, hi, 400)
        if isinstance(region, RadialShell) or region.variable == "r":
            x = x[x > 0]
        plot_comparison(result, fig, (x, reference_curve(reference, params, region, x, args.const)))
    return EXIT_OK


def _rings(params, count=360):
    rad = asympt.radii(params)
    theta = np.linspace(0, 2 * math.pi, count, endpoint=False)
    out = []
    for r in (rad.r_in, rad.r_out):
        out.append(stereographic_project(np.full(count, np.inf + 0j) if math.isinf(r) else r * np.exp(1j * theta)))
    return out


def cmd_project(args) -> int:
    try:
        sample = load_sample(args.dataset)
    except (OSError, EnvelopeError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load dataset {args.dataset}: {exc}") from None
    params = sample.params
    z = sample.flat()
    eig = stereographic_project(z)
    conj = stereographic_project(z.conj())
    rings = _rings(params, args.ring_points)
    rad = asympt.radii(params)
    header = {"format": "quatsphere.sphere/1", "params": params.as_dict(), "seed": sample.seed,
              "realizations": sample.realizations,
              "ring_heights": [(float(m) - 1) / (float(m) + 1) if math.isfinite(m) else 1.0
                               for m in (rad.mu1, rad.mu2)]}

    def rows():
        for label, pts in (("eigenvalue", eig), ("conjugate", conj), ("r_in", rings[0]), ("r_out", rings[1])):
            for x, y, w in pts:
                yield x, y, w, label

    _emit(dumps_envelope(header, ("x", "y", "z", "source"), rows()), args.out)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_sphere

        plot_sphere(np.concatenate([eig, conj]), fig, rings)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite, verify_dataset

    results = run_suite(args.level)
    if args.dataset is not None:
        try:
            sample = load_sample(args.dataset)
        except (OSError, EnvelopeError, ValueError, KeyError) as exc:
            from .verify import CheckResult

            results.append(CheckResult("dataset.load", False, str(exc), 0.0))
        else:
            results.extend(verify_dataset(sample, None if args.spot == 0 else args.spot))
    for r in results:
        print(r.line(), file=sys.stderr)
    failed = [r.name for r in results if not r.passed]
    header = {"format": "quatsphere.verify/1", "level": args.level, "passed": not failed, "failed": failed}
    rows = ((r.name, "PASS" if r.passed else "FAIL", r.detail, f"{r.seconds:.3f}") for r in results)
    _emit(dumps_envelope(header, ("check", "status", "detail", "seconds"), rows), args.out)
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "density-curve": cmd_density_curve,
    "compare": cmd_compare,
    "project": cmd_project,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _merge_config(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"quatsphere {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
