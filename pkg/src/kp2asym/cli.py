"""Command line interface.  Exit codes: 0 ok, 2 validation failure, 3 resolution/budget failure."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .core_numerics import GridField, SpectralGrid, read_kp2grid, write_kp2grid
from .errors import KP2Error, ValidationError
from .phase_geometry import PhaseParams, stationary_points
from .scattering import (InitialCondition, ScatteringData, born_smooth_part, check_restriction,
                         gaussian_family, sgn_minus_re, symmetry_defect, zero_data)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def emit(obj) -> None:
    click.echo(json.dumps(_jsonable(obj), indent=2, sort_keys=True))


def parse_complex(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"cannot parse {text!r} as re,im") from exc
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise ValidationError(f"expected re,im, got {text!r}")
    return complex(parts[0], parts[1])


def scattering_from_grid(fld: GridField, name: str = "grid") -> ScatteringData:
    """Scattering data tabulated on a grid; zero outside the disc."""
    R = fld.grid.radius

    def f(k):
        k = np.asarray(k, dtype=complex)
        out = np.zeros(k.shape, dtype=complex)
        inside = np.abs(k) <= R
        if np.any(inside):
            out[inside] = sgn_minus_re(k[inside]) * fld.interpolate(k[inside])
        return out

    return ScatteringData(f, R, None, name, {"grid": [R, fld.grid.nr, fld.grid.na]})


def load_scattering(spec: str, amp: float, center: str) -> ScatteringData:
    if spec == "gaussian":
        return gaussian_family(amp, parse_complex(center))
    if spec == "zero":
        return zero_data()
    p = Path(spec)
    if not p.exists():
        raise ValidationError(f"scattering {spec!r} is neither a family nor a file")
    return scattering_from_grid(read_kp2grid(p), p.name)


def scattering_options(f):
    f = click.option("--center", default="0,0.3", show_default=True, help="Gaussian centre re,im.")(f)
    f = click.option("--amp", default=float(1 / np.sqrt(np.pi)), show_default=True, type=float)(f)
    f = click.option("--scattering", "--family", "scattering", default="gaussian", show_default=True,
                     help="gaussian, zero, or a KP2GRID file.")(f)
    return f


def phase_options(f):
    f = click.option("--t", "t", default=1.0, type=float, show_default=True)(f)
    f = click.option("--eta", required=True, type=float)(f)
    f = click.option("--xi", required=True, type=float)(f)
    return f


class KP2Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except KP2Error as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(exc.exit_code)


@click.group(cls=KP2Group)
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Reconstruction and asymptotics for KP-2 scattering data."""
    import logging

    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@main.command()
@click.option("--u0-amp", default=0.05, type=float, show_default=True, help="Gaussian u0 amplitude.")
@click.option("--u0-width", default=1.0, type=float, show_default=True)
@click.option("--support", default=6.0, type=float, show_default=True, help="Half-width of the u0 box.")
@click.option("--grid-radius", default=6.0, type=float, show_default=True)
@click.option("--nr", default=64, type=int, show_default=True)
@click.option("--na", default=64, type=int, show_default=True)
@click.option("--out", "out", required=True, type=click.Path(dir_okay=False))
def transform(u0_amp, u0_width, support, grid_radius, nr, na, out):
    """Born scattering data of a Gaussian u0, written as a KP2GRID file."""
    if u0_width <= 0 or support <= 0:
        raise ValidationError("width and support must be positive")
    u0 = InitialCondition(lambda x, y: u0_amp * np.exp(-(x**2 + y**2) / u0_width**2), support)
    F = born_smooth_part(u0)
    grid = SpectralGrid(grid_radius, nr, na)
    fld = GridField.from_function(grid, F)
    write_kp2grid(out, fld)
    emit({"out": out, "symmetry_defect": symmetry_defect(F), "max_abs_F": float(np.max(np.abs(fld.values)))})


@main.command("check-norm")
@scattering_options
def check_norm(scattering, amp, center):
    """Restriction integral sup_z iint |F|/|k - z| against 2 pi, plus the symmetry defect."""
    F = load_scattering(scattering, amp, center)
    val = check_restriction(F)
    emit({"restriction": val, "ratio": val / (2 * np.pi), "contraction": bool(val < 2 * np.pi),
          "symmetry_defect": 0.0 if F.is_zero() else symmetry_defect(F)})


@main.command("solve-dbar")
@phase_options
@click.option("--tol", default=1e-8, type=float, show_default=True)
@click.option("--max-iter", default=50, type=int, show_default=True)
@click.option("--grid-radius", default=6.0, type=float, show_default=True)
@click.option("--nr", default=128, type=int, show_default=True)
@click.option("--na", default=128, type=int, show_default=True)
@scattering_options
@click.option("--out", "out", default="dbar", show_default=True,
              help="Prefix: writes <out>_mu.kp2grid, <out>_nu.kp2grid, <out>_diagnostics.json.")
def solve_dbar(xi, eta, t, tol, max_iter, grid_radius, nr, na, scattering, amp, center, out):
    """Solve the dbar system on a polar grid."""
    from .dbar_solver import solve

    F = load_scattering(scattering, amp, center)
    sol = solve(F, PhaseParams(xi, eta, t), tol=tol, max_iter=max_iter,
                grid=SpectralGrid(grid_radius, nr, na))
    write_kp2grid(f"{out}_mu.kp2grid", sol.mu)
    write_kp2grid(f"{out}_nu.kp2grid", sol.nu)
    diag = sol.diagnostics()
    with open(f"{out}_diagnostics.json", "w") as fh:
        json.dump(_jsonable(diag), fh, indent=2, sort_keys=True)
    emit(diag)


@main.command()
@phase_options
def phase(xi, eta, t):
    """Stationary points, Hessians, theta, v and regime."""
    p = PhaseParams(xi, eta, t)
    sp = stationary_points(p)
    emit({**p.as_dict(), "stationary_points": list(sp.points), "hessians": list(sp.hessians),
          "phase_values": list(sp.phase_values), "degenerate": sp.degenerate})


@main.command()
@phase_options
@scattering_options
@click.option("--at", "at", required=True, help="Spectral point re,im.")
def asymptotics(xi, eta, t, scattering, amp, center, at):
    """Uniform composite (mu_hat, nu_hat) at one spectral point."""
    from .asymptotics import uniform_composite

    F = load_scattering(scattering, amp, center)
    comp = uniform_composite(F, PhaseParams(xi, eta, t))
    k = np.array([parse_complex(at)])
    emit({"mu_hat": complex(comp.mu_hat(k)[0]), "nu_hat": complex(comp.nu_hat(k)[0]),
          "regime": comp.regime, "order_tag": comp.order_tag, "charts_used": comp.charts_used(k)})


@main.command()
@click.option("--x", "x", required=True, type=float)
@click.option("--y", "y", required=True, type=float)
@click.option("--t", "t", required=True, type=float)
@click.option("--method", type=click.Choice(["quadrature", "theorem1", "pipeline", "all"]),
              default="quadrature", show_default=True)
@click.option("--constants", default=None, type=click.Path(dir_okay=False))
@scattering_options
def reconstruct(x, y, t, method, constants, scattering, amp, center):
    """u(x, y, t) by one or all methods."""
    from .reconstruct import pipeline_value, quadrature_value, theorem1_value

    F = load_scattering(scattering, amp, center)
    p = PhaseParams.from_xyt(x, y, t)
    out = {"x": x, "y": y, "t": t, "regime": p.u_regime}
    methods = ["quadrature", "theorem1", "pipeline"] if method == "all" else [method]
    for m in methods:
        try:
            if m == "quadrature":
                q = quadrature_value(F, x, y, t)
                out[m] = {"u": q.u, "envelope": q.envelope(), "nodes": q.nodes}
            elif m == "theorem1":
                v = theorem1_value(F, x, y, t, constants)
                out[m] = {"u": v.u, "order_tag": v.order_tag}
            else:
                v = pipeline_value(F, x, y, t)
                out[m] = {"u": v.u, "born_term": v.born_term, "iterations": v.iterations,
                          "err_est": v.err_est}
        except KP2Error as exc:
            if method != "all":
                raise
            out[m] = {"error": f"{type(exc).__name__}: {exc}", "exit_code": exc.exit_code}
    emit(out)


@main.command()
@click.option("--out", "out", default=None, type=click.Path(dir_okay=False),
              help="Constants file (default: the packaged one or $KP2_CONSTANTS).")
@scattering_options
def calibrate(out, scattering, amp, center):
    """Run the constant oracles and write the constants file."""
    from .reconstruct import calibrate as run, constants_path

    F = load_scattering(scattering, amp, center)
    rec = run(F, out)
    emit({"path": str(constants_path(out)),
          "entries": {e["name"]: {"value": e["value"], "margin_over_tolerance":
                                  e["oracle"]["margin_over_tolerance"], "decisive": e["oracle"]["decisive"]}
                      for e in rec["entries"]}})


@main.group()
def verify():
    """Checks of the special-integral formulas."""


@verify.command()
@click.option("--case", required=True, type=click.Choice(["A1", "A2", "B:J", "B:Jmp", "B:J1", "B:J1mp"]))
@click.option("--point", required=True, help="Probe point re,im.")
@click.option("--v2", default=0.0, type=float, show_default=True)
def appendix(case, point, v2):
    """Numeric value against the closed formula at one point."""
    from . import special_integrals as si

    z = parse_complex(point)
    if case == "A1":
        rep = si.verify_appendix_A1(z)
    elif case == "A2":
        rep = si.verify_appendix_A2(z, v2)
    else:
        rep = si.verify_appendix_B(case.split(":")[1], z, v2)
    emit(rep)


@main.command("sweep")
@click.option("--config", "config", required=True, type=click.Path(exists=True, dir_okay=False))
def sweep_cmd(config):
    """Evaluate the configured methods over a parameter grid and write CSV, JSON and plot data."""
    from .reconstruct import SweepConfig, sweep, write_outputs

    cfg = SweepConfig.from_file(config)
    fld, summary = sweep(cfg, write=False)
    paths = write_outputs(fld, summary, cfg)
    emit({"samples": len(fld.samples), "files": paths,
          "failed": sum(1 for s in fld.samples if s.error)})


if __name__ == "__main__":
    main()
