"""Command line front end.

Every subcommand reads model parameters from ``--config <file.json>`` (except
``phase-diagram``), writes CSV where a table is produced and prints a JSON
report on standard output.

Exit codes: 0 success, 1 bad configuration or arguments, 2 I/O failure,
3 classification inconsistency, 4 lattice too small, 5 degenerate response.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import dynamics, io, spectra
from .errors import (CageError, ConfigError, ConsistencyError,
                     DegenerateResponseError, InconclusiveLatticeError)
from .model import build_bloch, wilson_loop
from .params import (Boundary, LadderParams, LatticeSpec, NChainParams,
                     SiteIndex, gauge_fix, gauge_transform, params_from_dict)
from .transfer import flat_band_conditions, nchain_prohibited

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_INCONSISTENT = 3
EXIT_INCONCLUSIVE = 4
EXIT_DEGENERATE = 5


class UsageError(Exception):
    pass


def load_config(path, degrees=False):
    """Parameters and lattice from a JSON config file.

    The optional ``lattice`` object takes ``cells`` and ``boundary``.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    p = params_from_dict(doc, degrees=degrees, extra_keys=("lattice",))
    lat_doc = doc.get("lattice", {})
    if not isinstance(lat_doc, dict):
        raise ConfigError("'lattice' must be an object")
    unknown = set(lat_doc) - {"cells", "boundary"}
    if unknown:
        raise ConfigError(f"unknown lattice keys: {sorted(unknown)}")
    try:
        lat = LatticeSpec(lat_doc.get("cells", dynamics.DEFAULT_CELLS),
                          Boundary(lat_doc.get("boundary", "periodic")))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad lattice: {exc}") from exc
    return p, lat


def _emit(report):
    print(io.dumps(report))


def _require_ladder(p, cmd):
    if not isinstance(p, LadderParams):
        raise ConfigError(f"'{cmd}' needs a ladder config")


def _roots_report(mp):
    return {"roots": [r for r, _ in mp.roots],
            "multiplicities": [m for _, m in mp.roots],
            "degree": mp.degree}


# -- subcommands -----------------------------------------------------------------

def cmd_bands(args):
    p, _ = load_config(args.config, args.degrees)
    _require_ladder(p, "bands")
    if args.n_points < 2:
        raise UsageError("--n-points must be at least 2")
    ks = np.linspace(args.k_min, args.k_max, args.n_points)
    grid = spectra.dispersion(gauge_fix(p), ks)
    io.write_bands_csv(args.out, grid)
    _emit({"out": args.out, "n_points": args.n_points,
           "max_spread": float(grid.spread().max())})
    return EXIT_OK


def _classify_nchain(p, lat):
    report = {"flat_band": {"prohibited_paths": nchain_prohibited(p)}}
    cls = spectra.classify_nchain(p)
    report["class"] = cls.kind.value
    if cls.n is not None:
        report["n"] = cls.n
        report["minimal_poly"] = _roots_report(cls.minimal_poly)
        report["flat_energy"] = list(cls.flat_energy)
        report["local_range"] = spectra.local_range(p, lat, SiteIndex(1, lat.cells // 2))
    return report


def _classify_ladder(p, lat):
    q = gauge_fix(p)
    fb = flat_band_conditions(q)
    report = {"flat_band": {"chain_nilpotent": fb.chain_nilpotent,
                            "rung_balanced": fb.rung_balanced,
                            "is_cage": fb.is_cage}}
    cls = spectra.classify(q)
    report["class"] = cls.kind.value
    if cls.is_flat:
        report["flat_energy"] = list(cls.flat_energy)
        report["minimal_poly"] = _roots_report(cls.minimal_poly)
        report["local_range"] = spectra.local_range(q, lat, SiteIndex(1, lat.cells // 2))
    else:
        report["minimal_poly"] = _roots_report(
            spectra.minimal_polynomial(build_bloch(q, 0.0)))
    return report


def cmd_classify(args):
    p, lat = load_config(args.config, args.degrees)
    try:
        if isinstance(p, NChainParams):
            report = _classify_nchain(p, lat)
        else:
            report = _classify_ladder(p, lat)
    except ConsistencyError as exc:
        _emit({"class": None, "error": str(exc),
               "verdicts": {k: str(getattr(v, "value", v)) for k, v in exc.verdicts.items()}})
        return EXIT_INCONSISTENT
    _emit(report)
    return EXIT_OK


def _parse_site(text):
    try:
        chain, cell = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--site expects 'chain,cell', got {text!r}") from None
    return SiteIndex(chain, cell)


def cmd_evolve(args):
    p, lat = load_config(args.config, args.degrees)
    if isinstance(p, LadderParams):
        p = gauge_fix(p)
    site = _parse_site(args.site) if args.site else SiteIndex(1, lat.cells // 2)
    n = 2 if isinstance(p, LadderParams) else p.n_chains
    if not (1 <= site.chain <= n and 0 <= site.cell < lat.cells):
        raise UsageError(f"site {site.chain},{site.cell} is outside the lattice")
    if args.steps < 1 or args.t_max <= 0:
        raise UsageError("--steps must be >= 1 and --t-max positive")
    times = np.linspace(0.0, args.t_max, args.steps + 1)
    trace = dynamics.evolve(p, lat, dynamics.ExcitationSpec(site), times)
    io.write_trace_csv(args.out, trace)
    report = {"out": args.out,
              "confined": dynamics.confinement_check(trace, radius=1),
              "occupied_sites": len(dynamics.occupied_sites(trace))}
    try:
        g = dynamics.growth_character(trace, site)
        report["growth"] = {"kind": g.kind, "value": g.value}
    except CageError as exc:
        report["growth"] = {"kind": None, "error": str(exc)}
    _emit(report)
    return EXIT_OK


def cmd_scaling(args):
    p, _ = load_config(args.config, args.degrees)
    _require_ladder(p, "scaling")
    if not 0 < args.delta_min < args.delta_max:
        raise UsageError("need 0 < --delta-min < --delta-max")
    if args.n_points < 2:
        raise UsageError("--n-points must be at least 2")
    deltas = np.logspace(math.log10(args.delta_min), math.log10(args.delta_max), args.n_points)
    q = gauge_fix(p)
    exponent = spectra.perturbation_scaling(q, deltas, args.k)
    resp = spectra.perturbation_response(q, deltas, args.k)
    _emit({"exponent": exponent, "deltas": deltas, "responses": resp})
    return EXIT_OK


def cmd_phase_diagram(args):
    if args.grid_n < 8:
        raise UsageError("--grid-n must be at least 8")
    if args.t1 <= 0:
        raise UsageError("--t1 must be positive")
    grid = spectra.default_angle_grid(args.grid_n)
    diagram = spectra.phase_diagram_scan(args.t1, grid, grid, j=args.j)
    io.write_scan_csv(args.out, diagram)
    counts = {}
    for pt in diagram.points:
        counts[pt.kind.value] = counts.get(pt.kind.value, 0) + 1
    _emit({"out": args.out, "counts": counts,
           "flagged": sum(pt.flagged for pt in diagram.points)})
    return EXIT_OK


def cmd_wilson(args):
    p, _ = load_config(args.config, args.degrees)
    _require_ladder(p, "wilson")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    w0 = wilson_loop(p)
    rng = np.random.default_rng(args.seed)
    dev = 0.0
    for _ in range(args.trials):
        phi_a, phi_b = np.pi - 2 * np.pi * rng.random(2)
        dev = max(dev, abs(wilson_loop(gauge_transform(p, phi_a, phi_b)) - w0))
    _emit({"wilson_loop": w0, "max_gauge_deviation": dev, "trials": args.trials,
           "seed": args.seed})
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="nhcage",
        description="Flat bands and degeneracies of bosonic BdG ladders.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degrees", action="store_true",
                        help="read angles in the config as degrees")
    common.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def with_config(name, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.add_argument("--config", required=True, help="JSON parameter file")
        return sp

    sp = with_config("bands", "band structure on a k grid (CSV)")
    sp.add_argument("--k-min", type=float, default=-math.pi)
    sp.add_argument("--k-max", type=float, default=math.pi)
    sp.add_argument("--n-points", type=int, default=101)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_bands)

    sp = with_config("classify", "degeneracy type, minimal polynomial, local range")
    sp.set_defaults(func=cmd_classify)

    sp = with_config("evolve", "time evolution of a single-site excitation (CSV)")
    sp.add_argument("--site", help="'chain,cell' (default: chain 1, middle cell)")
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_evolve)

    sp = with_config("scaling", "eigenvalue response exponent to a shift of j")
    sp.add_argument("--delta-min", type=float, default=1e-8)
    sp.add_argument("--delta-max", type=float, default=1e-4)
    sp.add_argument("--n-points", type=int, default=9)
    sp.add_argument("--k", type=float, default=0.0)
    sp.set_defaults(func=cmd_scaling)

    sp = sub.add_parser("phase-diagram", parents=[common],
                        help="degeneracy type over the (theta1, theta2) square (CSV)")
    sp.add_argument("--t1", type=float, default=2.0)
    sp.add_argument("--j", type=float, default=2.0, help="common value of j and t")
    sp.add_argument("--grid-n", type=int, default=64)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_phase_diagram)

    sp = with_config("wilson", "Wilson loop and its spread over random gauges")
    sp.add_argument("--trials", type=int, default=100)
    sp.set_defaults(func=cmd_wilson)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconclusiveLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DegenerateResponseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
