"""``qrlab`` command line: JSON reports, CSV data and SVG phase portraits.

Exit codes: 0 success, 1 a failed assertion or criterion, 2 a usage,
parse or validation error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .errors import DslSyntaxError, ParameterRangeError, QrlabError, UnknownFixtureError
from .mapdsl import Box, PiecewiseMap, fixture_from_spec, parse_map, single_piece
from .mapdsl.parser import parse_constant
from .reports import dumps, envelope
from .sampling import DEFAULT_SEED

DEFAULT_TOLERANCES: Dict[str, float] = {
    "band": 1e-6,  # guard-boundary exclusion radius
    "refine": 1e-6,  # k_hat refinement stop
    "trace": 1e-9,  # integrator local tolerance
    "max_steps": 20000,
    "gauge": 1e-10,  # Taylor-gauge sign band
    "witness": 1e-8,  # relative image distance for collision witnesses
}


# Search window for collide when neither --region nor a bounded domain is given.
COLLIDE_WINDOW = Box(-6, 6, -6, 6)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    map: Optional[str] = None
    region: Optional[List[float]] = None
    grid: int = 256
    center: complex = 0j
    radius: Optional[float] = None
    seed: int = DEFAULT_SEED
    jobs: int = 1
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str = "qrlab-out"

    def to_dict(self):
        d = asdict(self)
        d.pop("tolerances")
        d.pop("out")
        d.pop("jobs")  # results never depend on the worker count
        return d

    @property
    def box(self) -> Optional[Box]:
        return Box(*self.region) if self.region else None


# -- argument handling ------------------------------------------------------------

def load_map(spec: str):
    """``fixture:name?k=v``, ``expr:<formula>`` or a path to a map file."""
    if spec.startswith("fixture:"):
        return fixture_from_spec(spec)
    if spec.startswith("expr:"):
        formula = spec[5:]
        return single_piece(formula, formula)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"map file not found: {spec}")
    return parse_map(path.read_text())


def require_planar(m) -> PiecewiseMap:
    if not isinstance(m, PiecewiseMap):
        raise UsageError("this command needs a planar map")
    return m


def parse_tolerances(items: List[str]) -> Dict[str, float]:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or key not in tol:
            raise UsageError(f"unknown tolerance {item!r}; known: {', '.join(tol)}")
        try:
            tol[key] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {key} needs a number, got {value!r}") from None
    return tol


def default_region(m: PiecewiseMap, cfg: RunConfig) -> Box:
    if cfg.box is not None:
        return cfg.box
    bb = m.domain.bbox()
    if bb is None:
        return Box(-2, 2, -2, 2)
    return Box(*bb)


def parse_complex(text: str) -> complex:
    try:
        return complex(parse_constant(text))
    except DslSyntaxError as exc:
        raise UsageError(f"bad complex number {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", help="fixture:name?k=v, expr:<formula> or a map file")
    common.add_argument("--region", help="'xmin xmax ymin ymax'")
    common.add_argument("--grid", type=int, default=256)
    common.add_argument("--center", default="0")
    common.add_argument("--radius", type=float)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tolerance", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--out", help="output directory (default $QRLAB_OUT or ./qrlab-out)")
    common.add_argument("--assert", dest="assertion", metavar="EXPR")

    p = argparse.ArgumentParser(prog="qrlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qrlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="distortion statistics and predicate checks")
    sub.add_parser("index", parents=[common], help="local index at --center")
    s = sub.add_parser("sectors", parents=[common], help="sector counts at a zero of the field")
    s.add_argument("--seeds", type=int, default=64)
    s = sub.add_parser("portrait", parents=[common], help="SVG and CSV phase portrait")
    s.add_argument("--seeds", type=int, default=32)
    s = sub.add_parser("collide", parents=[common], help="collision witnesses")
    s.add_argument("--image", help="restrict to the fibre over this value")
    s = sub.add_parser("potential", parents=[common], help="potential and convexity dichotomy")
    s.add_argument("--anchors", type=int, default=20)
    s = sub.add_parser("hessian3d", parents=[common], help="Hessian of the three-variable example")
    s.add_argument("--samples", type=int, default=1000)
    s = sub.add_parser("homotopy", parents=[common], help="distortion along (1-t) f + t z")
    s.add_argument("--ts", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    s.add_argument("--restrict", action="store_true", help="drop points where Re f_z < 0")
    s = sub.add_parser("bilipschitz", parents=[common], help="pairwise lower bound lam/sqrt(K)")
    s.add_argument("--lam", type=float, required=True)
    s.add_argument("--K", type=float, required=True)
    s.add_argument("--cloud", type=int, default=48)
    s = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    s.add_argument("--only", help="criterion id or tag, comma separated")
    return p


def make_config(args) -> RunConfig:
    region = None
    if args.region:
        try:
            region = Box.parse(args.region).as_list()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    out = args.out or os.environ.get("QRLAB_OUT") or "qrlab-out"
    return RunConfig(map=args.map, region=region, grid=args.grid, center=parse_complex(args.center),
                     radius=args.radius, seed=args.seed, jobs=args.jobs,
                     tolerances=parse_tolerances(args.tolerance), out=out)


def write(cfg: RunConfig, name: str, text: str) -> Path:
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    path = d / name
    path.write_text(text)
    return path


def emit(cfg: RunConfig, command: str, body, extra: Optional[dict] = None) -> Path:
    conf = cfg.to_dict()
    if extra:
        conf.update(extra)
    return write(cfg, f"{command}.json", dumps(envelope(command, conf, cfg.tolerances, body)))


# -- commands -----------------------------------------------------------------

def _field_for_flow(m: PiecewiseMap) -> PiecewiseMap:
    from .wirtinger import gradient_field

    return gradient_field(m) if m.is_real_valued else m


def cmd_analyze(args, cfg):
    from .wirtinger import distortion_sweep, parse_predicate

    m = require_planar(load_map(cfg.map))
    pred = None
    if args.assertion:
        try:
            pred = parse_predicate(args.assertion)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rep = distortion_sweep(m, default_region(m, cfg), cfg.grid, predicate=pred,
                           refine_tol=cfg.tolerances["refine"], band=cfg.tolerances["band"], jobs=cfg.jobs)
    path = emit(cfg, "analyze", rep, {"assert": args.assertion})
    print(f"k_hat = {rep.k_hat:.10g}  K_hat = {rep.K_hat:.10g}  samples = {rep.samples}")
    if pred is not None:
        print(f"{pred.name}: {rep.violations} violations ({rep.violation_fraction:.2%})")
    print(f"report: {path}")
    return 1 if pred is not None and rep.violations else 0


def cmd_index(args, cfg):
    from .index import default_radius, index_radius_stability

    m = _field_for_flow(require_planar(load_map(cfg.map)))
    r = cfg.radius if cfg.radius is not None else default_radius(m, cfg.center)
    st = index_radius_stability(m, cfg.center, [r, r / 2])
    path = emit(cfg, "index", {"field": m.name, "index": st.index, **st.to_dict()})
    print(f"index at {cfg.center} = {st.results[0].index}  (stable under halving: {st.stable})")
    print(f"report: {path}")
    if args.assertion is not None:
        try:
            expected = int(args.assertion)
        except ValueError:
            raise UsageError("--assert for index takes an integer") from None
        return 0 if st.stable and st.index == expected else 1
    return 0


def _trace_config(cfg, R):
    from .flow import TraceConfig

    return TraceConfig(R=R, center=cfg.center, tol=cfg.tolerances["trace"],
                       max_steps=int(cfg.tolerances["max_steps"]))


def cmd_sectors(args, cfg):
    from .flow import classify_sectors

    m = _field_for_flow(require_planar(load_map(cfg.map)))
    R = cfg.radius or 1.0
    s = classify_sectors(m, cfg.center, seeds=args.seeds, config=_trace_config(cfg, R))
    path = emit(cfg, "sectors", s, {"seeds": args.seeds})
    print(f"n_e = {s.n_e}  n_h = {s.n_h}  predicted = {s.predicted_index}  "
          f"winding = {s.winding_index}  agreement = {str(s.agreement).lower()}")
    for note in s.notes:
        print(f"note: {note}")
    print(f"report: {path}")
    return 1 if args.assertion and not s.agreement else 0


def cmd_portrait(args, cfg):
    from .flow import portrait_svg, trace_many, trajectories_csv

    m = _field_for_flow(require_planar(load_map(cfg.map)))
    R = cfg.radius or 1.0
    tc = _trace_config(cfg, R)
    theta = 2 * np.pi * (np.arange(args.seeds) + 0.5) / args.seeds
    seeds = cfg.center + 0.5 * R * np.exp(1j * theta)
    trajs = trace_many(m, seeds, 1, tc) + trace_many(m, seeds, -1, tc)
    svg = write(cfg, "portrait.svg", portrait_svg(trajs, cfg.center, R, title=m.name))
    csv_path = write(cfg, "portrait.csv", trajectories_csv(trajs))
    counts: Dict[str, int] = {}
    for t in trajs:
        counts[t.verdict.value] = counts.get(t.verdict.value, 0) + 1
    path = emit(cfg, "portrait", {"trajectories": len(trajs), "verdicts": counts,
                                  "svg": svg.name, "csv": csv_path.name}, {"seeds": args.seeds})
    print(f"{len(trajs)} trajectories: {counts}")
    print(f"wrote {svg}, {csv_path}, {path}")
    return 0


def cmd_collide(args, cfg):
    from .inject import WITNESS_TOL, find_collisions, witnesses_csv

    m = require_planar(load_map(cfg.map))
    region = cfg.box or (Box(*m.domain.bbox()) if m.domain.bbox() else COLLIDE_WINDOW)
    image = parse_complex(args.image) if args.image else None
    if cfg.tolerances["witness"] != WITNESS_TOL:
        import qrlab.inject as inj

        inj.WITNESS_TOL = cfg.tolerances["witness"]
    ws = find_collisions(m, region, cfg.grid, image=image)
    path = emit(cfg, "collide", {"witnesses": ws, "count": len(ws),
                                 "note": "an empty list only means no collision at this resolution"},
                {"image": image})
    write(cfg, "collide.csv", witnesses_csv(ws))
    for w in ws[:5]:
        print(f"f({w.z1:.9g}) = f({w.z2:.9g}) = {w.image:.9g}   |df| = {w.image_distance:.2e}")
    print(f"{len(ws)} witnesses; report: {path}")
    if args.assertion:
        want = args.assertion.strip().lower()
        if want not in ("found", "none"):
            raise UsageError("--assert for collide takes 'found' or 'none'")
        return 0 if (want == "found") == bool(ws) else 1
    return 0


def cmd_potential(args, cfg):
    from .mapdsl import Disk
    from .potential import dichotomy_scan

    m = require_planar(load_map(cfg.map))
    region = cfg.box or Disk(cfg.center, cfg.radius or 1.0)
    rep = dichotomy_scan(m, region, anchors=args.anchors, seed=cfg.seed,
                         gauge_tol=cfg.tolerances["gauge"])
    path = emit(cfg, "potential", rep, {"anchors": args.anchors})
    print(f"dichotomy: {rep.verdict} over {len(rep.gauges)} anchors; "
          f"path residual {rep.potential.residual:.2e}")
    print(f"report: {path}")
    if args.assertion:
        return 0 if rep.verdict == args.assertion.strip().lower() else 1
    return 0


def cmd_hessian3d(args, cfg):
    from .potential import hessian_example_3d

    rng = np.random.default_rng(cfg.seed)
    rep = hessian_example_3d(rng.normal(size=(args.samples, 3)))
    s = rep.summary()
    path = emit(cfg, "hessian3d", s, {"samples": args.samples})
    print(f"det D2psi >= {s['det_psi_min']:.12g}; det D2u in [{s['det_u_min']:.12g}, {s['det_u_max']:.12g}]")
    print(f"report: {path}")
    ok = s["det_psi_min"] >= 16 - 1e-9 and s["formula_residual"] <= 1e-9
    return 0 if ok or not args.assertion else 1


def cmd_homotopy(args, cfg):
    from .wirtinger import homotopy_distortion

    m = require_planar(load_map(cfg.map))
    try:
        ts = [float(t) for t in args.ts.split(",")]
    except ValueError:
        raise UsageError("--ts takes comma separated numbers") from None
    grid = cfg.grid if cfg.grid != 256 else 128
    T = homotopy_distortion(m, default_region(m, cfg), ts, resolution=grid, restrict=args.restrict,
                            band=cfg.tolerances["band"])
    path = emit(cfg, "homotopy", T, {"ts": ts, "restrict": args.restrict})
    for r in T.rows:
        print(f"t = {r.t:.2f}  k = {r.k:.10g}")
    print(f"monotone: {T.monotone}; report: {path}")
    return 1 if args.assertion and not T.monotone else 0


def cmd_bilipschitz(args, cfg):
    from .inject import bilipschitz_check

    m = require_planar(load_map(cfg.map))
    b = bilipschitz_check(m, args.lam, args.K, default_region(m, cfg), cloud=args.cloud, seed=cfg.seed)
    path = emit(cfg, "bilipschitz", b, {"lam": args.lam, "K": args.K, "cloud": args.cloud})
    print(f"min ratio {b.min_ratio:.12g} vs bound {b.bound:.12g} over {b.pairs} pairs: "
          f"{'pass' if b.passed else 'FAIL'}")
    print(f"report: {path}")
    return 0 if b.passed else 1


def cmd_verify(args, cfg):
    from .verify import run_verification

    rep = run_verification(args.only, cfg.seed, echo=print)
    if not rep.results:
        raise UsageError(f"--only {args.only!r} selects no criteria")
    path = write(cfg, "verify.json", dumps(envelope("verify", cfg.to_dict(), cfg.tolerances, rep)))
    n = sum(r.passed for r in rep.results)
    print(f"{n}/{len(rep.results)} criteria passed; report: {path}")
    for r in rep.results:
        if not r.passed:
            print(f"failed: [{r.id}] {r.title}")
    return 0 if rep.passed else 1


COMMANDS = {
    "analyze": cmd_analyze, "index": cmd_index, "sectors": cmd_sectors, "portrait": cmd_portrait,
    "collide": cmd_collide, "potential": cmd_potential, "hessian3d": cmd_hessian3d,
    "homotopy": cmd_homotopy, "bilipschitz": cmd_bilipschitz, "verify": cmd_verify,
}
NEEDS_MAP = set(COMMANDS) - {"hessian3d", "verify"}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        if args.command in NEEDS_MAP and not cfg.map:
            raise UsageError(f"{args.command} needs --map")
        return COMMANDS[args.command](args, cfg)
    except (UsageError, DslSyntaxError, ParameterRangeError, UnknownFixtureError) as exc:
        print(f"qrlab: error: {exc}", file=sys.stderr)
        return 2
    except QrlabError as exc:
        print(f"qrlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
