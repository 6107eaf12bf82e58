"""Command line entry point: ``affine-torus <subcommand>``.

Exit codes: 0 on success, 2 on invalid input, 3 on a numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import algebra
from .affine import AffineMap2
from .algebra import AlgebraProduct, Divergent, degenerate, parse_subgroup
from .charvariety import (
    AFF,
    SEED_ENV,
    HomPoint,
    hom_conjugate_in,
    local_injectivity_probe,
    probe_seed,
)
from .errors import InvalidParams, NumericDegeneracy, ValidationError
from .etale import holonomy_of
from .gl2cover import GLPLUS, GLTILDE, PGL, GLTildeElement, conjugate_in, lift
from .gluing import GluingDatum, polygon_from_holonomy, tile, verify_gluing
from .render import RenderOptions, degeneration_frames, render_structure, render_tiling
from .theta_suite import theta_lemma_suite
from .tori import classify_structure, descriptor_from_json


def _load(path: str):
    with open(path) as fh:
        return json.load(fh)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _options(args) -> RenderOptions:
    kw = {}
    if getattr(args, "viewport", None):
        kw["viewport"] = tuple(args.viewport)
    if getattr(args, "frames", None):
        kw["frames"] = args.frames
    return RenderOptions(**kw)


def _algebra(data) -> AlgebraProduct:
    if isinstance(data, dict):
        data = data.get("S", data.get("algebra"))
    return AlgebraProduct.from_json(data)


def cmd_classify(args) -> int:
    d = descriptor_from_json(_load(args.descriptor))
    _emit(classify_structure(d).to_json())
    if args.svg:
        write_atomic(args.svg, render_structure(d, _options(args), args.radius))
    return 0


def cmd_glue(args) -> int:
    if bool(args.datum) == bool(args.algebra):
        raise InvalidParams("give exactly one of --datum and --algebra")
    if args.datum:
        d = GluingDatum.from_json(_load(args.datum))
    else:
        d = polygon_from_holonomy(holonomy_of(_algebra(_load(args.algebra))), (0.0, 0.0))
    report = verify_gluing(d)
    out = {"datum": d.to_json(), "report": report.to_json()}
    if report.valid:
        opts = _options(args)
        t = tile(d, args.radius, opts.viewport)
        out["tiles"] = len(t)
        if args.svg:
            write_atomic(args.svg, render_tiling(t, opts))
    _emit(out)
    return 0 if report.valid else 2


def cmd_degenerate(args) -> int:
    S = _algebra(_load(args.algebra))
    lam = parse_subgroup(args.subgroup)
    n = args.frames
    # frames at t = 10^(i / (n - 1) * max_exponent), starting at the identity
    ts = [1.0] if n == 1 else list(np.logspace(0.0, args.max_exponent, n))
    opts = _options(args)
    fs = degeneration_frames(S, lam, ts, args.radius, opts)
    out_dir = Path(args.out)
    names = []
    for i, (t, svg) in enumerate(fs.frames):
        name = f"frame_{i:03d}.svg"
        write_atomic(out_dir / name, svg)
        names.append({"t": t, "file": name})
    lim = degenerate(S, lam)
    limit = ({"divergent": True, "growth": lim.growth} if isinstance(lim, Divergent)
             else {"divergent": False, "S": lim.to_json(),
                   "stratum": algebra.classify_algebra(lim)})
    summary = {"source": algebra.classify_algebra(S), "subgroup": lam.name,
               "frames": names, "warnings": fs.warnings, "limit": limit}
    write_atomic(out_dir / "limit.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _emit(summary)
    return 0


def _element(data, group: str):
    """A lift ``{"m": [...], "theta": x}`` or ``{"m": [...], "sheet": k}``, an
    affine map ``{"l": ..., "t": ...}``, or a plain matrix."""
    if group == AFF:
        return AffineMap2.from_json(data)
    if group == GLTILDE:
        m = np.asarray(data["m"], float).reshape(2, 2)
        if "theta" in data:
            return GLTildeElement(m, data["theta"])
        return lift(m, int(data.get("sheet", 0)))
    if isinstance(data, dict):
        data = data["m"]
    return np.asarray(data, float).reshape(2, 2)


def cmd_conjugacy(args) -> int:
    data = _load(args.pair)
    group = args.group
    if "r1" in data:
        r1, r2 = (HomPoint(_element(data[k]["g1"], group), _element(data[k]["g2"], group), group)
                  for k in ("r1", "r2"))
        result = hom_conjugate_in(r1, r2, group)
        kind = "hom"
    else:
        if group == AFF:
            raise InvalidParams("single-element conjugacy is defined for gltilde, glplus, pgl")
        g, h = (_element(data[k], group) for k in ("g", "h"))
        result = conjugate_in(g, h, group)
        kind = "element"
    _emit({"group": group, "kind": kind, "conjugate": bool(result)})
    return 0


def cmd_probe(args) -> int:
    rep = local_injectivity_probe(args.samples, args.radius, probe_seed(args.seed))
    _emit(rep.to_json())
    return 0 if rep.failures == 0 else 1


def cmd_theta_suite(args) -> int:
    res = theta_lemma_suite(args.trials, args.seed)
    _emit(res)
    return 0 if res["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affine-torus",
                                description="Flat affine two-tori: classification, gluing, "
                                            "degenerations and conjugacy tests.")
    sub = p.add_subparsers(dest="command", required=True)

    def viewport(sp):
        sp.add_argument("--viewport", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))

    sp = sub.add_parser("classify", help="classify a torus descriptor")
    sp.add_argument("--descriptor", required=True)
    sp.add_argument("--svg")
    sp.add_argument("--radius", type=int, default=3)
    viewport(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("glue", help="check a gluing datum and tile the plane")
    sp.add_argument("--datum")
    sp.add_argument("--algebra", help="build the datum from the holonomy of a cone point")
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--svg")
    viewport(sp)
    sp.set_defaults(func=cmd_glue)

    sp = sub.add_parser("degenerate", help="frames along a one-parameter degeneration")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--subgroup", required=True)
    sp.add_argument("--frames", type=int, default=4)
    sp.add_argument("--out", required=True)
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--max-exponent", type=float, default=2.0,
                    help="last frame is at t = 10^max-exponent")
    viewport(sp)
    sp.set_defaults(func=cmd_degenerate)

    sp = sub.add_parser("conjugacy", help="conjugacy of two elements or two Z^2 points")
    sp.add_argument("--group", choices=(GLTILDE, GLPLUS, PGL, AFF), required=True)
    sp.add_argument("--pair", required=True)
    sp.set_defaults(func=cmd_conjugacy)

    sp = sub.add_parser("probe", help="local injectivity probe on the character variety")
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--radius", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=None,
                    help=f"default: ${SEED_ENV} or a fixed seed")
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("theta-suite", help="randomised checks of the angle function")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_theta_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericDegeneracy as exc:
        print(f"numeric degeneracy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
