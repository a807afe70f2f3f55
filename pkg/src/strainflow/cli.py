"""Command-line front end.

Subcommands: ``flow``, ``synth``, ``compare-priors``, ``baseline-bm``,
``render``. Exit codes: 0 success, 1 I/O error, 2 validation error,
3 numerical divergence.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import io as sfio
from . import synth as sfsynth
from .blockmatch import block_match_baseline
from .pyramid import PyramidParams, coarse_to_fine_solve
from .solver import DivergenceError, SolverParams, solve_prior, strain_from_flow

# per-prior weights from the synthetic comparison experiments
PRIOR_DEFAULTS = {
    "h1": {"lambda1": 50.0},
    "tv": {"lambda1": 0.1},
    "tv2": {"lambda1": 0.1},
    "tvtv2": {"lambda1": 0.1, "lambda2": 0.02},
    "ic": {"lambda1": 0.1, "lambda2": 1.0, "lambda3": 0.5e-5},
    "tgv": {"lambda1": 0.1, "lambda2": 2.0},
}


def _add_shared(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--lambda1", type=float, default=0.2)
    p.add_argument("--lambda2", type=float, default=10.0)
    p.add_argument("--lambda3", type=float, default=5e-5)
    p.add_argument("--iters", type=int, default=3000)
    p.add_argument("--levels-min-dim", type=int, default=16)
    p.add_argument("--factor", type=float, default=0.5)
    p.add_argument("--warps", type=int, default=3)
    p.add_argument("--median-radius", type=int, default=2)
    p.add_argument("--constrain", action="store_true",
                   help="enforce positive non-smooth strain along x")
    p.add_argument("--prior", choices=list(PRIOR_DEFAULTS), default="tgv")
    p.add_argument("--out", default=".")
    p.add_argument("--png", action="store_true", help="also write colormapped PNGs")
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--seed", type=int, default=7)


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    overrides = {}
    with open(known.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            overrides[key.replace("-", "_")] = val
    for action in parser._subparsers._group_actions[0].choices.values():
        defaults = {}
        for act in action._actions:
            if act.dest in overrides:
                raw = overrides[act.dest]
                defaults[act.dest] = act.type(raw) if act.type else raw
        action.set_defaults(**defaults)


def _solver_params(args):
    return SolverParams(
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        lambda3=args.lambda3,
        iterations=args.iters,
        prior=args.prior,
        constrain_positive_x=args.constrain,
    )


def _pyramid_params(args):
    return PyramidParams(
        factor=args.factor,
        min_dim=args.levels_min_dim,
        warps_per_level=args.warps,
        median_radius=args.median_radius,
    )


def _write_flow_outputs(out_dir, u, a, s, background, want_png, vmin, vmax):
    os.makedirs(out_dir, exist_ok=True)
    eps = strain_from_flow(u)
    sfio.save_fields(os.path.join(out_dir, "flow.fields"), u, ["u1", "u2"])
    sfio.save_fields(
        os.path.join(out_dir, "smooth_part.fields"), a, ["a11", "a12", "a21", "a22"]
    )
    sfio.save_fields(
        os.path.join(out_dir, "nonsmooth_part.fields"), s, ["s11", "s12", "s21", "s22"]
    )
    sfio.save_fields(
        os.path.join(out_dir, "strain.fields"), eps, ["eps11", "eps12", "eps22"]
    )
    if want_png:
        for name, plane in (("u1", u[0]), ("u2", u[1]), ("eps11", eps[0]), ("s11", s[0])):
            lo = vmin if vmin is not None else float(plane.min())
            hi = vmax if vmax is not None else float(plane.max())
            if not lo < hi:
                lo, hi = lo - 0.5, lo + 0.5
            sfio.render_colormap(
                plane, lo, hi, os.path.join(out_dir, f"{name}.png"), background=background
            )


def cmd_flow(args):
    f1 = sfio.load_image(args.f1)
    f2 = sfio.load_image(args.f2)
    if f1.shape != f2.shape:
        raise ValueError("input images must share dimensions")
    sp = _solver_params(args)
    pp = _pyramid_params(args)
    if sp.prior == "tgv":
        result = coarse_to_fine_solve(f1, f2, sp, pp)
    else:
        result = solve_prior(f1, f2, np.zeros((2,) + f1.shape), sp)
    _write_flow_outputs(
        args.out, result.u, result.a, result.s, f1, args.png, args.vmin, args.vmax
    )
    print(f"flow: wrote {args.out} (|u|_max = {np.abs(result.u).max():.4f})")


def cmd_synth(args):
    spec = sfsynth.SyntheticSpec(
        kind=args.kind,
        jump_amplitude=args.amplitude,
        ramp_slope=args.slope,
        seed=args.seed,
    )
    u_true = sfsynth.generate(spec, args.size, args.size)
    if args.base:
        base = sfio.load_image(args.base)
        if base.shape != (args.size, args.size):
            raise ValueError("base image size must match --size")
    else:
        base = sfsynth.value_noise_texture(args.size, args.size, seed=args.seed)
    f1, f2 = sfsynth.warp_generate(base, u_true)
    os.makedirs(args.out, exist_ok=True)
    sfio.save_gray_png(f1, os.path.join(args.out, "f1.png"))
    sfio.save_gray_png(f2, os.path.join(args.out, "f2.png"))
    sfio.save_fields(os.path.join(args.out, "u_true.fields"), u_true, ["u1", "u2"])
    print(f"synth: wrote {args.out} (max |u1| = {np.abs(u_true[0]).max():.3f})")


def cmd_compare_priors(args):
    f1 = sfio.load_image(args.f1)
    f2 = sfio.load_image(args.f2)
    if f1.shape != f2.shape:
        raise ValueError("input images must share dimensions")
    u_true = None
    if args.truth:
        planes, _ = sfio.load_fields(args.truth)
        u_true = planes[:2]
    ubar = np.zeros((2,) + f1.shape)
    rows = []
    for prior, weights in PRIOR_DEFAULTS.items():
        sp = SolverParams(prior=prior, iterations=args.iters, **{
            "lambda1": weights.get("lambda1", 0.2),
            "lambda2": weights.get("lambda2", 10.0),
            "lambda3": weights.get("lambda3", 5e-5),
        })
        result = solve_prior(f1, f2, ubar, sp)
        row = {"prior": prior, "energy": result.energy_trace[-1]}
        if u_true is not None:
            epe_mean, epe_max = sfsynth.endpoint_error(result.u, u_true)
            eps = strain_from_flow(result.u)
            eps_true = strain_from_flow(u_true)
            row["epe_mean"] = epe_mean
            row["epe_max"] = epe_max
            row["strain_rms"] = float(np.sqrt(np.mean((eps[0] - eps_true[0]) ** 2)))
        rows.append(row)

    cols = ["prior", "epe_mean", "epe_max", "strain_rms", "energy"]
    fmt = "{:>8} {:>10} {:>10} {:>12} {:>14}"
    print(fmt.format(*cols))
    for row in rows:
        print(fmt.format(*[
            row["prior"],
            *(f"{row[c]:.4f}" if c in row else "" for c in cols[1:-1]),
            f"{row['energy']:.6g}",
        ]))
    if args.out != ".":
        os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "compare_priors.json"), "w") as fh:
        json.dump(rows, fh, indent=2)


def cmd_baseline_bm(args):
    f1 = sfio.load_image(args.f1)
    f2 = sfio.load_image(args.f2)
    if f1.shape != f2.shape:
        raise ValueError("input images must share dimensions")
    u = block_match_baseline(f1, f2, window=args.window, search=args.search)
    os.makedirs(args.out, exist_ok=True)
    sfio.save_fields(os.path.join(args.out, "flow_bm.fields"), u, ["u1", "u2"])
    eps = strain_from_flow(u)
    sfio.save_fields(
        os.path.join(args.out, "strain_bm.fields"), eps, ["eps11", "eps12", "eps22"]
    )
    print(f"baseline-bm: wrote {args.out}")


def cmd_render(args):
    planes, names = sfio.load_fields(args.field_file)
    if not 0 <= args.plane < len(planes):
        raise ValueError(f"plane index out of range (file has {len(planes)} planes)")
    plane = planes[args.plane]
    vmin = args.vmin if args.vmin is not None else float(plane.min())
    vmax = args.vmax if args.vmax is not None else float(plane.max())
    if not vmin < vmax:
        vmin, vmax = vmin - 0.5, vmin + 0.5
    background = sfio.load_image(args.background) if args.background else None
    sfio.render_colormap(plane, vmin, vmax, args.out_image, background=background)
    print(f"render: wrote {args.out_image} ({names[args.plane]})")


def build_parser():
    parser = argparse.ArgumentParser(prog="strainflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flow", help="estimate displacement and strain")
    p.add_argument("f1")
    p.add_argument("f2")
    _add_shared(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("synth", help="generate a synthetic ground-truth pair")
    p.add_argument("--kind", choices=["piecewise_plus_linear", "half_jump_half_linear"],
                   default="piecewise_plus_linear")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--slope", type=float, default=0.02)
    p.add_argument("--size", type=int, default=100)
    p.add_argument("--base", help="optional base texture image")
    _add_shared(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare-priors", help="run all priors and tabulate errors")
    p.add_argument("f1")
    p.add_argument("f2")
    p.add_argument("--truth", help="raw field file with the true flow")
    _add_shared(p)
    p.set_defaults(func=cmd_compare_priors)

    p = sub.add_parser("baseline-bm", help="block-matching baseline")
    p.add_argument("f1")
    p.add_argument("f2")
    p.add_argument("--window", type=int, default=9)
    p.add_argument("--search", type=int, default=4)
    _add_shared(p)
    p.set_defaults(func=cmd_baseline_bm)

    p = sub.add_parser("render", help="colormap a plane of a raw field file")
    p.add_argument("field_file")
    p.add_argument("out_image")
    p.add_argument("--plane", type=int, default=0)
    p.add_argument("--background", help="grayscale image to overlay onto")
    _add_shared(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
