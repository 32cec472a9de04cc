"""Command line entry point.

Exit status: 0 ok, 2 bad configuration, 3 inconclusive (partial results are
written), 4 an internal counting or depth limit was hit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import config as cfg
from .cover import CoverSpec, estimate_cover_entropy
from .dimension import dim_entropy
from .errors import (BaseEntropyTooSmall, ConfigError, DepthCapTooSmall, DepthOverflow,
                     Inconclusive, IncompatibleAlphabet, NotMixing, ScaleUnderflow,
                     TargetOutOfRange, ToleranceUnachievable)
from .fractal import CircleSet, bridge_check, hausdorff_dimension
from .lowering import LoweringRequest, ProductExperiment, certify, diagonal_experiment, lower
from .symbolic import DigitSetSchedule, MetricParams, SubshiftSpec
from .tower import build_tower, h_star_profile, sample_centers

log = logging.getLogger("symentropy")

WORKERS_ENV = "SYMENTROPY_WORKERS"
EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_LIMIT = 2, 3, 4
CONFIG_ERRORS = (ConfigError, TargetOutOfRange, NotMixing, BaseEntropyTooSmall, IncompatibleAlphabet)
LIMIT_ERRORS = (DepthOverflow, DepthCapTooSmall, ScaleUnderflow, ToleranceUnachievable)


class _PartialResult(Exception):
    """Carries partial output to the exit-code handler."""

    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    return n


def pmap(fn, items):
    """Order-preserving map, sharded over processes when workers() > 1."""
    items = list(items)
    n = workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- output ----------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def csv_text(header, rows, note="entropy units: nats") -> str:
    buf = io.StringIO()
    buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(h)) for h in header])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def json_text(command, config, result, status="ok") -> str:
    doc = {"command": command, "status": status, "units": "nats",
           "config": _clean(config), "result": _clean(result)}
    cfg.validate(doc, "result", "output")
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(args, text: str) -> None:
    if args.out:
        cfg.atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def say(msg: str) -> None:
    print(msg, file=sys.stderr if _quiet_stdout else sys.stdout)


_quiet_stdout = False


# -- argument helpers ------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _subset(args, shift: SubshiftSpec):
    if getattr(args, "subset", None):
        K = cfg.load_schedule(args.subset)
        parts = K.parts if hasattr(K, "parts") else (K,)
        if any(p.alphabet_size != shift.alphabet_size for p in parts):
            raise ConfigError(f"{args.subset}: schedule alphabet differs from the system")
        return K
    return None


# -- commands ------------------------------------------------------------------------

def cmd_entropy(args):
    shift = cfg.load_system(args.system)
    K = _subset(args, shift)
    est = estimate_cover_entropy(shift, K, n_max=args.nmax, eps_list=args.eps,
                                 metric=MetricParams(args.metric_base), power=args.power)
    header = ["n", "eps", "s_n", "r_n", "N_lower", "N_upper", "slope"]
    rows = sorted(est.rows, key=lambda r: (-r["eps"], r["n"]))
    emit(args, csv_text(header, rows))
    flag = "" if est.converged else " (NonConvergent: residual > 0.05)"
    say(f"entropy: h = {est.value:.6f} nats, bounds [{est.bounds[0]:.6f}, {est.bounds[1]:.6f}], "
        f"residual {est.residual:.2e}{flag}")


def cmd_dim_entropy(args):
    shift = cfg.load_system(args.system)
    K = _subset(args, shift)
    conf = {"system": args.system, "subset": args.subset, "tol": args.tol,
            "depth_cap": args.depth_cap, "power": args.power}
    try:
        r = dim_entropy(shift, K, CoverSpec.blocks(args.power), args.tol, args.depth_cap, args.power)
    except Inconclusive as exc:
        lo, hi = exc.bracket
        raise _PartialResult(str(exc), ("dim-entropy", conf, {"lower": lo, "upper": hi}))
    emit(args, json_text("dim-entropy", conf, {"lower": r.lower, "upper": r.upper,
                                              "iterations": r.iterations, **r.extra}))
    say(f"dim-entropy: h^B in [{r.lower:.6f}, {r.upper:.6f}] nats")


def _circle(args) -> CircleSet:
    if args.base < 2:
        raise ConfigError("--base must be >= 2")
    if args.schedule:
        K = cfg.load_schedule(args.schedule)
        return CircleSet(K, args.base)
    if args.digits is None:
        raise ConfigError("give --digits or --schedule")
    if any(not 0 <= d < args.base for d in args.digits):
        raise ConfigError(f"digits must lie in 0..{args.base - 1}")
    return CircleSet.digits(args.base, args.digits)


def cmd_hausdorff(args):
    C = _circle(args)
    conf = {"base": args.base, "digits": args.digits, "schedule": args.schedule, "tol": args.tol}
    try:
        d = hausdorff_dimension(C, args.tol)
    except Inconclusive as exc:
        lo, hi = exc.bracket
        raise _PartialResult(str(exc), ("hausdorff", conf, {"lower": lo, "upper": hi}))
    emit(args, json_text("hausdorff", conf, {"value": d.value, "method": d.method,
                                            "bounds": d.bounds, "residual": d.residual,
                                            **d.extra}))
    say(f"hausdorff: dim = {d.value:.6f} ({d.method})")


def cmd_bridge(args):
    C = _circle(args)
    conf = {"base": args.base, "digits": args.digits, "schedule": args.schedule, "tol": args.tol}
    rep = bridge_check(C, args.tol, args.depth_cap)
    emit(args, json_text("bridge", conf, rep))
    say(f"bridge: H_d = {rep['H_d']:.6f}, h^B/log m = {rep['hB_over_logm']:.6f}, "
        f"gap = {rep['gap']:.2e} ({'pass' if rep['passed'] else 'FAIL'})")


def cmd_lower(args):
    shift = cfg.load_system(args.system)
    within = cfg.load_schedule(args.within) if args.within else None
    if within is not None and not isinstance(within, DigitSetSchedule):
        raise ConfigError("--within must be a single schedule, not a union")
    K = lower(LoweringRequest(shift, args.target, args.tol, within))
    doc = cfg.schedule_to_json(K)
    text = json.dumps(doc, sort_keys=True) + "\n"
    if args.emit:
        cfg.atomic_write(args.emit, text)
    else:
        sys.stdout.write(text)
    if args.certify:
        rep = certify(shift, K, args.target, args.tol)
        say(f"lower: exact h = {rep['exact']:.6f}, cover estimate {rep['cover_estimate']:.6f}, "
            f"h^B in [{rep['hB_bracket'][0]:.6f}, {rep['hB_bracket'][1]:.6f}], period {rep['period']}")
    else:
        say(f"lower: schedule with period {K.q}")


def cmd_diagonal(args):
    base = cfg.load_system(args.base)
    rep = diagonal_experiment(ProductExperiment(base, args.N), args.nmax)
    emit(args, csv_text(["N", "n", "s_n"], rep["rows"]))
    say(f"diagonal: N = {args.N}, estimate {rep['estimate']:.6f} nats, "
        f"bounds [{args.N * rep['h_base']:.6f}, {args.N * (args.N + 1) / 2 * rep['h_base']:.6f}], "
        f"lower check {rep['lower_bound_check']}, upper check {rep['upper_bound_check']}")


def _tower_job(job):
    n, M, center, eps = job
    tw = build_tower(n, SubshiftSpec.full(M))
    est = tw.local_entropy(center, eps)
    return est.value, est.extra["exact_lower"]


def _eps_grid(text, eps_n):
    if text == "auto":
        return [eps_n, eps_n / 2, eps_n / 5, eps_n / 10]
    return sorted(_floats(text), reverse=True)


def cmd_tower(args):
    import numpy as np
    M = args.base_alphabet
    tw = build_tower(args.n, SubshiftSpec.full(M))
    eps_list = _eps_grid(args.eps, tw.eps_n)
    centers = sample_centers(tw, args.centers, np.random.default_rng(args.seed))
    jobs = [(args.n, M, c, e) for e in eps_list for c in centers]
    ids = [i for _ in eps_list for i in range(len(centers))]
    out = pmap(_tower_job, jobs)
    rows = []
    for i, (_, _, c, e), (v, lo) in zip(ids, jobs, out):
        rows.append({"eps": e, "center_id": i, "piece": c[0], "estimate": v, "exact_lower": lo})
    rows.sort(key=lambda r: (-r["eps"], r["center_id"]))
    emit(args, csv_text(["eps", "center_id", "piece", "estimate", "exact_lower"], rows))
    at = max(r["estimate"] for r in rows if r["eps"] == eps_list[0])
    say(f"tower: n = {args.n}, eps_n = {tw.eps_n:.6f}, sup local entropy at eps[0] = {at:.6f} nats")


def cmd_hstar(args):
    towers = [build_tower(n, SubshiftSpec.full(2 ** (2 * n + 1))) for n in range(1, args.nmax + 1)]
    eps_list = (sorted(_floats(args.eps), reverse=True) if args.eps != "auto"
                else sorted({t.eps_n for t in towers} | {towers[0].eps_n / 10}, reverse=True))
    prof = h_star_profile(towers, eps_list, args.centers, args.seed)
    emit(args, csv_text(["eps", "value", "argmax"], prof.per_eps))
    say(f"hstar: non-asymptotic {prof.checks['non_asymptotic']}, quasi {prof.checks['quasi']}")


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symentropy", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", help="covering entropy by separated counts")
    e.add_argument("--system", required=True)
    e.add_argument("--subset")
    e.add_argument("--nmax", type=_positive(int), default=24)
    e.add_argument("--eps", type=_floats, default=[0.5, 0.25, 0.125])
    e.add_argument("--power", type=_positive(int), default=1)
    e.add_argument("--metric-base", type=float, default=2.0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_entropy)

    d = sub.add_parser("dim-entropy", help="Bowen dimensional entropy bracket")
    d.add_argument("--system", required=True)
    d.add_argument("--subset")
    d.add_argument("--tol", type=_positive(float), default=1e-3)
    d.add_argument("--depth-cap", type=_positive(int), default=26)
    d.add_argument("--power", type=_positive(int), default=1)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dim_entropy)

    for name, fn, help_ in (("hausdorff", cmd_hausdorff, "Hausdorff dimension of a digit set"),
                            ("bridge", cmd_bridge, "Hausdorff dimension vs h^B / log m")):
        h = sub.add_parser(name, help=help_)
        h.add_argument("--base", type=int, required=True)
        h.add_argument("--digits", type=_ints)
        h.add_argument("--schedule")
        h.add_argument("--tol", type=_positive(float), default=1e-3)
        h.add_argument("--depth-cap", type=_positive(int), default=26)
        h.add_argument("--out")
        h.set_defaults(func=fn)

    lo = sub.add_parser("lower", help="schedule with a target entropy")
    lo.add_argument("--system", required=True)
    lo.add_argument("--within")
    lo.add_argument("--target", type=float, required=True)
    lo.add_argument("--tol", type=_positive(float), default=1e-3)
    lo.add_argument("--emit")
    lo.add_argument("--certify", action="store_true")
    lo.set_defaults(func=cmd_lower)

    dg = sub.add_parser("diagonal", help="diagonal of T x T^2 x ... x T^N")
    dg.add_argument("--base", required=True)
    dg.add_argument("--N", type=_positive(int), default=2)
    dg.add_argument("--nmax", type=_positive(int), default=12)
    dg.add_argument("--out")
    dg.set_defaults(func=cmd_diagonal)

    t = sub.add_parser("tower", help="local entropy on a cyclic tower")
    t.add_argument("--n", type=_positive(int), default=1)
    t.add_argument("--base-alphabet", type=_positive(int), default=None)
    t.add_argument("--centers", type=_positive(int), default=4)
    t.add_argument("--eps", default="auto")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out")
    t.set_defaults(func=cmd_tower)

    hs = sub.add_parser("hstar", help="h*_T(eps) profile over towers n = 1..nmax")
    hs.add_argument("--nmax", type=_positive(int), default=2)
    hs.add_argument("--eps", default="auto")
    hs.add_argument("--centers", type=_positive(int), default=3)
    hs.add_argument("--seed", type=int, default=0)
    hs.add_argument("--out")
    hs.set_defaults(func=cmd_hstar)
    return p


def main(argv=None) -> int:
    global _quiet_stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "tower" and args.base_alphabet is None:
        args.base_alphabet = 2 ** (2 * args.n + 1)
    _quiet_stdout = not (getattr(args, "out", None) or getattr(args, "emit", None))
    try:
        args.func(args)
    except _PartialResult as exc:
        command, conf, partial = exc.payload
        emit(args, json_text(command, conf, partial, status="inconclusive"))
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except Inconclusive as exc:
        conf = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
        lo, hi = exc.bracket if exc.bracket else (None, None)
        emit(args, json_text(args.command, conf, {"lower": lo, "upper": hi}, status="inconclusive"))
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LIMIT_ERRORS as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
