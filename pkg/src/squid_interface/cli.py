"""Command-line front end.

Subcommands: error-budget, potential-scan, detect, transfer, teleport, sweep.
Every command writes records either as JSON lines (default) or CSV.
Exit codes: 0 success, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import constants as const
from .errors import DimensionError, QuantumInterfaceError
from .particle import InteractionParams, click_probability, simulate_detections
from .protocols import (
    BellOutcome,
    DetectorPhaseMap,
    Lattice2D,
    forward_transfer,
    phase_correct_image,
    teleport_reverse,
)
from .quantum import fidelity, make_state
from .squid import (
    BoreGeometry,
    SquidParams,
    biased_potential,
    detection_error_budget,
    dissipation,
    geometric_delta,
    leakage_probability,
    potential,
    solve_epsilon,
)
from .units import parse_quantity

EXIT_USAGE = 1
EXIT_DOMAIN = 2

RANDOMIZED = {"detect", "transfer", "teleport"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _quantity(text: str) -> float:
    try:
        return parse_quantity(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


# -- output -----------------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def format_records(records: Iterable[dict], fmt: str) -> str:
    records = [{k: _plain(v) for k, v in rec.items()} for rec in records]
    buf = io.StringIO()
    if fmt == "json":
        for rec in records:
            buf.write(json.dumps(rec) + "\n")
        return buf.getvalue()
    fields: list[str] = []
    for rec in records:
        fields.extend(k for k in rec if k not in fields)
    writer = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def emit(records: Iterable[dict], args) -> None:
    text = format_records(records, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- device helpers ---------------------------------------------------------


def _device(args) -> SquidParams:
    L = args.L
    i0 = args.i0 if args.i0 is not None else args.li0 * const.phi0 / L
    if args.C is not None:
        return SquidParams(L=L, i0=i0, C=args.C)
    base = SquidParams(L=L, i0=i0, C=1.0)
    return SquidParams(L=L, i0=i0, C=const.e**2 / (2 * args.ec_ej * base.E_J))


def _geometry(args) -> BoreGeometry:
    l = args.l if args.l is not None else args.aspect * args.r
    return BoreGeometry(r=args.r, l=l)


def budget_record(p: SquidParams, g: BoreGeometry, args=None) -> dict:
    delta, _ = geometric_delta(g)
    eps = solve_epsilon(p.beta).epsilon
    leak = leakage_probability(p, eps)
    budget = detection_error_budget(p, g)
    rec = {
        "li0_over_phi0": p.li0_over_phi0,
        "beta": p.beta,
        "ec_over_ej": p.E_C / p.E_J,
        "aspect": g.aspect,
        "delta": delta,
        "epsilon": eps,
        "p_delta": budget.p_delta,
        "p_epsilon": budget.p_epsilon,
        "p_leak": budget.p_leak,
        "p_leak_approx": leak.p_approx,
        "p_leak_closed": leak.p_closed,
        "p_total": budget.p_total,
    }
    if args is not None and args.R is not None:
        tau = args.tau if args.tau is not None else args.length / const.c
        est = dissipation(args.R, tau, args.gap)
        rec.update(
            R=est.R,
            tau=est.tau,
            eta=est.eta,
            dissipated_energy=est.delta_E,
            delta_A=est.delta_A,
            gap=est.gap,
            quasiparticle_safe=est.quasiparticle_safe,
            energy_scale=est.energy_scale,
        )
    return rec


# -- commands ---------------------------------------------------------------


def cmd_error_budget(args) -> list[dict]:
    return [budget_record(_device(args), _geometry(args), args)]


def cmd_potential_scan(args) -> list[dict]:
    p = _device(args)
    if args.points < 3 or not args.phi_max > args.phi_min:
        raise UsageError("potential-scan needs --points >= 3 and --phi-max > --phi-min")
    solve_epsilon(p.beta)  # surfaces MonostableError
    x = np.linspace(args.phi_min, args.phi_max, args.points)
    if args.phi_min == -args.phi_max:
        x = (x - x[::-1]) / 2  # bit-exact mirror grid so U(-phi) == U(phi)
    phi = x * const.phi0
    i_b = args.ib if args.ib is not None else (const.e / args.bias_time if args.bias_time else 0.0)
    U = potential(phi, p)
    Ub = biased_potential(phi, i_b, p)

    def local_minima(y):
        mask = np.zeros(y.size, dtype=bool)
        mask[1:-1] = (y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])
        return mask

    minU, minUb = local_minima(U), local_minima(Ub)
    return [
        {"phi_over_phi0": x[i], "U": U[i], "U_biased": Ub[i], "min_U": bool(minU[i]), "min_U_biased": bool(minUb[i])}
        for i in range(x.size)
    ]


def cmd_detect(args) -> list[dict]:
    ip = InteractionParams(delta=args.delta, epsilon=args.epsilon, charge_sign=args.charge_sign)
    present = not args.absent
    clicks = int(np.count_nonzero(simulate_detections(ip, present, args.trials, args.seed)))
    p_click = click_probability(ip, present)
    p_miss = 1 - p_click if present else 0.0
    misses = args.trials - clicks if present else 0
    # z-score of the observed click count against the exact Bernoulli rate
    sigma = math.sqrt(args.trials * p_click * (1 - p_click))
    z = (clicks - args.trials * p_click) / sigma if sigma > 0 else 0.0
    return [{
        "delta": ip.delta,
        "epsilon": ip.epsilon,
        "particle_present": present,
        "trials": args.trials,
        "clicks": clicks,
        "misses": misses,
        "click_rate": clicks / args.trials,
        "p_click_exact": p_click,
        "p_miss_exact": p_miss,
        "p_miss_approx": (ip.delta + ip.epsilon) ** 2 / 4 if present else 0.0,
        "z_score": z,
    }]


def _random_state(rng: np.random.Generator, N: int):
    return make_state(rng.normal(size=N) + 1j * rng.normal(size=N))


def _lattice(args) -> tuple[int, Lattice2D | None]:
    if args.nx is not None or args.ny is not None:
        if args.nx is None or args.ny is None:
            raise UsageError("--nx and --ny must be given together")
        lat = Lattice2D(args.nx, args.ny)
        if args.n is not None and args.n != lat.N:
            raise DimensionError(f"--n {args.n} does not match lattice {args.nx} x {args.ny}")
        return lat.N, lat
    return (args.n if args.n is not None else 4), None


def _summary(rows: list[dict]) -> dict:
    fids = [r["corrected_fidelity"] for r in rows]
    return {
        "record": "summary",
        "count": len(rows),
        "min_corrected_fidelity": min(fids),
        "mean_corrected_fidelity": float(np.mean(fids)),
    }


def cmd_transfer(args) -> list[dict]:
    N, lat = _lattice(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        c = _random_state(rng, N)
        theta = rng.uniform(0, 2 * np.pi, N) if args.random_phases else np.zeros(N)
        phases = DetectorPhaseMap(theta, lat)
        meas_seed = int(rng.integers(2**63))
        outcomes = range(N) if args.exhaustive else [None]
        for forced in outcomes:
            res = forward_transfer(c, phases, meas_seed, forced)
            rows.append({
                "record": "trial",
                "trial": trial,
                "outcome": res.outcome,
                "probability": res.probability,
                "raw_fidelity": fidelity(res.array_state, c),
                "corrected_fidelity": fidelity(phase_correct_image(res.array_state, res.row_phases), c),
            })
    return rows + [_summary(rows)]


def cmd_teleport(args) -> list[dict]:
    N, lat = _lattice(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        d = _random_state(rng, N)
        meas_seed = int(rng.integers(2**63))
        outcomes = [BellOutcome.from_flat(i, N) for i in range(N * N)] if args.exhaustive else [None]
        for forced in outcomes:
            res = teleport_reverse(d, meas_seed, forced, lat)
            rows.append({
                "record": "trial",
                "trial": trial,
                "n": res.outcome.n,
                "m": res.outcome.m,
                "probability": res.probability,
                "raw_fidelity": fidelity(res.electron_state, d),
                "corrected_fidelity": fidelity(res.corrected, d),
            })
    return rows + [_summary(rows)]


SWEEP_PARAMS = ("li0", "ec_ej", "aspect")


def _sweep_point(task) -> dict:
    index, value, args, point_seed = task
    ns = argparse.Namespace(**vars(args))
    setattr(ns, args.param, value)
    rec = {"index": index, "value": value}
    rec.update(budget_record(_device(ns), _geometry(ns), ns))
    if args.trials:
        ip = InteractionParams(delta=rec["delta"], epsilon=rec["epsilon"])
        clicks = int(np.count_nonzero(simulate_detections(ip, True, args.trials, point_seed)))
        rec.update(trials=args.trials, misses=args.trials - clicks, miss_rate=(args.trials - clicks) / args.trials)
    return rec


def cmd_sweep(args) -> list[dict]:
    if args.num < 1:
        raise UsageError("--num must be >= 1")
    if args.log:
        if args.start <= 0 or args.stop <= 0:
            raise UsageError("--log needs positive --start and --stop")
        values = np.geomspace(args.start, args.stop, args.num)
    else:
        values = np.linspace(args.start, args.stop, args.num)
    if args.trials and args.seed is None:
        raise UsageError("sweep with --trials requires --seed")
    seeds = [None] * args.num
    if args.trials:
        seeds = [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(args.seed).spawn(args.num)]
    tasks = [(i, float(v), args, seeds[i]) for i, v in enumerate(values)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


COMMANDS = {
    "error-budget": cmd_error_budget,
    "potential-scan": cmd_potential_scan,
    "detect": cmd_detect,
    "transfer": cmd_transfer,
    "teleport": cmd_teleport,
    "sweep": cmd_sweep,
}


# -- parser -----------------------------------------------------------------


def _add_device_args(p):
    g = p.add_argument_group("device")
    g.add_argument("--li0", type=float, default=2.4, help="L*i0 in units of phi0 (default 2.4)")
    g.add_argument("--ec-ej", dest="ec_ej", type=float, default=1e-3, help="E_C/E_J (default 1e-3)")
    g.add_argument("--L", type=_quantity, default=1e-9, help="loop inductance, e.g. 500pH (default 1nH)")
    g.add_argument("--i0", type=_quantity, help="critical current, e.g. 2uA (overrides --li0)")
    g.add_argument("--C", type=_quantity, help="junction capacitance, e.g. 50fF (overrides --ec-ej)")
    g.add_argument("--aspect", type=float, default=10.0, help="bore l/r (default 10)")
    g.add_argument("--r", type=_quantity, default=1e-6, help="bore radius (default 1um)")
    g.add_argument("--l", type=_quantity, help="bore length (overrides --aspect)")
    d = p.add_argument_group("dissipation (reported when --R is given)")
    d.add_argument("--R", type=_quantity, help="effective resistance, e.g. 25.8ohm")
    d.add_argument("--tau", type=_quantity, help="transit time, e.g. 0.33ps")
    d.add_argument("--length", type=_quantity, default=100e-6, help="device size for tau = length/c (default 100um)")
    d.add_argument("--gap", type=_quantity, default=const.AL_GAP, help="superconducting gap (default 180ueV)")


def _add_lattice_args(p):
    p.add_argument("--n", type=_positive_int, help="pixel count N (default 4)")
    p.add_argument("--nx", type=_positive_int, help="lattice width N_x")
    p.add_argument("--ny", type=_positive_int, help="lattice height N_y")
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--exhaustive", action="store_true", help="force every measurement outcome")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="PCG64 seed (required for randomized commands)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="flat 'key = value' file; command-line flags take precedence")

    parser = _Parser(prog="squid-interface", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("error-budget", parents=[common], help="device detection-error budget")
    _add_device_args(p)
    subs["error-budget"] = p

    p = sub.add_parser("potential-scan", parents=[common], help="tabulate U(phi) and the biased U'(phi)")
    _add_device_args(p)
    p.add_argument("--phi-min", type=float, default=-1.0, help="grid start in units of phi0")
    p.add_argument("--phi-max", type=float, default=1.0, help="grid end in units of phi0")
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--ib", type=_quantity, help="bias current")
    p.add_argument("--bias-time", type=_quantity, help="transit time T; sets i_b = e/T")
    subs["potential-scan"] = p

    p = sub.add_parser("detect", parents=[common], help="Monte Carlo particle detection")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--charge-sign", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--absent", action="store_true", help="no particle passes")
    subs["detect"] = p

    p = sub.add_parser("transfer", parents=[common], help="electron -> array state transfer")
    _add_lattice_args(p)
    p.add_argument("--random-phases", action="store_true", help="random detector phases theta_k")
    subs["transfer"] = p

    p = sub.add_parser("teleport", parents=[common], help="array -> electron qudit teleportation")
    _add_lattice_args(p)
    subs["teleport"] = p

    p = sub.add_parser("sweep", parents=[common], help="error budget over a parameter range")
    _add_device_args(p)
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--num", type=int, default=11)
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.add_argument("--trials", type=int, default=0, help="detection Monte Carlo trials per point")
    p.add_argument("--workers", type=int, default=1)
    subs["sweep"] = p
    return parser, subs


def read_config(path: str | Path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        if key not in actions or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for this command")
        action = actions[key]
        if action.nargs == 0:
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            # string defaults go through the action's type converter
            defaults[key] = value
    sub.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(subs[args.command], read_config(args.config))
            args = parser.parse_args(argv)
        if args.command in RANDOMIZED and args.seed is None:
            raise UsageError(f"{args.command} requires --seed")
        records = COMMANDS[args.command](args)
        emit(records, args)
    except UsageError as exc:
        print(f"squid-interface: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"squid-interface: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuantumInterfaceError as exc:
        print(f"squid-interface: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
