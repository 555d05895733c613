"""Command-line interface.

Every subcommand writes one document (CSV or JSON) to ``--output`` or to
standard output. Floats are written in their shortest round-trip form and
no timestamps are emitted, so identical inputs give identical bytes.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HillError, NumericalError

OUTPUT_DIR_ENV = "HILLHOPF_OUTPUT_DIR"

#: Settings accepted in a ``key = value`` config file, with their valid ranges.
CONFIG_KEYS = {
    "tol": (1e-14, 1e-6),
    "corrector_tol": (1e-15, 1e-6),
    "max_iter": (1, 100),
    "r_min": (1e-8, 1e-1),
}


@dataclass
class RunConfig:
    command: str
    output: str = None
    fmt: str = None
    tol: float = 1e-12
    corrector_tol: float = 1e-12
    max_iter: int = 15
    r_min: float = 1e-3
    extra: dict = field(default_factory=dict)


def read_config(path):
    """Parse a ``key = value`` file (``#`` starts a comment)."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown setting {key!r}; "
                                  f"known: {', '.join(sorted(CONFIG_KEYS))}")
            try:
                number = int(value) if key == "max_iter" else float(value)
            except ValueError:
                raise DomainError(f"{path}:{lineno}: {key} must be numeric") from None
            values[key] = number
    return values


def _validate(cfg):
    for key, (lo, hi) in CONFIG_KEYS.items():
        value = getattr(cfg, key)
        if not lo <= value <= hi:
            raise DomainError(f"{key} = {value} outside the valid range [{lo:g}, {hi:g}]")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def _resolve_output(path):
    if path is None or path == "-":
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(text, cfg):
    target = _resolve_output(cfg.output)
    if target is None:
        sys.stdout.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def load_record(spec):
    """An orbit record from a JSON file, or an inline ``a,b,c,d,e,f`` state."""
    if os.path.exists(spec):
        with open(spec) as fh:
            try:
                record = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{spec}: not valid JSON ({exc})") from None
        if "ic" not in record:
            raise DomainError(f"{spec}: no 'ic' field")
        return record
    try:
        values = [float(v) for v in spec.replace(" ", "").split(",")]
    except ValueError:
        raise DomainError(f"--ic {spec!r} is neither a file nor six comma-separated numbers") from None
    return {"ic": values}


def _state(record):
    ic = np.asarray(record["ic"], dtype=float)
    if ic.shape != (6,) or not np.all(np.isfinite(ic)):
        raise DomainError("an initial state needs six finite components")
    return ic


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_constants(cfg):
    from .hopf import thresholds
    from .linear import build_constants
    from .lissajous import table_audit

    doc = {"constants": build_constants().as_dict(), "thresholds": thresholds().as_dict(),
           "tables": table_audit()}
    return dump_json(doc)


def _equilibrium_record(eq):
    from .hopf import period_estimate

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        period = period_estimate(eq)
    I1, I2, I3, Lp = (float(v) for v in eq.point)
    return {"family": eq.family, "orbit_kind": eq.orbit_kind, "stability": eq.stability,
            "I1": I1, "I2": I2, "I3": I3, "Lp": Lp, "energy": eq.energy,
            "period_estimate": float(period)}


def cmd_equilibria(cfg):
    from .hopf import equilibria, thresholds

    Lp = cfg.extra["L"]
    records = [_equilibrium_record(eq) for eq in equilibria(Lp)]
    if (cfg.fmt or "json") == "csv":
        rows = [[r["Lp"], r["energy"], r["I1"], r["I2"], r["I3"], r["family"]] for r in records]
        return dump_csv(["L'", "h", "I1", "I2", "I3", "branch"], rows)
    return dump_json({"Lp": Lp, "equilibria": records, "thresholds": thresholds().as_dict()})


def sphere_levels(Lp, n_levels=7):
    """Energies for an automatic level-curve grid: every equilibrium value
    plus evenly spaced levels strictly between the extreme values."""
    from .hopf import equilibria

    values = sorted({round(eq.energy, 15) for eq in equilibria(Lp)})
    lo, hi = values[0], values[-1]
    inner = list(np.linspace(lo, hi, n_levels + 2)[1:-1]) if hi > lo else []
    return sorted(set(values) | set(float(v) for v in inner))


def cmd_sphere(cfg):
    from .hopf import level_curve

    Lp, h, n = cfg.extra["L"], cfg.extra["h"], cfg.extra["n"]
    if h == "auto":
        levels = sphere_levels(Lp)
    else:
        try:
            levels = [float(h)]
        except ValueError:
            raise DomainError(f"--h must be a number or 'auto', not {h!r}") from None
    rows = []
    for level in levels:
        curve = level_curve(Lp, level, n)
        for i1, i2, i3, br in zip(curve["I1"], curve["I2"], curve["I3"], curve["branch"]):
            rows.append([Lp, level, i1, i2, i3, str(int(br))])
    if (cfg.fmt or "csv") == "json":
        return dump_json({"Lp": Lp, "levels": levels,
                          "points": [[r[1], r[2], r[3], r[4], int(r[5])] for r in rows]})
    return dump_csv(["L'", "h", "I1", "I2", "I3", "branch"], rows)


def cmd_orbit(cfg):
    from .orbits import synthesize

    orbit = synthesize(cfg.extra["family"], cfg.extra["L"], cfg.extra["n"],
                       seed_phase=cfg.extra["phase"])
    if (cfg.fmt or "json") == "csv":
        return dump_csv(["ell", "px", "py", "pz", "Px", "Py", "Pz"],
                        np.column_stack([orbit.phases, orbit.states]))
    doc = orbit.header()
    doc["family"] = cfg.extra["family"]
    doc["samples"] = np.column_stack([orbit.phases, orbit.states])
    return dump_json(doc)


def cmd_propagate(cfg):
    from .hill import hamiltonian
    from .propagation import propagate

    record = load_record(cfg.extra["ic"])
    ic = _state(record)
    t_end = cfg.extra["t"]
    if t_end is None:
        if "period" not in record:
            raise DomainError("--t is required unless the input record has a period")
        t_end = float(record["period"])
    n = cfg.extra["n"]
    t_eval = np.linspace(0.0, t_end, n)
    traj = propagate(ic, t_end, cfg.tol, r_min=cfg.r_min, t_eval=t_eval)
    rows = np.column_stack([traj.times, traj.states, hamiltonian(traj.states)])
    if (cfg.fmt or "csv") == "json":
        final = traj.states[-1]
        return dump_json({"t_end": t_end, "tol": cfg.tol, "final": final,
                          "return_error": float(np.linalg.norm(final - ic)),
                          "samples": rows})
    return dump_csv(["t", "px", "py", "pz", "Px", "Py", "Pz", "H"], rows)


def _symmetric_flag(value):
    return {"auto": None, "yes": True, "no": False}[value]


def cmd_correct(cfg):
    from .orbits import correct

    record = load_record(cfg.extra["ic"])
    ic = _state(record)
    period = cfg.extra["T"] if cfg.extra["T"] is not None else record.get("period")
    if period is None:
        raise DomainError("--T is required unless the input record has a period")
    orbit = correct(ic, float(period), constraint=cfg.extra["constraint"],
                    tol=cfg.corrector_tol, max_iter=cfg.max_iter,
                    symmetric=_symmetric_flag(cfg.extra["symmetric"]), int_tol=cfg.tol,
                    family=record.get("family", ""), Lp=float(record.get("Lp") or float("nan")))
    doc = orbit.as_dict()
    doc["iterations"] = orbit.iterations
    return dump_json(doc)


def cmd_family(cfg):
    from .orbits import (PeriodicOrbit, continue_family, correct, family_rows,
                         locate_bifurcations)

    with open(cfg.extra["start"]) as fh:
        record = json.load(fh)
    seed = PeriodicOrbit.from_dict(record)
    if not seed.residual <= 1e-10:
        seed = correct(seed.ic, seed.period, tol=cfg.corrector_tol, int_tol=cfg.tol,
                       max_iter=cfg.max_iter, family=seed.family, Lp=seed.Lp)
    e_max = cfg.extra["energy_max"]
    stop = None if e_max is None else (lambda m: m.energy > e_max)
    members = continue_family(seed, cfg.extra["members"], direction=cfg.extra["direction"],
                              step=cfg.extra["step"], tol=cfg.corrector_tol, int_tol=cfg.tol,
                              stop=stop)
    if (cfg.fmt or "csv") == "json":
        doc = {"members": [m.as_dict() for m in members]}
        if cfg.extra["bifurcations"]:
            doc["bifurcations"] = [
                {"energy": b.energy, "index": b.index, "direction": b.direction, "value": b.value}
                for b in locate_bifurcations(members, int_tol=cfg.tol)]
        return dump_json(doc)
    return dump_csv(["energy", "period", "s1_scaled", "s2_scaled"], family_rows(members))


COMMANDS = {
    "constants": cmd_constants,
    "equilibria": cmd_equilibria,
    "sphere": cmd_sphere,
    "orbit": cmd_orbit,
    "propagate": cmd_propagate,
    "correct": cmd_correct,
    "family": cmd_family,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="output file (default: stdout); relative "
                        f"paths go under ${OUTPUT_DIR_ENV} when set")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"))
    common.add_argument("--config", help="key = value file with tolerances "
                        f"({', '.join(sorted(CONFIG_KEYS))})")
    common.add_argument("--tol", type=float, help="integration tolerance")

    parser = argparse.ArgumentParser(prog="hillhopf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="model constants, thresholds, tables")

    p = sub.add_parser("equilibria", parents=[common], help="reduced-flow equilibria")
    p.add_argument("--L", type=float, required=True, help="L' (sphere parameter)")

    p = sub.add_parser("sphere", parents=[common], help="level curves on the Hopf sphere")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--h", default="auto", help="energy level, or 'auto' for a grid")
    p.add_argument("--n", type=int, default=400, help="I1 nodes per level")

    p = sub.add_parser("orbit", parents=[common], help="synthesize an analytic orbit")
    p.add_argument("--family", required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--phase", type=float, help="mean anomaly of the exported ic")
    p.add_argument("--n", type=int, default=256, help="samples per orbit")

    p = sub.add_parser("propagate", parents=[common], help="integrate the Hill equations")
    p.add_argument("--ic", required=True, help="orbit JSON file or six comma-separated numbers")
    p.add_argument("--t", type=float, help="time span (default: the record's period)")
    p.add_argument("--n", type=int, default=201, help="output samples")

    p = sub.add_parser("correct", parents=[common], help="differential correction")
    p.add_argument("--ic", required=True)
    p.add_argument("--T", type=float, help="period guess (default: the record's period)")
    p.add_argument("--constraint", choices=("energy", "period"), default="energy")
    p.add_argument("--symmetric", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--max-iter", type=int, dest="max_iter")

    p = sub.add_parser("family", parents=[common], help="continue a family of periodic orbits")
    p.add_argument("--start", required=True, help="orbit JSON (output of 'correct')")
    p.add_argument("--members", type=int, required=True)
    p.add_argument("--direction", type=int, choices=(-1, 1), default=1)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--energy-max", type=float, dest="energy_max")
    p.add_argument("--bifurcations", action="store_true", help="locate |s| = 2 crossings")
    return parser


def make_config(args):
    cfg = RunConfig(command=args.command, output=args.output, fmt=args.fmt)
    if args.config:
        for key, value in read_config(args.config).items():
            setattr(cfg, key, value)
    if args.tol is not None:
        cfg.tol = args.tol
    if getattr(args, "max_iter", None) is not None:
        cfg.max_iter = args.max_iter
    _validate(cfg)
    skip = {"command", "output", "fmt", "config", "tol", "max_iter"}
    cfg.extra = {k: v for k, v in vars(args).items() if k not in skip}
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        text = COMMANDS[cfg.command](cfg)
        _emit(text, cfg)
    except DomainError as exc:
        print(f"hillhopf {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"hillhopf {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, HillError) as exc:
        print(f"hillhopf {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
