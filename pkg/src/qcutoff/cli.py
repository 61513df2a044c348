"""Command-line front end: profiles, thresholds, single oracle values, lemma checks.

Exit codes: 0 success, 1 a verification check failed, 2 invalid configuration,
3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .bounds import (
    build_profile,
    kac_window_lower,
    kac_window_upper,
    mixed_lower,
    mixed_upper,
    state_k0,
    transposition_window,
)
from .kernel import (
    FREE_ORTHOGONAL,
    FREE_SYMMETRIC,
    GroupFamily,
    NumericContext,
    min_admissible_N,
    threshold_k1,
    tau_from_theta,
    theta_from_tau,
)
from .oracle import exact_tv
from .states import AngleMixture, CentralState, Haar, PureCharacter, RandomTransposition, RotationAngle
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

PROFILE_COLUMNS = (
    "k", "k0_flag", "dsh_upper", "closed_upper", "char_lower", "window_lower",
    "exact_tv", "exact_err", "l2_norm",
    "dsh_status", "closed_status", "char_status", "window_status", "exact_status",
)
NUMERIC_COLUMNS = frozenset(PROFILE_COLUMNS[2:9])


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


# -- parsing helpers -----------------------------------------------------------------

_ANGLE = re.compile(r"^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


def parse_angle(text: str) -> float:
    """``pi``, ``pi/2``, ``2pi/3``, ``2*pi/3`` or a decimal value in radians."""
    m = _ANGLE.match(text.lower())
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise ConfigError(f"bad angle {text!r}")
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad angle {text!r}") from None


def parse_k_range(text: str) -> list:
    """``a..b`` (inclusive), ``a`` or a comma list of either."""
    ks = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            try:
                lo, hi = int(a), int(b)
            except ValueError:
                raise ConfigError(f"bad k range {part!r}") from None
            ks.extend(range(lo, hi + 1))
        else:
            try:
                ks.append(int(part))
            except ValueError:
                raise ConfigError(f"bad k value {part!r}") from None
    if not ks:
        raise ConfigError(f"empty k range {text!r}")
    if min(ks) < 1:
        raise ConfigError("k must be at least 1")
    return sorted(set(ks))


def read_mixture(path) -> AngleMixture:
    """Lines ``tau weight``; ``#`` starts a comment."""
    atoms = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read mixture file: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'tau weight'")
        try:
            atoms.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: not a number") from None
    return AngleMixture(tuple(atoms))


def parse_state(text: str, G: GroupFamily):
    """State spec ``pure:T``, ``rotation:THETA``, ``mixture:FILE``, ``randtrans``, ``counit`` or ``haar``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "pure":
        try:
            return PureCharacter(float(arg))
        except ValueError:
            raise ConfigError(f"bad character value {arg!r}") from None
    if kind == "rotation":
        return RotationAngle(parse_angle(arg))
    if kind == "mixture":
        return read_mixture(arg)
    if kind == "randtrans":
        return RandomTransposition()
    if kind == "counit":
        return PureCharacter(float(G.carrier))
    if kind == "haar":
        return Haar()
    raise ConfigError(f"unknown state {text!r}")


def fmt_number(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def json_number(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


# -- run configuration -----------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    group: GroupFamily
    state: CentralState
    state_text: str
    ks: tuple
    c: float
    c0: float
    ctx: NumericContext
    fmt: str
    out: str | None


def _context(args) -> NumericContext:
    kw = {}
    if args.tol is not None:
        kw["rtol"] = kw["atol"] = args.tol
    if args.max_terms is not None:
        kw["max_terms"] = args.max_terms
    if args.quad_order is not None:
        kw["quad_order"] = args.quad_order
    return NumericContext(**kw)


def _state_text(args):
    given = [x for x in (args.state, args.theta, args.tau) if x is not None]
    if len(given) > 1:
        raise ConfigError("give only one of --state, --theta, --tau")
    if args.state is not None:
        return args.state
    if args.theta is not None:
        return f"rotation:{args.theta}"
    if args.tau is not None:
        tau = float(args.tau)
        return f"rotation:{fmt_number(theta_from_tau(tau))}"
    raise ConfigError("a state is required (--state, --theta or --tau)")


def make_config(args, group=None, N=None, state=None, need_k=True) -> RunConfig:
    """Validate everything before any computation; raises ConfigError or ValueError."""
    group = args.group if group is None else group
    N = args.N if N is None else N
    if group is None or N is None:
        raise ConfigError("--group and --N are required")
    G = GroupFamily(group, int(N))
    text = _state_text(args) if state is None else state
    s = CentralState(G, parse_state(text, G))
    ks = ()
    if need_k:
        if not args.k:
            raise ConfigError("--k is required")
        ks = tuple(parse_k_range(args.k))
    c = 1.0 if args.c is None else float(args.c)
    c0 = 1.0 if args.c0 is None else float(args.c0)
    fmt = args.format or "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}")
    return RunConfig(G, s, text, ks, c, c0, _context(args), fmt, args.out)


# -- profile -------------------------------------------------------------------------

def profile_table(profile) -> list:
    rows = []
    for r in profile.rows:
        ex = r.exact
        rows.append({
            "k": r.k,
            "k0_flag": "bounded" if r.bounded else "divergent",
            "dsh_upper": float(r.dsh_upper.value),
            "closed_upper": float(r.closed_upper.value),
            "char_lower": float(r.char_lower.value),
            "window_lower": float(r.window_lower.value),
            "exact_tv": float(ex.value) if ex is not None else math.nan,
            "exact_err": float(ex.error_bar) if ex is not None else math.nan,
            "l2_norm": float(r.l2_norm),
            "dsh_status": r.dsh_upper.status,
            "closed_status": r.closed_upper.status,
            "char_status": r.char_lower.status,
            "window_status": r.window_lower.status,
            "exact_status": ex.status if ex is not None else "none",
        })
    return rows


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for row in rows:
        w.writerow([fmt_number(row[c]) if c in NUMERIC_COLUMNS else row[c] for c in PROFILE_COLUMNS])
    return buf.getvalue()


def csv_to_table(text: str) -> list:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for col in PROFILE_COLUMNS:
            v = rec[col]
            row[col] = int(v) if col == "k" else float(v) if col in NUMERIC_COLUMNS else v
        rows.append(row)
    return rows


def table_to_json(cfg: RunConfig, rows) -> str:
    doc = {
        "group": cfg.group.label,
        "N": cfg.group.N,
        "state": cfg.state_text,
        "rows": [{c: (json_number(r[c]) if c in NUMERIC_COLUMNS else r[c]) for c in PROFILE_COLUMNS}
                 for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _profile_text(cfg: RunConfig):
    try:
        profile = build_profile(cfg.state, cfg.ks, cfg.ctx)
    except (ArithmeticError, ValueError) as exc:
        raise NumericFailure(str(exc)) from exc
    rows = profile_table(profile)
    text = table_to_csv(rows) if cfg.fmt == "csv" else table_to_json(cfg, rows)
    suspect = [r["k"] for r in rows if r["exact_status"] == "suspect"]
    return text, suspect


def cmd_profile(args) -> int:
    cfg = make_config(args)
    text, suspect = _profile_text(cfg)
    _emit(text, cfg.out)
    if suspect:
        raise NumericFailure(f"exact TV outside [0, 1] beyond its error bar at k = {suspect}")
    return EXIT_OK


def _split(value):
    return [v.strip() for v in str(value).split(",") if v.strip()] if value is not None else [None]


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "-", text).strip("-")


def cmd_sweep(args) -> int:
    """Cartesian product over comma-separated --group, --N and --state values."""
    if not args.out:
        raise ConfigError("sweep needs --out DIR")
    states = _split(args.state) if args.state is not None else [None]
    combos = list(itertools.product(_split(args.group), _split(args.N), states))
    configs = [make_config(args, group=g, N=int(n) if n is not None else None, state=st)
               for g, n, st in combos]
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = []
    for cfg in configs:
        text, suspect = _profile_text(cfg)
        name = f"{cfg.group.label}_N{cfg.group.N}_{_slug(cfg.state_text)}.{cfg.fmt}"
        (outdir / name).write_text(text)
        print(outdir / name)
        if suspect:
            failures.append(name)
    if failures:
        raise NumericFailure(f"suspect exact TV values in {', '.join(failures)}")
    return EXIT_OK


# -- cutoff --------------------------------------------------------------------------

def cutoff_summary(cfg: RunConfig) -> dict:
    """Thresholds and window bounds at ``c`` for the configured state."""
    s, G, N, c = cfg.state, cfg.group, cfg.group.N, cfg.c
    k0 = state_k0(s)
    out = {"k0": k0 if math.isfinite(k0) else None, "k1": None, "admissible": None,
           "upper_at_c": None, "lower_at_c": None}
    spec = s.spec
    if G.kind == FREE_ORTHOGONAL and isinstance(spec, RotationAngle):
        tau = tau_from_theta(spec.theta)
        out["k1"] = threshold_k1(N, tau)
        out["admissible"] = N >= min_admissible_N(tau)
        if out["admissible"]:
            if c < cfg.c0:
                raise ConfigError(f"c={c} is below c0={cfg.c0}")
            out["upper_at_c"] = kac_window_upper(N, spec.theta, c, cfg.c0, tau=tau).value
        if N >= 5:
            out["lower_at_c"] = kac_window_lower(N, spec.theta, c, tau=tau).value
    elif isinstance(spec, AngleMixture):
        out["k1"] = N * math.log(N) / spec.eta
        out["admissible"] = all(N >= min_admissible_N(t) for t, _ in spec.atoms)
        if out["admissible"]:
            out["upper_at_c"] = mixed_upper(N, spec, c).value
        if N >= 5:
            out["lower_at_c"] = mixed_lower(N, spec, c).value
    elif G.kind == FREE_SYMMETRIC and isinstance(spec, PureCharacter) and spec.t == N - 2:
        out["k1"] = N * math.log(N) / 2
        out["admissible"] = N >= 16
        if out["admissible"]:
            up, lo = transposition_window(N, c, cfg.ctx)
            out["upper_at_c"], out["lower_at_c"] = up.value, lo.value
    return {key: json_number(v) if isinstance(v, float) else v for key, v in out.items()}


def cmd_cutoff(args) -> int:
    cfg = make_config(args, need_k=False)
    if not cfg.c > 0:
        raise ConfigError("c must be positive")
    _emit(json.dumps(cutoff_summary(cfg), indent=2) + "\n", cfg.out)
    return EXIT_OK


# -- oracle --------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    cfg = make_config(args)
    if len(cfg.ks) != 1:
        raise ConfigError("oracle takes a single step count --k")
    try:
        res = exact_tv(cfg.state, cfg.ks[0], cfg.ctx)
    except (ArithmeticError, ValueError) as exc:
        raise NumericFailure(str(exc)) from exc
    if args.json:
        doc = {"tv": json_number(res.value), "err": json_number(res.error_bar), "status": res.status}
        text = json.dumps(doc) + "\n"
    elif res.divergent:
        text = "DIVERGENT\n"
    else:
        text = f"{fmt_number(res.value)} ± {res.error_bar:.3e}\n"
    _emit(text, cfg.out)
    if res.status == "suspect":
        raise NumericFailure("exact TV outside [0, 1] beyond its error bar")
    return EXIT_OK


# -- verify --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    only = None
    if args.only:
        only = [n for item in args.only for n in _split(item)]
    try:
        reports = run_all(only)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    if args.json:
        text = json.dumps([r.to_dict() for r in reports], indent=2, default=json_number) + "\n"
    else:
        lines = []
        for r in reports:
            lines.append(r.line())
            lines.extend("  " + p.line() for p in r.parts)
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# -- entry point ---------------------------------------------------------------------

COMMANDS = {
    "profile": cmd_profile,
    "cutoff": cmd_cutoff,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcutoff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value file; command-line flags override it")
        p.add_argument("--out", help="output path (directory for sweep)")
        p.add_argument("--json", action="store_true", help="JSON output (oracle, verify)")
        if name == "verify":
            p.add_argument("--only", action="append", help="check name(s), comma separated")
            continue
        many = name == "sweep"
        p.add_argument("--group", help="oplus, splus or aut" + (" (comma list)" if many else ""))
        p.add_argument("--N", type=None if many else int)
        p.add_argument("--state", help="pure:T, rotation:THETA, mixture:FILE, randtrans, counit, haar")
        p.add_argument("--theta", help="rotation angle: pi, pi/2, pi/3 or radians")
        p.add_argument("--tau", type=float, help="rotation parameter 2 - 2cos(theta)")
        p.add_argument("--k", help="a..b, a, or a comma list")
        p.add_argument("--c", type=float)
        p.add_argument("--c0", type=float)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--tol", type=float)
        p.add_argument("--max-terms", type=int)
        p.add_argument("--quad-order", type=int)
    return parser


def read_config(path) -> list:
    """Turn a flat ``key = value`` file into command-line tokens."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    tokens = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or key == "config":
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key == "json":
            if value.lower() in ("1", "true", "yes"):
                tokens.append("--json")
            continue
        tokens += [f"--{key}", value]
    return tokens


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        tokens = read_config(args.config)
        args = parser.parse_args([argv[0]] + tokens + list(argv[1:]))
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except NumericFailure as exc:
        print(f"qcutoff: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"qcutoff: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
