"""Command-line surface: model/curve ingestion, orchestration, canonical JSON.

Exit codes: 0 all requested checks passed, 1 an identity/check failed (with a
structured report), 2 configuration errors.  All JSON output is canonical
(sorted keys, rationals as "p/q" strings, never floats) and schema-versioned
as "toprec-kp/1", so byte-identical across runs and platforms.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import kp, loopeq
from .curve import build_curve
from .errors import ConfigError, ToprecError
from .exactalg import RatFunc, parse_poly, rat, rat_str
from .toprec import CorrelatorTable, TensorForm

SCHEMA = "toprec-kp/1"
DEFAULT_G_MAX = 4
DEFAULT_N_MAX = 6


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def worker_count() -> int:
    """Parallelism cap from TOPREC_THREADS (default 1; exact math is pure,
    so any schedule yields bit-identical output)."""
    try:
        return max(1, int(os.environ.get("TOPREC_THREADS", "1")))
    except ValueError:
        return 1


def _emit(args, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    if getattr(args, "format", "text") == "json":
        text = canonical_json(payload)
    else:
        text = _render_text(payload)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_text(payload: dict) -> str:
    lines = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}{k}.", obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}{i}.", v)
        else:
            lines.append(f"{prefix[:-1]} = {obj}")

    walk("", payload)
    return "\n".join(lines) + "\n"


# -- config ingestion ---------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"bad TOML in {path}: {err}") from err


def _parse_model_arg(text: str) -> tuple[int, int]:
    try:
        p, q = (int(v) for v in text.split(","))
        return p, q
    except ValueError as err:
        raise ConfigError(f"--model expects 'p,q', got {text!r}") from err


def _resolve_model(args) -> kp.PQModel:
    constants = {}
    p = q = None
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
        block = cfg.get("model", {})
        p, q = block.get("p"), block.get("q")
        constants = {k: rat(str(v)) for k, v in block.get("constants", {}).items()}
    if getattr(args, "model", None):
        p, q = _parse_model_arg(args.model)
    if p is None or q is None:
        raise ConfigError("no model given: pass --model p,q or --config with a [model] block")
    try:
        return kp.pq_model(int(p), int(q), constants)
    except ToprecError as err:
        raise ConfigError(str(err)) from err


def _resolve_curve(args):
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
        if "curve" in cfg:
            block = cfg["curve"]
            try:
                x = parse_poly(block["x"], "z")
                y = parse_poly(block["y"], "z")
            except (KeyError, ValueError) as err:
                raise ConfigError(f"bad [curve] block: {err}") from err
            return build_curve(x, y)
    if getattr(args, "model", None) or getattr(args, "config", None):
        return kp.build_model_curve(_resolve_model(args))
    raise ConfigError("no curve given: pass --model p,q or --config with a [curve] block")


def _check_limits(args, g: int, n: int) -> None:
    if getattr(args, "unsafe_limits", False):
        return
    if g > DEFAULT_G_MAX or n > DEFAULT_N_MAX:
        raise ConfigError(
            f"(g,n)=({g},{n}) exceeds the default limits g<={DEFAULT_G_MAX}, "
            f"n<={DEFAULT_N_MAX}; pass --unsafe-limits to override"
        )


# -- subcommands --------------------------------------------------------------

def cmd_omegas(args) -> int:
    curve = _resolve_curve(args)
    _check_limits(args, args.g, args.n)
    table = CorrelatorTable(curve)
    form = table.compute(args.g, args.n)
    _emit(
        args,
        {
            "command": "omegas",
            "curve": {"x": str(curve.x_poly), "y": str(curve.y_poly)},
            "omega": form.to_json_dict(),
        },
    )
    return 0


def cmd_free_energy(args) -> int:
    model = _resolve_model(args)
    _check_limits(args, args.gmax, 1)
    table = CorrelatorTable(kp.build_model_curve(model))
    targets = list(range(args.gmax + 1))
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda g: table.compute(g, 1) if g >= 1 else None, targets))
    entries = []
    for g in targets:
        f = kp.free_energy(model, table, g)
        entries.append(
            {
                "g": g,
                "value_tau": str(f),
                "log_coeff": rat_str(f.log_coeff),
                "terms": [
                    {"exponent": rat_str(e), "coeff": rat_str(c)}
                    for e, c in sorted(f.terms.items())
                ],
            }
        )
    _emit(
        args,
        {
            "command": "free-energy",
            "model": model.label(),
            "time_change": {"rho": rat_str(model.rho), "m": model.m},
            "free_energies": entries,
        },
    )
    return 0


def cmd_string_series(args) -> int:
    model = _resolve_model(args)
    ss = kp.string_series(model, args.gmax)
    _emit(
        args,
        {
            "command": "string-series",
            "model": model.label(),
            "time_change": {"rho": rat_str(model.rho), "m": model.m},
            "orders": [
                {
                    "g": g,
                    "value_tau": str(u),
                    "terms": [
                        {"exponent": rat_str(e), "coeff": rat_str(c)}
                        for e, c in sorted(u.terms.items())
                    ],
                }
                for g, u in enumerate(ss.orders)
            ],
        },
    )
    return 0


def cmd_lax(args) -> int:
    model = _resolve_model(args)
    pair = kp.build_lax(model)
    _emit(
        args,
        {
            "command": "lax",
            "model": model.label(),
            "L": [[str(e) for e in row] for row in pair.L],
            "M": [[str(e) for e in row] for row in pair.M],
        },
    )
    return 0


def cmd_pq_model(args) -> int:
    """Full battery: Lax compatibility, spectral identity, string series,
    free energies, Tau cross-check."""
    model = _resolve_model(args)
    gmax = args.gmax
    checks = []
    failed = None
    try:
        pair = kp.build_lax(model)
        ss = kp.string_series(model, max(gmax, 2))
        deg_x = max(max(e.terms.keys(), default=0) for row in pair.L for e in row)
        samples = list(range(deg_x + 2))
        checks.append(kp.verify_lax(pair, ss, args.hbar_order, samples))
        checks.append(kp.spectral_det_check(model))
        table = CorrelatorTable(kp.build_model_curve(model))
        fe = kp.free_energy_table(model, table, gmax)
        checks.append(kp.tau_crosscheck(model, fe, ss, gmax))
    except ToprecError as err:
        failed = {"error": type(err).__name__, "detail": str(err)}
    payload = {
        "command": "pq-model",
        "model": model.label(),
        "checks": checks,
        "passed": failed is None,
    }
    if failed:
        payload["first_failure"] = failed
    _emit(args, payload)
    return 0 if failed is None else 1


def cmd_verify_loopeq(args) -> int:
    wanted = {c.strip() for c in args.checks.split(",")} if args.checks else None
    sys_ = loopeq.random_system(args.d, args.deg, args.seed, rat(args.hbar))
    pts = loopeq.safe_points(sys_, 8)
    reports = []
    failed = None

    def run(name, fn):
        nonlocal failed
        if failed is not None or (wanted is not None and name not in wanted):
            return
        try:
            reports.append(fn())
        except ToprecError as err:
            failed = {"check": name, "error": type(err).__name__, "detail": str(err)}

    run("replication", lambda: loopeq.check_replication(sys_, *pts[:3]))
    for n in (1, 2, 3, 4):
        fixed = [(pts[i], i % args.d) for i in range(n - 1)]
        run(f"linear{n}", lambda n=n, fixed=fixed: loopeq.check_linear(sys_, n, fixed))
    for n in (1, 2, 3):
        fixed = [(pts[3 + i], i % args.d) for i in range(n - 1)]
        run(f"quadratic{n}", lambda n=n, fixed=fixed: loopeq.check_quadratic(sys_, n, fixed))
    run("spectral", lambda: loopeq.check_spectral_identity(sys_, pts[0]))
    if args.d >= 2:
        run(
            "w3regular",
            lambda: loopeq.check_w3_regular(sys_, pts[1], (0, 1 % args.d, 0), pts[2]),
        )
    run(
        "symmetry",
        lambda: loopeq.check_w_symmetry(
            sys_, [(pts[0], 0), (pts[1], (1 % args.d)), (pts[2], (2 % args.d))]
        ),
    )
    perm = [[1 if j == (i + 1) % args.d else 0 for j in range(args.d)] for i in range(args.d)]
    probes = [[(pts[0], 0), (pts[1], 1 % args.d)]]
    run("gauge_constant", lambda: loopeq.check_gauge_constant(sys_, perm, probes))
    g = RatFunc(parse_poly("x^2 + 1", "x"))
    run("gauge_scalar", lambda: loopeq.check_gauge_scalar(sys_, g, probes, pts[3]))

    payload = {
        "command": "verify-loopeq",
        "d": args.d,
        "deg": args.deg,
        "seed": args.seed,
        "hbar": rat_str(rat(args.hbar)),
        "generator_retries": sys_.retries,
        "checks": reports,
        "passed": failed is None,
    }
    if failed:
        payload["first_failure"] = failed
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(canonical_json({"schema": SCHEMA, **payload}))
    _emit(args, payload)
    return 0 if failed is None else 1


def golden_compare(actual_path: str, expected_path: str) -> dict:
    """Byte-exact comparison after canonical re-serialization."""
    def load(path):
        try:
            with open(path) as fh:
                return json.load(fh)
        except FileNotFoundError as err:
            raise ConfigError(f"missing file: {path}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"not canonical JSON: {path}: {err}") from err

    actual = canonical_json(load(actual_path))
    expected = canonical_json(load(expected_path))
    if actual == expected:
        return {"command": "golden-compare", "passed": True, "diff": []}
    diff = []
    for i, (a, b) in enumerate(zip(actual.splitlines(), expected.splitlines())):
        if a != b:
            diff.append({"line": i + 1, "actual": a[:200], "expected": b[:200]})
    return {"command": "golden-compare", "passed": False, "diff": diff[:20]}


def cmd_golden_compare(args) -> int:
    report = golden_compare(args.actual, args.expected)
    _emit(args, report)
    return 0 if report["passed"] else 1


# -- parser -------------------------------------------------------------------

def _add_io_flags(sub):
    sub.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_argument("--output", help="write the report to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toprec-kp",
        description="Exact topological recursion and loop-equation checks for (p,q) reductions of KP",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("omegas", help="compute one correlator omega_n^(g) exactly")
    s.add_argument("--model", help="model as 'p,q' (uses its printed curve)")
    s.add_argument("--config", help="TOML file with a [curve] or [model] block")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--unsafe-limits", action="store_true")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_omegas)

    s = subs.add_parser("free-energy", help="free energies F^(g) in the tau variable")
    s.add_argument("--model", help="model as 'p,q'")
    s.add_argument("--config")
    s.add_argument("--gmax", type=int, default=3)
    s.add_argument("--unsafe-limits", action="store_true")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_free_energy)

    s = subs.add_parser("string-series", help="string-equation series u^{g}(tau)")
    s.add_argument("--model", help="model as 'p,q'")
    s.add_argument("--config")
    s.add_argument("--gmax", type=int, default=3)
    _add_io_flags(s)
    s.set_defaults(fn=cmd_string_series)

    s = subs.add_parser("lax", help="print the folded Lax pair L, M")
    s.add_argument("--model", help="model as 'p,q'")
    s.add_argument("--config")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_lax)

    s = subs.add_parser("pq-model", help="full battery of model checks")
    s.add_argument("--model", help="model as 'p,q'")
    s.add_argument("--config")
    s.add_argument("--gmax", type=int, default=3)
    s.add_argument("--hbar-order", type=int, default=2)
    s.add_argument("--unsafe-limits", action="store_true")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_pq_model)

    s = subs.add_parser("verify-loopeq", help="loop-equation identity battery on a seeded system")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--deg", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--hbar", default="1")
    s.add_argument("--checks", help="comma list to restrict (e.g. linear1,quadratic1)")
    s.add_argument("--report", help="also write the canonical JSON report here")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_verify_loopeq)

    s = subs.add_parser("golden-compare", help="canonical-JSON comparison of two reports")
    s.add_argument("actual")
    s.add_argument("expected")
    _add_io_flags(s)
    s.set_defaults(fn=cmd_golden_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ToprecError as err:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "passed": False,
            "first_failure": {"error": type(err).__name__, "detail": str(err)},
        }
        sys.stderr.write(canonical_json(report))
        return 1


if __name__ == "__main__":
    sys.exit(main())
