"""Command-line interface.

Subcommands: simulate, asymptotic, compare, optimize, sweep. Configuration
comes from a JSON file; dB quantities and meters are converted to linear
scale and normalized distances here, at the boundary, and nowhere else.
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import asymptotic, circular as _circ, montecarlo
from .errors import NumericError, ValidationError
from .params import Centralized, Circular, DistributedExplicit, SystemParams, validate

DEFAULT_R0_M = 500.0
DEFAULT_PRECISION = 10
_OPTIMIZE_SNRS_DB = (0.0, 10.0, 20.0)


# ---------------------------------------------------------------------------
# config parsing


def _require_keys(doc: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ValidationError(f"unknown {where} keys: {', '.join(unknown)}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"malformed JSON in {path!r}: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    if not isinstance(doc, dict):
        raise ValidationError("config root must be a JSON object")
    return doc


def _theta_from(doc: dict, side: str) -> float:
    """Correlation coefficient from either theta_X or the spacing ratio L/Delta."""
    theta_key, spacing_key = f"theta_{side}", f"spacing_{side}"
    if theta_key in doc and spacing_key in doc:
        raise ValidationError(f"give {theta_key} or {spacing_key}, not both")
    if theta_key in doc:
        return float(doc[theta_key])
    if spacing_key in doc:
        ratio = float(doc[spacing_key])
        if ratio < 0.0:
            raise ValidationError(f"{spacing_key} must be nonnegative, got {ratio!r}")
        return math.exp(-ratio)
    return 0.0


def _normalized(doc: dict, key: str, r0: float):
    """Fetch a length from `key` (normalized) or `key`_m (meters), not both."""
    meters_key = key + "_m"
    if key in doc and meters_key in doc:
        raise ValidationError(f"give {key} or {meters_key}, not both")
    if meters_key in doc:
        value = doc[meters_key]
        if isinstance(value, list):
            return [float(v) / r0 for v in value]
        return float(value) / r0
    if key in doc:
        return doc[key]
    return None


def _parse_topology(doc) -> tuple:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError('topology must be an object with a "kind" field')
    kind = doc["kind"]
    r0 = float(doc.get("r0_m", DEFAULT_R0_M))
    if r0 <= 0.0:
        raise ValidationError(f"r0_m must be positive, got {r0!r}")
    if kind == "centralized":
        _require_keys(doc, {"kind", "d", "d_m", "r0_m"}, "topology")
        d = _normalized(doc, "d", r0)
        if d is None:
            raise ValidationError("centralized topology needs d or d_m")
        return Centralized(d=float(d))
    if kind == "distributed":
        _require_keys(doc, {"kind", "distances", "distances_m", "r0_m"}, "topology")
        dist = _normalized(doc, "distances", r0)
        if dist is None:
            raise ValidationError("distributed topology needs distances or distances_m")
        return DistributedExplicit(distances=tuple(float(v) for v in dist))
    if kind == "circular":
        _require_keys(
            doc, {"kind", "r_c", "r_c_m", "r_a", "r_a_m", "user", "r0_m"}, "topology"
        )
        r_c = _normalized(doc, "r_c", r0)
        r_a = _normalized(doc, "r_a", r0)
        if r_c is None or r_a is None:
            raise ValidationError("circular topology needs r_c and r_a (or _m forms)")
        user = doc.get("user", "random")
        if user != "random":
            if not isinstance(user, dict):
                raise ValidationError('circular user must be "random" or {"r_u": .., "phi": ..}')
            _require_keys(user, {"r_u", "r_u_m", "phi"}, "user")
            r_u = _normalized(user, "r_u", r0)
            if r_u is None:
                raise ValidationError("fixed user needs r_u or r_u_m")
            user = (float(r_u), float(user.get("phi", 0.0)))
        return Circular(r_c=float(r_c), r_a=float(r_a), user=user)
    raise ValidationError(f"unknown topology kind {kind!r}")


_CONFIG_KEYS = {
    "n_t", "n_r", "snr_db", "nu", "omega_db", "alpha",
    "theta_t", "theta_r", "spacing_t", "spacing_r",
    "topology", "trials", "seed", "format", "out", "precision",
    "axis", "grid", "spacing_side", "cmimo_d",
}


class RunConfig:
    """Validated run description shared by the config-driven subcommands."""

    def __init__(self, doc: dict):
        _require_keys(doc, _CONFIG_KEYS, "config")
        for key in ("n_t", "n_r", "snr_db", "nu", "topology"):
            if key not in doc:
                raise ValidationError(f"config is missing required key {key!r}")
        alpha = doc.get("alpha", 1.0)
        alpha_t = tuple(float(a) for a in (alpha if isinstance(alpha, list) else [alpha]))
        self.params = SystemParams(
            n_t=int(doc["n_t"]),
            n_r=int(doc["n_r"]),
            snr=10.0 ** (float(doc["snr_db"]) / 10.0),
            nu=float(doc["nu"]),
            omega=10.0 ** (float(doc.get("omega_db", 0.0)) / 10.0),
            alpha=alpha_t,
            theta_t=_theta_from(doc, "t"),
            theta_r=_theta_from(doc, "r"),
        )
        self.topology = _parse_topology(doc["topology"])
        self.trials = int(doc.get("trials", 1000))
        self.seed = int(doc.get("seed", 0))
        self.fmt = str(doc.get("format", "csv"))
        if self.fmt not in ("csv", "json"):
            raise ValidationError(f'format must be "csv" or "json", got {self.fmt!r}')
        self.out = doc.get("out")
        self.precision = int(doc.get("precision", DEFAULT_PRECISION))
        if self.precision < 1:
            raise ValidationError(f"precision must be positive, got {self.precision!r}")
        self.axis = doc.get("axis")
        self.grid = doc.get("grid")
        self.spacing_side = str(doc.get("spacing_side", "t"))
        self.cmimo_d = None if doc.get("cmimo_d") is None else float(doc["cmimo_d"])
        validate(self.params, self.topology)


# ---------------------------------------------------------------------------
# output emission


def _format_cell(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{precision}g}"
    return str(value)


def emit_table(columns: list[str], rows: list[dict], fmt: str, precision: int,
               meta: dict | None = None) -> str:
    if fmt == "json":
        payload = {"columns": columns, "rows": rows}
        if meta:
            payload["meta"] = meta
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(c), precision) for c in columns])
    return buf.getvalue()


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    cfg = RunConfig(_load_config(args.config))
    seed = args.seed if args.seed is not None else cfg.seed
    est = montecarlo.run_trials(cfg.params, cfg.topology, cfg.trials, seed, args.workers)
    columns = ["mean", "std_error", "trials", "seed"]
    rows = [{"mean": est.mean, "std_error": est.std_error,
             "trials": est.trials, "seed": est.seed}]
    text = emit_table(columns, rows, args.format or cfg.fmt, cfg.precision)
    _write_output(text, args.out or cfg.out)
    return 0


def _asymptotic_row(cfg: RunConfig) -> tuple[list[str], dict]:
    p, topo = cfg.params, cfg.topology
    nu_is_4 = abs(p.nu - 4.0) <= 1e-12
    if isinstance(topo, Centralized):
        return ["se_cmimo_asym", "se_cmimo_high_snr"], {
            "se_cmimo_asym": asymptotic.se_cmimo_asymptotic(p, topo.d),
            "se_cmimo_high_snr": asymptotic.se_high_snr(p, topo),
        }
    if isinstance(topo, DistributedExplicit):
        cols = ["delta", "se_dmimo_asym", "se_dmimo_high_snr"]
        row = {
            "delta": asymptotic.delta_sum(topo.distances, p.nu),
            "se_dmimo_asym": asymptotic.se_dmimo_asymptotic(p, topo.distances),
            "se_dmimo_high_snr": asymptotic.se_high_snr(p, topo),
        }
        if cfg.cmimo_d is not None:
            cols += ["d_cmimo", "se_cmimo_asym", "ordering", "d_crossover"]
            row["d_cmimo"] = cfg.cmimo_d
            row["se_cmimo_asym"] = asymptotic.se_cmimo_asymptotic(p, cfg.cmimo_d)
            row["ordering"] = asymptotic.compare_schemes(p.n_r, cfg.cmimo_d, p.nu, row["delta"])
            row["d_crossover"] = (p.n_r / row["delta"]) ** (1.0 / p.nu)
        return cols, row
    # circular
    cols: list[str] = []
    row: dict = {}
    if topo.user != "random":
        r_u = float(topo.user[0])
        cols += ["se_cmimo_ring", "se_dmimo_ring", "se_dmimo_high_snr"]
        row["se_cmimo_ring"] = _circ.se_circular_cmimo(p, r_u)
        row["se_dmimo_ring"] = _circ.se_circular_dmimo(p, r_u, topo.r_a)
        row["se_dmimo_high_snr"] = asymptotic.se_high_snr(p, topo)
    if nu_is_4:
        cols += ["avg_se_dmimo", "avg_se_cmimo_center", "note"]
        row["avg_se_dmimo"] = _circ.avg_se_urban(p, topo.r_c, topo.r_a)
        row["avg_se_cmimo_center"] = _circ.avg_se_urban(p, topo.r_c, 0.0)
        row["note"] = ""
    else:
        cols += ["avg_se_dmimo", "avg_se_cmimo_center", "note"]
        row["avg_se_dmimo"] = None
        row["avg_se_cmimo_center"] = None
        row["note"] = "disk-averaged closed form requires nu = 4"
    return cols, row


def _cmd_asymptotic(args) -> int:
    cfg = RunConfig(_load_config(args.config))
    columns, row = _asymptotic_row(cfg)
    text = emit_table(columns, [row], args.format or cfg.fmt, cfg.precision)
    _write_output(text, args.out or cfg.out)
    return 0


def _cmd_compare(args) -> int:
    cfg = RunConfig(_load_config(args.config))
    if not isinstance(cfg.topology, DistributedExplicit) or cfg.cmimo_d is None:
        raise ValidationError(
            "compare needs a distributed topology plus cmimo_d (the co-located distance)"
        )
    p = cfg.params
    delta = asymptotic.delta_sum(cfg.topology.distances, p.nu)
    d = cfg.cmimo_d
    columns = ["n_r", "d", "nu", "delta", "c_scale", "ordering", "d_crossover"]
    rows = [{
        "n_r": p.n_r,
        "d": d,
        "nu": p.nu,
        "delta": delta,
        "c_scale": p.n_r * d ** (-p.nu),
        "ordering": asymptotic.compare_schemes(p.n_r, d, p.nu, delta),
        "d_crossover": (p.n_r / delta) ** (1.0 / p.nu),
    }]
    text = emit_table(columns, rows, args.format or cfg.fmt, cfg.precision)
    _write_output(text, args.out or cfg.out)
    return 0


def _cmd_optimize(args) -> int:
    r0 = args.r0
    r_c = args.rc / r0 if r0 is not None else args.rc
    r_a_opt, chi0 = _circ.optimal_ring_radius(r_c)
    columns = ["r_c", "chi0", "r_a_opt_ratio", "r_a_opt"]
    row = {"r_c": r_c, "chi0": chi0, "r_a_opt_ratio": r_a_opt / r_c, "r_a_opt": r_a_opt}
    if r0 is not None:
        columns.append("r_a_opt_m")
        row["r_a_opt_m"] = r_a_opt * r0

    grid = se_by_snr = None
    if args.sweep or args.plot:
        # Brute-force verification sweep; the argmax is SNR-independent.
        base = SystemParams(n_t=1, n_r=100, snr=1.0, nu=4.0)
        grid = [k * 1e-3 * r_c for k in range(1, 991)]
        se_by_snr = {}
        for snr_db in _OPTIMIZE_SNRS_DB:
            p = SystemParams(n_t=base.n_t, n_r=base.n_r, snr=10.0 ** (snr_db / 10.0), nu=4.0)
            se_by_snr[snr_db] = [_circ.avg_se_urban(p, r_c, r_a) for r_a in grid]
    if args.sweep:
        assert grid is not None and se_by_snr is not None
        for snr_db in _OPTIMIZE_SNRS_DB:
            col = f"sweep_argmax_snr{snr_db:g}db"
            columns.append(col)
            row[col] = grid[int(np.argmax(se_by_snr[snr_db]))]

    text = emit_table(columns, [row], args.format or "csv", DEFAULT_PRECISION)
    _write_output(text, args.out)
    if args.plot:
        from . import plotting

        assert grid is not None and se_by_snr is not None
        plotting.render_ring_profile(grid, se_by_snr, r_a_opt, args.plot)
    return 0


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid range must be start:stop:step, got {text!r}")
        start, stop, step = (float(v) for v in parts)
        if step <= 0.0:
            raise ValidationError(f"grid step must be positive, got {step!r}")
        out, k = [], 0
        while True:
            v = start + k * step
            if v > stop + 1e-12 * max(1.0, abs(step)):
                break
            out.append(v)
            k += 1
        return out
    return [float(v) for v in text.split(",") if v.strip()]


def _cmd_sweep(args) -> int:
    cfg = RunConfig(_load_config(args.config))
    axis = args.axis or cfg.axis
    if axis is None:
        raise ValidationError("sweep needs an axis (config key 'axis' or --axis)")
    grid = _parse_grid(args.grid) if args.grid else cfg.grid
    if not grid:
        raise ValidationError("sweep needs a grid (config key 'grid' or --grid)")
    seed = args.seed if args.seed is not None else cfg.seed
    side = args.side or cfg.spacing_side
    table = montecarlo.sweep(
        cfg.params, cfg.topology, axis, grid, cfg.trials, seed,
        workers=args.workers, spacing_side=side, cmimo_d=cfg.cmimo_d,
    )
    text = emit_table(table.columns, table.rows, args.format or cfg.fmt,
                      cfg.precision, meta=table.meta)
    _write_output(text, args.out or cfg.out)
    if args.plot:
        from . import plotting

        plotting.render_sweep(table, args.plot)
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(sub: argparse.ArgumentParser, config_required: bool = True) -> None:
    if config_required:
        sub.add_argument("--config", required=True, help="JSON run configuration")
    sub.add_argument("--seed", type=int, default=None,
                     help="experiment seed (default: config value, else 0)")
    sub.add_argument("--workers", type=int, default=1,
                     help="worker processes for Monte Carlo trials")
    sub.add_argument("--format", choices=("csv", "json"), default=None,
                     help="output format (default: config value, else csv)")
    sub.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-se",
        description="Spectral efficiency of co-located vs distributed massive MIMO: "
                    "Monte Carlo, closed-form limits, and ring-placement optimization.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="Monte Carlo spectral-efficiency estimate")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("asymptotic", help="closed-form large-array limits")
    _add_common(p)
    p.set_defaults(func=_cmd_asymptotic)

    p = subs.add_parser("compare", help="order the schemes: n_r * d^-nu versus delta")
    _add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("optimize", help="optimal ring radius for the nu=4 disk average")
    p.add_argument("--rc", type=float, required=True, help="cell radius")
    p.add_argument("--r0", type=float, default=None,
                   help="reference distance in meters; when given, --rc is in meters")
    p.add_argument("--sweep", action="store_true",
                   help="verify by brute-force sweep and report per-SNR argmax columns")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="render the ring profile to an image file")
    _add_common(p, config_required=False)
    p.set_defaults(func=_cmd_optimize)

    p = subs.add_parser("sweep", help="closed forms + Monte Carlo over one axis")
    _add_common(p)
    p.add_argument("--axis", choices=("snr_db", "d", "r_a", "spacing", "n_r"),
                   default=None, help="swept axis (overrides config)")
    p.add_argument("--grid", default=None,
                   help="grid values: comma list or start:stop:step (overrides config)")
    p.add_argument("--side", choices=("t", "r"), default=None,
                   help="which side a spacing sweep moves (overrides config)")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="render the sweep to an image file alongside the table")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
