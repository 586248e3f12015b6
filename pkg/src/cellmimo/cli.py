"""Command-line front end: coverage curves, rate tables, optimal-m reports,
and Monte Carlo validation runs, emitted as CSV/JSON for plotting.

Exit codes: 0 success, 1 validation gate failed, 2 invalid configuration or
arguments, 3 numeric failure, 4 I/O failure.  Network parameters may come
from ``--config FILE`` (``key=value`` lines); explicit flags win.  Every file
written via ``--out`` gets a ``<out>.manifest.json`` sidecar recording the
command, parameters, code version, seed, wall time, and output checksum, so
reruns can be checked byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import ConfigError, NumericError
from .geometry import NetworkConfig
from .montecarlo import estimate_coverage_curve, simulate_sinr
from .pzf import argmin_mean_inverse_sinr, optimal_m
from .rate import ergodic_rate, rate_quantile, sinr_ccdf

__all__ = ["RunManifest", "main"]


# --------------------------------------------------------------------------
# Run manifests

@dataclass(frozen=True)
class RunManifest:
    """Provenance sidecar for one CLI output file.

    Two runs with identical manifests (up to ``wall_time_s``) produce
    byte-identical output files; the sha256 makes that checkable.
    """

    command: list[str]
    parameters: dict
    version: str
    seed: int | None
    wall_time_s: float
    outputs: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    """Stable float formatting for CSV/JSON text output."""
    return f"{float(x):.12g}"


def _write_output(
    text: str,
    out_path: str | None,
    *,
    argv: list[str],
    args: argparse.Namespace,
    seed: int | None,
    started: float,
) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    data = text.encode("utf-8")
    with open(out_path, "wb") as fh:
        fh.write(data)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = RunManifest(
        command=list(argv),
        parameters=params,
        version=__version__,
        seed=seed,
        wall_time_s=round(time.perf_counter() - started, 3),
        outputs=[{"path": out_path, "sha256": hashlib.sha256(data).hexdigest()}],
    )
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json())


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# Argument plumbing

_CONFIG_FILE_KEYS = {
    "lam": float,
    "alpha": float,
    "sigma2": float,
    "nt": int,
    "nr": int,
    "m": int,
}


def _read_config_file(path: str) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip().lower(), value.strip()
            if not sep or not key or not value:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            if key not in _CONFIG_FILE_KEYS:
                raise ConfigError(
                    f"{path}:{lineno}: unknown key {key!r} "
                    f"(known: {', '.join(sorted(_CONFIG_FILE_KEYS))})"
                )
            try:
                values[key] = _CONFIG_FILE_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def _resolve_network(args: argparse.Namespace) -> tuple[NetworkConfig, int | None]:
    """Merge flags over an optional config file, then apply defaults."""
    file_vals = _read_config_file(args.config) if args.config else {}

    def pick(name, fallback):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_vals.get(name, fallback)

    n_t, n_r = pick("nt", None), pick("nr", None)
    if n_t is None or n_r is None:
        raise ConfigError("--nt and --nr are required (as flags or config-file keys)")
    config = NetworkConfig(
        lam=float(pick("lam", 1.0)),
        alpha=float(pick("alpha", 4.0)),
        sigma2=float(pick("sigma2", 0.0)),
        n_t=int(n_t),
        n_r=int(n_r),
    )
    m = pick("m", None)
    return config, (int(m) if m is not None else None)


def _check_m_receiver(receiver: str, m: int | None) -> int | None:
    if receiver == "mmse" and m is not None:
        raise ConfigError("--m applies to the PZF receiver only")
    return m


def _parse_zdb_range(spec: str) -> list[float]:
    """Inclusive dB grid START:STOP:STEP; START > STOP yields an empty grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"z-range must be START:STOP:STEP in dB, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"z-range must be numeric, got {spec!r}") from exc
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise ConfigError(f"z-range must be finite, got {spec!r}")
    if step <= 0.0:
        raise ConfigError(f"z-range step must be positive, got {step!r}")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [start + k * step for k in range(max(0, count))]


def _parse_float_list(spec: str, flag: str) -> list[float]:
    try:
        values = [float(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {spec!r}") from exc
    if not values:
        raise ConfigError(f"{flag} must list at least one value")
    return values


def _parse_int_list(spec: str, flag: str) -> list[int]:
    values = _parse_float_list(spec, flag)
    out = [int(v) for v in values]
    if any(o != v for o, v in zip(out, values)):
        raise ConfigError(f"{flag} expects integers, got {spec!r}")
    return out


def _merge_range_values(argv: list[str]) -> list[str]:
    # Let `--zdb -5:20:1` work even though the value starts with a dash.
    merged: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token == "--zdb" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"--zdb={argv[i + 1]}")
            skip = True
        else:
            merged.append(token)
    return merged


# --------------------------------------------------------------------------
# Subcommands

def _db_to_linear(z_db: float) -> float:
    return 10.0 ** (z_db / 10.0)


def cmd_coverage(args: argparse.Namespace, argv: list[str], started: float) -> int:
    config, m = _resolve_network(args)
    m = _check_m_receiver(args.rx, m)
    grid_db = _parse_zdb_range(args.zdb)
    header = ["z_db", "z_linear", "coverage", "method", "ci_halfwidth"]
    rows: list[list[str]] = []
    if args.method == "analytic":
        ccdf = sinr_ccdf(config, args.rx, m=m)
        for z_db in grid_db:
            z = _db_to_linear(z_db)
            rows.append([_fmt(z_db), _fmt(z), _fmt(ccdf(z)), "analytic", ""])
    elif grid_db:
        estimates = estimate_coverage_curve(
            config, args.rx, [_db_to_linear(v) for v in grid_db],
            args.trials, args.seed, m=m, threads=args.threads,
        )
        for z_db, est in zip(grid_db, estimates):
            rows.append([
                _fmt(z_db), _fmt(_db_to_linear(z_db)), _fmt(est.mean),
                "mc", _fmt(1.96 * est.std_error),
            ])
    seed = args.seed if args.method == "mc" else None
    _write_output(_csv_text(header, rows), args.out,
                  argv=argv, args=args, seed=seed, started=started)
    return 0


def _quantile_label(q: float) -> str:
    pct = 100.0 * q
    return f"q{pct:02.0f}" if float(pct).is_integer() else f"q{pct:g}"


def cmd_rate(args: argparse.Namespace, argv: list[str], started: float) -> int:
    config, m = _resolve_network(args)
    m = _check_m_receiver(args.rx, m)
    quantiles = _parse_float_list(args.quantiles, "--quantiles")
    if any(not 0.0 < q < 1.0 for q in quantiles):
        raise ConfigError("--quantiles values must lie in (0, 1)")

    # SST serves one stream at a time, so its SINR law is the n_t = 1 one.
    stream_n_t = config.n_t if args.scheme == "sm" else 1
    stream_config = NetworkConfig(
        lam=config.lam, alpha=config.alpha, sigma2=config.sigma2,
        n_t=stream_n_t, n_r=config.n_r,
    )
    ccdf = sinr_ccdf(stream_config, args.rx, m=m)
    mean = ergodic_rate(ccdf)
    if args.scheme == "sm":
        mean *= config.n_t
    qvals = {
        _quantile_label(q): rate_quantile(
            args.scheme, ccdf, config.n_t, q, convention=args.convention
        )
        for q in quantiles
    }

    if args.format == "json":
        payload: dict = {"mean_rate": mean}
        payload.update(qvals)
        payload.update({
            "scheme": args.scheme,
            "receiver": args.rx,
            "n_t": config.n_t,
            "n_r": config.n_r,
            "m": m,
        })
        text = json.dumps(payload, indent=2) + "\n"
    else:
        header = ["scheme", "receiver", "n_t", "n_r", "m", "mean_rate", *qvals]
        row = [args.scheme, args.rx, str(config.n_t), str(config.n_r),
               "" if m is None else str(m), _fmt(mean),
               *(_fmt(v) for v in qvals.values())]
        text = _csv_text(header, [row])
    _write_output(text, args.out, argv=argv, args=args, seed=None, started=started)
    return 0


def cmd_optimal_m(args: argparse.Namespace, argv: list[str], started: float) -> int:
    n_ts = _parse_int_list(args.nt, "--nt")
    n_rs = _parse_int_list(args.nr, "--nr")
    alphas = _parse_float_list(args.alpha, "--alpha")
    sigma2s = _parse_float_list(args.sigma2, "--sigma2")
    header = ["n_t", "n_r", "alpha", "sigma2", "m_star", "m_argmin", "status"]
    rows: list[list[str]] = []
    for n_t in n_ts:
        for n_r in n_rs:
            for alpha in alphas:
                for sigma2 in sigma2s:
                    config = NetworkConfig(
                        lam=args.lam, alpha=alpha, sigma2=sigma2, n_t=n_t, n_r=n_r,
                    )
                    prefix = [str(n_t), str(n_r), _fmt(alpha), _fmt(sigma2)]
                    try:
                        m_star = optimal_m(config)
                        m_argmin = argmin_mean_inverse_sinr(config)
                    except ConfigError:
                        rows.append(prefix + ["", "", "infeasible"])
                        continue
                    rows.append(prefix + [
                        str(m_star),
                        "|".join(str(v) for v in m_argmin),
                        "ok",
                    ])
    _write_output(_csv_text(header, rows), args.out,
                  argv=argv, args=args, seed=None, started=started)
    return 0


def cmd_validate(args: argparse.Namespace, argv: list[str], started: float) -> int:
    config, m = _resolve_network(args)
    receivers = ("pzf", "mmse") if args.rx == "both" else (args.rx,)
    if "pzf" not in receivers:
        m = _check_m_receiver("mmse", m)
    grid_db = _parse_zdb_range(args.zdb)
    if not grid_db:
        raise ConfigError("validation needs a nonempty z-range")

    sinr = simulate_sinr(
        config, receivers, args.trials, args.seed, m=m, threads=args.threads,
    )
    header = ["receiver", "z_db", "z_linear", "analytic", "mc", "std_error", "z_score"]
    rows: list[list[str]] = []
    worst = 0.0
    for receiver in receivers:
        ccdf = sinr_ccdf(config, receiver, m=m if receiver == "pzf" else None)
        samples = sinr[receiver]
        for z_db in grid_db:
            z = _db_to_linear(z_db)
            exact = ccdf(z)
            hits = (samples > z).astype(float)
            mc = float(hits.mean())
            se = float(hits.std(ddof=1)) / math.sqrt(hits.size)
            if se > 0.0:
                score = (mc - exact) / se
            else:
                score = 0.0 if mc == exact else math.inf
            worst = max(worst, abs(score))
            rows.append([
                receiver, _fmt(z_db), _fmt(z), _fmt(exact), _fmt(mc),
                _fmt(se), _fmt(score),
            ])
    _write_output(_csv_text(header, rows), args.out,
                  argv=argv, args=args, seed=args.seed, started=started)
    if worst > 4.0:
        print(f"validation FAILED: worst |z-score| = {worst:.2f} > 4", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# Parser

def _add_network_flags(parser: argparse.ArgumentParser, *, with_m: bool = True) -> None:
    parser.add_argument("--nt", type=int, help="transmit antennas / streams per BS")
    parser.add_argument("--nr", type=int, help="receive antennas per user")
    parser.add_argument("--alpha", type=float, help="path-loss exponent (default 4)")
    parser.add_argument("--sigma2", type=float, help="noise power (default 0)")
    parser.add_argument("--lam", type=float, help="BS density per unit area (default 1)")
    if with_m:
        parser.add_argument(
            "--m", type=int,
            help="PZF cancellation order: null the m-1 nearest interferers "
                 "(default: optimal-split rule)",
        )
    parser.add_argument("--config", metavar="FILE",
                        help="key=value parameter file; flags override it")
    parser.add_argument("--out", metavar="PATH",
                        help="output file (default stdout); also writes PATH.manifest.json")


def _add_mc_flags(parser: argparse.ArgumentParser, default_trials: int) -> None:
    parser.add_argument("--trials", type=int, default=default_trials,
                        help="Monte Carlo trials (default %(default)s)")
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed (default %(default)s)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellmimo",
        description="Coverage and rate for open-loop MIMO cellular downlinks "
                    "under a Poisson network model (PZF and MMSE receivers).",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cov = sub.add_parser(
        "coverage", help="coverage probability P[SINR > z] over a dB grid",
    )
    _add_network_flags(cov)
    cov.add_argument("--rx", choices=("pzf", "mmse"), required=True,
                     help="receiver type")
    cov.add_argument("--zdb", required=True, metavar="START:STOP:STEP",
                     help="inclusive threshold grid in dB, e.g. -5:20:1")
    cov.add_argument("--method", choices=("analytic", "mc"), default="analytic",
                     help="evaluation method (default %(default)s)")
    _add_mc_flags(cov, default_trials=20000)
    cov.set_defaults(func=cmd_coverage)

    rate_p = sub.add_parser(
        "rate", help="mean sum rate and rate quantiles for one configuration",
    )
    _add_network_flags(rate_p)
    rate_p.add_argument("--rx", choices=("pzf", "mmse"), required=True,
                        help="receiver type")
    rate_p.add_argument("--scheme", choices=("sm", "sst"), default="sm",
                        help="spatial multiplexing or single-stream (default %(default)s)")
    rate_p.add_argument("--quantiles", default="0.05,0.8",
                        help="comma-separated quantile levels (default %(default)s)")
    rate_p.add_argument("--convention", choices=("calibrated", "per-stream"),
                        default="calibrated",
                        help="rate-quantile scaling convention (default %(default)s)")
    rate_p.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default %(default)s)")
    rate_p.set_defaults(func=cmd_rate)

    opt = sub.add_parser(
        "optimal-m", help="optimal PZF cancellation order over a parameter sweep",
    )
    opt.add_argument("--nt", required=True,
                     help="comma-separated transmit antenna counts")
    opt.add_argument("--nr", required=True,
                     help="comma-separated receive antenna counts")
    opt.add_argument("--alpha", default="4",
                     help="comma-separated path-loss exponents (default %(default)s)")
    opt.add_argument("--sigma2", default="0",
                     help="comma-separated noise powers (default %(default)s)")
    opt.add_argument("--lam", type=float, default=1.0,
                     help="BS density (default %(default)s)")
    opt.add_argument("--out", metavar="PATH",
                     help="output file (default stdout); also writes PATH.manifest.json")
    opt.set_defaults(func=cmd_optimal_m)

    val = sub.add_parser(
        "validate", help="Monte Carlo versus analytic coverage with z-scores",
    )
    _add_network_flags(val)
    val.add_argument("--rx", choices=("pzf", "mmse", "both"), default="both",
                     help="receiver(s) to validate (default %(default)s)")
    val.add_argument("--zdb", default="0:10:5", metavar="START:STOP:STEP",
                     help="threshold grid in dB (default %(default)s)")
    _add_mc_flags(val, default_trials=20000)
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    argv = _merge_range_values(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        return args.func(args, argv, started)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
