"""Command-line driver: trends, peak, synth, and diagnose subcommands.

Configuration precedence, lowest to highest: built-in defaults (the standard
analysis parameters 250/10/0.1/100/0.1/0.8/0.5), a TOML config file given
with --config, environment variables prefixed RECURCONNECT_, explicit flags.

All outputs are plain CSV (plus PBM bitmaps from diagnose) derived solely
from the inputs, the resolved configuration, and the seed; re-running a
command reproduces them byte-exactly. Floats are printed with 6 significant
digits (round-half-even). Files are written to temporary names and renamed
into place only when the whole command succeeds, so failed runs leave no
partial outputs.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime
import os
import pathlib
import re
import sys
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import analysis, synthetic
from .errors import RecurConnectError
from .ingest import align, read_series
from .preprocess import autocorrelation, autocorrelation_time, mutual_information, normalize
from .recurrence import RecurrenceConfig, recurrence_matrix, tau_recurrence_rate, write_pbm
from .errors import NoDecorrelationError

ENV_PREFIX = "RECURCONNECT_"

DEFAULTS = {
    "window": 250,
    "step": 10,
    "epsilon": 0.1,
    "surrogates": 100,
    "alpha": 0.1,
    "strong": 0.8,
    "moderate": 0.5,
    "seed": 0,
    "workers": 1,
    "search": "1999-01-01:2001-12-31",
}

_INT_KEYS = {"window", "step", "surrogates", "seed", "workers"}
_FLOAT_KEYS = {"epsilon", "alpha", "strong", "moderate"}
_STR_KEYS = {"search", "out"}

TREND_HEADER = (
    "window_start_index,start_date,end_date,"
    "cpr,cpr_p,cpr_significant,rho,rho_p,rho_significant,status"
)
BINS_HEADER = (
    "window_start_index,strong_sig,strong_all,moderate_sig,moderate_all,weak_sig,weak_all"
)
PEAK_HEADER = (
    "offset,x_start_date,x_end_date,y_start_date,y_end_date,"
    "cpr,cpr_p,cpr_significant,rho,rho_p,rho_significant,status"
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    inputs: list[pathlib.Path]
    out: pathlib.Path
    window: int
    step: int
    epsilon: float
    surrogates: int
    alpha: float
    strong: float
    moderate: float
    seed: int
    workers: int
    search: tuple[datetime.date, datetime.date]

    def validate(self):
        if self.window < 50:
            raise UsageError(f"--window must be at least 50, got {self.window}")
        if not 1 <= self.step <= self.window:
            raise UsageError(f"--step must lie in [1, window], got {self.step}")
        if not self.epsilon > 0:
            raise UsageError(f"--epsilon must be positive, got {self.epsilon}")
        if self.surrogates < 2:
            raise UsageError(f"--surrogates must be at least 2, got {self.surrogates}")
        if not 0 < self.alpha < 1:
            raise UsageError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.moderate < self.strong:
            raise UsageError(
                f"need 0 < moderate < strong, got {self.moderate}, {self.strong}"
            )
        if self.seed < 0:
            raise UsageError(f"--seed must be nonnegative, got {self.seed}")
        if self.workers < 1:
            raise UsageError(f"--workers must be at least 1, got {self.workers}")


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _fmt_bool(flag: bool) -> str:
    return "true" if flag else "false"


def _parse_search(text: str) -> tuple[datetime.date, datetime.date]:
    try:
        lo_text, hi_text = text.split(":")
        lo = datetime.date.fromisoformat(lo_text.strip())
        hi = datetime.date.fromisoformat(hi_text.strip())
    except ValueError:
        raise UsageError(
            f"--search must look like 1999-01-01:2001-12-31, got {text!r}"
        ) from None
    if lo > hi:
        raise UsageError(f"empty search interval {text!r}")
    return lo, hi


def _load_config_file(path) -> dict:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    unknown = set(data) - _INT_KEYS - _FLOAT_KEYS - _STR_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def _env_overrides() -> dict:
    out = {}
    for key in _INT_KEYS | _FLOAT_KEYS | _STR_KEYS:
        raw = os.environ.get(ENV_PREFIX + key.upper())
        if raw is None:
            continue
        try:
            if key in _INT_KEYS:
                out[key] = int(raw)
            elif key in _FLOAT_KEYS:
                out[key] = float(raw)
            else:
                out[key] = raw
        except ValueError:
            raise UsageError(
                f"bad value for {ENV_PREFIX + key.upper()}: {raw!r}"
            ) from None
    return out


def _resolve_config(args) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    merged.update(_env_overrides())
    for key in (*_INT_KEYS, *_FLOAT_KEYS, *_STR_KEYS):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if "out" not in merged or merged["out"] is None:
        raise UsageError("--out is required")
    cfg = RunConfig(
        inputs=[pathlib.Path(p) for p in getattr(args, "inputs", [])],
        out=pathlib.Path(merged["out"]),
        window=int(merged["window"]),
        step=int(merged["step"]),
        epsilon=float(merged["epsilon"]),
        surrogates=int(merged["surrogates"]),
        alpha=float(merged["alpha"]),
        strong=float(merged["strong"]),
        moderate=float(merged["moderate"]),
        seed=int(merged["seed"]),
        workers=int(merged["workers"]),
        search=_parse_search(str(merged["search"])),
    )
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Output staging: write to temporary names, rename on success
# ---------------------------------------------------------------------------


class _Stage:
    def __init__(self, out_dir: pathlib.Path):
        self.out_dir = out_dir
        self.pending: list[tuple[pathlib.Path, pathlib.Path]] = []

    def path(self, name: str) -> pathlib.Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        final = self.out_dir / name
        tmp = self.out_dir / (name + ".tmp")
        self.pending.append((tmp, final))
        return tmp

    def commit(self):
        for tmp, final in self.pending:
            os.replace(tmp, final)
        self.pending.clear()

    def discard(self):
        for tmp, _ in self.pending:
            tmp.unlink(missing_ok=True)
        self.pending.clear()


def _safe_label(label: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]", "-", label)
    return cleaned or "series"


def _measure_fields(result) -> list[str]:
    if result is None:
        return ["", "", ""]
    return [_fmt(result.observed), _fmt(result.p_value), _fmt_bool(result.significant)]


def _write_lines(path: pathlib.Path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _trend_lines(trend) -> list[str]:
    lines = [TREND_HEADER]
    for r in trend.records:
        row = [str(r.start_index), r.start_date.isoformat(), r.end_date.isoformat()]
        row += _measure_fields(r.cpr)
        row += _measure_fields(r.rho)
        row.append(r.status)
        lines.append(",".join(row))
    return lines


def _bins_lines(bins) -> list[str]:
    lines = [BINS_HEADER]
    for w in bins.windows:
        lines.append(
            ",".join(
                str(v)
                for v in (
                    w.start_index,
                    w.strong_sig,
                    w.strong_all,
                    w.moderate_sig,
                    w.moderate_all,
                    w.weak_sig,
                    w.weak_all,
                )
            )
        )
    return lines


def _peak_lines(result) -> list[str]:
    lines = [PEAK_HEADER]
    for r in result.records:
        row = [
            str(r.offset),
            r.x_start_date.isoformat(),
            r.x_end_date.isoformat(),
            r.y_start_date.isoformat(),
            r.y_end_date.isoformat(),
        ]
        row += _measure_fields(r.cpr)
        row += _measure_fields(r.rho)
        row.append(r.status)
        lines.append(",".join(row))
    return lines


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_trends(args) -> int:
    cfg = _resolve_config(args)
    if len(cfg.inputs) < 2:
        raise UsageError("trends needs at least 2 input CSV files")
    series = [read_series(p) for p in cfg.inputs]
    data = align(series)
    trends = analysis.sliding_pairwise(
        data,
        analysis.WindowSpec(cfg.window, cfg.step),
        RecurrenceConfig(cfg.epsilon),
        n_surrogates=cfg.surrogates,
        alpha=cfg.alpha,
        seed=cfg.seed,
        workers=cfg.workers,
    )
    bins = analysis.bin_connectivity(trends, cfg.strong, cfg.moderate)
    stage = _Stage(cfg.out)
    try:
        used = set()
        for trend in trends:
            base = f"trend_{_safe_label(trend.pair[0])}__{_safe_label(trend.pair[1])}"
            name = base
            k = 2
            while name in used:
                name = f"{base}-{k}"
                k += 1
            used.add(name)
            _write_lines(stage.path(name + ".csv"), _trend_lines(trend))
        _write_lines(stage.path("bins.csv"), _bins_lines(bins))
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    return 0


def cmd_peak(args) -> int:
    cfg = _resolve_config(args)
    if len(cfg.inputs) != 2:
        raise UsageError("peak needs exactly 2 input CSV files")
    x = read_series(cfg.inputs[0])
    y = read_series(cfg.inputs[1])
    lo, hi = cfg.search
    for s in (x, y):
        if hi < s.dates[0] or lo > s.dates[-1]:
            raise UsageError(
                f"search interval {lo}..{hi} lies outside the date range of {s.label}"
            )
    result = analysis.peak_align(
        x,
        y,
        cfg.search,
        analysis.WindowSpec(cfg.window, cfg.step),
        RecurrenceConfig(cfg.epsilon),
        n_surrogates=cfg.surrogates,
        alpha=cfg.alpha,
        seed=cfg.seed,
        workers=cfg.workers,
    )
    stage = _Stage(cfg.out)
    try:
        name = f"peak_{_safe_label(x.label)}__{_safe_label(y.label)}.csv"
        _write_lines(stage.path(name), _peak_lines(result))
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    return 0


def cmd_synth(args) -> int:
    out = pathlib.Path(args.out)
    n = args.n
    if n < 1:
        raise UsageError(f"--n must be at least 1, got {n}")
    lines = []
    if args.kind == "white-noise":
        values = synthetic.white_noise(n, args.seed)
        lines.append("date,close")
        for day, v in zip(synthetic.date_axis(n), values):
            lines.append(f"{day.isoformat()},{v!r}")
    else:
        params = synthetic.LorenzParams(
            sigma=args.sigma,
            rho=args.rho,
            beta=(8.0 / 3.0 if args.classic else args.beta),
            dt=args.dt,
            n=n,
            transient=args.transient,
        )
        trajectory = synthetic.lorenz(params)
        # close carries the x coordinate so the file round-trips through the
        # date,close reader; the extra columns keep the full state.
        lines.append("date,close,y,z")
        for day, state in zip(synthetic.date_axis(n), trajectory):
            lines.append(
                f"{day.isoformat()},{state[0]!r},{state[1]!r},{state[2]!r}"
            )
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_lines(out, lines)
    return 0


def _diagnose_one(stage: _Stage, label: str, values: np.ndarray, cfg, sweep: bool):
    safe = _safe_label(label)
    scaled = normalize(values).values
    matrix = recurrence_matrix(scaled, RecurrenceConfig(cfg.epsilon))
    profile = tau_recurrence_rate(matrix)
    write_pbm(matrix, stage.path(f"rp_{safe}.pbm"))
    _write_lines(
        stage.path(f"ptau_{safe}.csv"),
        ["tau,p"] + [f"{tau},{_fmt(p)}" for tau, p in enumerate(profile.p)],
    )
    max_lag = len(scaled) // 2
    acf = autocorrelation(scaled, max_lag)
    _write_lines(
        stage.path(f"acf_{safe}.csv"),
        ["lag,acf"] + [f"{lag},{_fmt(a)}" for lag, a in enumerate(acf)],
    )
    try:
        tau_c = str(autocorrelation_time(scaled))
    except NoDecorrelationError:
        tau_c = ""
    if sweep:
        max_distance = float(scaled.max() - scaled.min())
        profiles = []
        for pct in (1, 2, 3):
            m = recurrence_matrix(
                scaled, RecurrenceConfig(pct / 100.0 * max_distance)
            )
            profiles.append(tau_recurrence_rate(m).p)
        rows = ["tau,p_1pct,p_2pct,p_3pct"]
        for tau in range(len(profiles[0])):
            rows.append(
                f"{tau},{_fmt(profiles[0][tau])},{_fmt(profiles[1][tau])},{_fmt(profiles[2][tau])}"
            )
        _write_lines(stage.path(f"ptau_sweep_{safe}.csv"), rows)
    return label, len(values), tau_c, matrix.recurrence_rate()


def cmd_diagnose(args) -> int:
    cfg = _resolve_config(args)
    if not cfg.inputs:
        raise UsageError("diagnose needs at least 1 input CSV file")
    series = [read_series(p) for p in cfg.inputs]
    stage = _Stage(cfg.out)
    try:
        summary = ["label,n,tau_c,recurrence_rate"]
        for s in series:
            label, n, tau_c, rate = _diagnose_one(
                stage, s.label, s.values, cfg, args.epsilon_sweep
            )
            summary.append(f"{label},{n},{tau_c},{_fmt(rate)}")
        _write_lines(stage.path("summary.csv"), summary)
        if len(series) >= 2:
            aligned = align(series)
            rows = ["label_a,label_b,mi"]
            for i in range(len(aligned.series)):
                for j in range(i + 1, len(aligned.series)):
                    mi = mutual_information(
                        aligned.series[i].values, aligned.series[j].values
                    )
                    rows.append(
                        f"{aligned.series[i].label},{aligned.series[j].label},{_fmt(mi)}"
                    )
            _write_lines(stage.path("mi.csv"), rows)
        stage.commit()
    except BaseException:
        stage.discard()
        raise
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, with_inputs: bool = True):
    if with_inputs:
        parser.add_argument("inputs", nargs="*", help="input CSV files (date,close)")
    parser.add_argument("--config", help="TOML config file supplying defaults")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--window", type=int, help="window size in time points")
    parser.add_argument("--step", type=int, help="window step in time points")
    parser.add_argument("--epsilon", type=float, help="recurrence threshold (normalized units)")
    parser.add_argument("--surrogates", type=int, help="surrogates per significance test")
    parser.add_argument("--alpha", type=float, help="significance level")
    parser.add_argument("--strong", type=float, help="|CPR| threshold for strong connectivity")
    parser.add_argument("--moderate", type=float, help="|CPR| threshold for moderate connectivity")
    parser.add_argument("--seed", type=int, help="RNG seed (unsigned integer)")
    parser.add_argument("--workers", type=int, help="parallel worker count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recurconnect",
        description=(
            "Windowed connectivity between dated scalar series from "
            "recurrence-profile correlation, with twin-surrogate significance tests."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_trends = sub.add_parser("trends", help="pairwise windowed CPR/rho trends and bin counts")
    _add_common(p_trends)
    p_trends.set_defaults(func=cmd_trends)

    p_peak = sub.add_parser("peak", help="peak-aligned windowed comparison of two series")
    _add_common(p_peak)
    p_peak.add_argument(
        "--search",
        help="peak search interval, ISO dates as START:END (default 1999-01-01:2001-12-31)",
    )
    p_peak.set_defaults(func=cmd_peak)

    p_synth = sub.add_parser("synth", help="write a synthetic series as CSV")
    p_synth.add_argument("kind", choices=["white-noise", "lorenz"])
    p_synth.add_argument("--out", required=True, help="output CSV path")
    p_synth.add_argument("--n", type=int, default=2000, help="number of samples")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--dt", type=float, default=0.01, help="integration step (lorenz)")
    p_synth.add_argument("--sigma", type=float, default=10.0)
    p_synth.add_argument("--rho", type=float, default=28.0)
    p_synth.add_argument("--beta", type=float, default=10.0 / 3.0)
    p_synth.add_argument("--transient", type=int, default=1000)
    p_synth.add_argument(
        "--classic", action="store_true", help="use the textbook beta = 8/3"
    )
    p_synth.set_defaults(func=cmd_synth)

    p_diag = sub.add_parser(
        "diagnose", help="recurrence plot, p(tau), ACF, and mutual-information reports"
    )
    _add_common(p_diag)
    p_diag.add_argument(
        "--epsilon-sweep",
        action="store_true",
        help="also write p(tau) at thresholds of 1%%, 2%%, 3%% of the maximum distance",
    )
    p_diag.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RecurConnectError, ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
