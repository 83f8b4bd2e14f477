"""Command-line driver: fidelity tables for N depolarizing channels in a switch.

Examples
--------
::

    qswitch sweep --mode analytic
    qswitch sweep --mode sampled --seed 7 --format json --out fig3.json
    qswitch run --n 4 --inputs R --mode exact
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .channels import DensityMatrix, depolarizing_channel, named_ket
from .exceptions import QSwitchError, ValidationError
from .experiment import (
    DEFAULT_RATE,
    DEFAULT_SECONDS,
    accumulate_configs,
    enumerate_configs,
    run_sampled,
    uhlmann_fidelity,
)
from .switch import (
    ORDER_KINDS,
    SwitchSpec,
    cyclic_orders,
    effective_channel_prediction,
    fixed_order,
    full_orders,
    success_probability,
)

SEED_ENV = "QSWITCH_SEED"
MODES = ("analytic", "exact", "sampled")
FORMATS = ("csv", "json")
HEADER = ("n", "input", "mode", "fidelity", "fidelity_std", "success_prob", "configs", "seed")
DEFAULT_INPUTS = ("D", "A", "R", "L")

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class UsageError(ValidationError):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class RunConfig:
    n: tuple[int, ...] = (1, 2, 3, 4)
    d: int = 2
    order_kind: str = "cyclic"
    inputs: tuple[str, ...] = DEFAULT_INPUTS
    mode: str = "analytic"
    rate: float = DEFAULT_RATE
    seconds: float = DEFAULT_SECONDS
    mc_trials: int = 1000
    seed: int = 0
    output_format: str = "csv"

    def __post_init__(self):
        n = (self.n,) if isinstance(self.n, int) else tuple(int(x) for x in self.n)
        object.__setattr__(self, "n", n)
        inputs = (self.inputs,) if isinstance(self.inputs, str) else tuple(self.inputs)
        object.__setattr__(self, "inputs", tuple(_input_label(x) for x in inputs))
        if not n or any(not 1 <= x <= 4 for x in n):
            raise UsageError(f"n must be in 1..4, got {n}")
        if self.d < 2:
            raise UsageError(f"d must be at least 2, got {self.d}")
        if self.order_kind not in ORDER_KINDS:
            raise UsageError(f"orders must be one of {ORDER_KINDS}, got {self.order_kind!r}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}, got {self.output_format!r}")
        if not self.inputs:
            raise UsageError("at least one input state is required")
        if self.rate <= 0 or self.seconds <= 0:
            raise UsageError("rate and seconds must be positive")
        if self.mc_trials < 2:
            raise UsageError("at least two Monte Carlo trials are required")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.mode == "analytic" and self.order_kind != "cyclic":
            raise UsageError("analytic mode only covers cyclic orders; use --mode exact")
        if self.mode == "sampled" and self.d != 2:
            raise UsageError("sampled mode uses six-state qubit tomography and needs d = 2")
        for label in self.inputs:
            _input_state(label, self.d)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ResultRow:
    n: int
    input: str
    mode: str
    fidelity: float
    fidelity_std: float
    success_prob: float
    configs: int
    seed: int


def _input_label(x) -> str:
    if isinstance(x, str):
        return x
    return ",".join(repr(float(v)) for v in x)


def _input_state(label: str, d: int) -> DensityMatrix:
    """Named state (0, 1, D, A, R, L) or a Bloch vector written ``x,y,z``."""
    if "," in label:
        if d != 2:
            raise UsageError("Bloch-vector inputs are only meaningful for d = 2")
        try:
            r = [float(v) for v in label.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse Bloch vector {label!r}") from None
        if len(r) != 3 or np.linalg.norm(r) > 1 + 1e-12:
            raise UsageError(f"Bloch vector {label!r} must have three components and length <= 1")
        return DensityMatrix.from_bloch(r)
    try:
        return DensityMatrix.from_ket(named_ket(label, d))
    except ValidationError as exc:
        raise UsageError(str(exc)) from None


def _order_set(kind: str, n: int):
    return {"cyclic": cyclic_orders, "full": full_orders, "fixed": fixed_order}[kind](n)


def _row_seed(seed: int, n: int, input_index: int) -> int:
    return int(np.random.SeedSequence([seed, n, input_index]).generate_state(1, np.uint64)[0])


def _evaluate(cfg: RunConfig, n: int, input_index: int) -> ResultRow:
    label = cfg.inputs[input_index]
    rho = _input_state(label, cfg.d)
    orders = _order_set(cfg.order_kind, n)
    std = 0.0
    if cfg.mode == "analytic":
        out = effective_channel_prediction(n, cfg.d, rho)
        p = success_probability(SwitchSpec((depolarizing_channel(cfg.d),) * n, orders))
        fid, count = uhlmann_fidelity(rho, out), 0
    elif cfg.mode == "exact":
        configs = enumerate_configs(n, cfg.d)
        outcome = accumulate_configs(configs, orders, rho)
        if outcome.normalized is None:
            raise QSwitchError(f"post-selection never succeeds for n={n}")
        fid, p, count = uhlmann_fidelity(rho, outcome.normalized), outcome.probability, len(configs)
    else:
        res = run_sampled(rho, orders, cfg.rate, cfg.seconds, cfg.mc_trials, _row_seed(cfg.seed, n, input_index))
        fid, std, p = res.fidelity.mean, res.fidelity.stddev, res.success_probability
        count = len(res.dataset.configs)
    return ResultRow(n, label, cfg.mode, fid, std, p, count, cfg.seed)


def run(config: RunConfig, jobs: int = 1) -> list[ResultRow]:
    """One row per (n, input) in the order given by ``config``."""
    tasks = [(n, i) for n in config.n for i in range(len(config.inputs))]
    if jobs <= 1:
        return [_evaluate(config, n, i) for n, i in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda t: _evaluate(config, *t), tasks))


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render(rows: Sequence[ResultRow], output_format: str = "csv") -> str:
    if not rows:
        raise UsageError("no rows to emit")
    if output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        for r in rows:
            writer.writerow([r.n, r.input, r.mode, _fmt(r.fidelity), _fmt(r.fidelity_std), _fmt(r.success_prob), r.configs, r.seed])
        return buf.getvalue()
    if output_format == "json":
        records = []
        for r in rows:
            rec = asdict(r)
            for key in ("fidelity", "fidelity_std", "success_prob"):
                rec[key] = float(_fmt(rec[key]))
            records.append({k: rec[k] for k in HEADER})
        return json.dumps(records, indent=2) + "\n"
    raise UsageError(f"unknown output format {output_format!r}")


def emit(rows: Sequence[ResultRow], output_format: str = "csv", destination: str | Path | None = None) -> None:
    """Write rows as CSV or JSON to ``destination`` (standard output when ``None`` or ``"-"``)."""
    text = render(rows, output_format)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(destination).write_text(text, encoding="utf-8")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--d", type=int, help="target dimension (default 2)")
    common.add_argument("--orders", choices=ORDER_KINDS, help="order model (default cyclic)")
    common.add_argument("--mode", choices=MODES, help="analytic, exact or sampled (default analytic)")
    common.add_argument("--rate", type=float, help=f"coincidences per second (default {DEFAULT_RATE})")
    common.add_argument("--seconds", type=float, help=f"seconds per projector (default {DEFAULT_SECONDS})")
    common.add_argument("--trials", type=int, help="Monte Carlo trials (default 1000)")
    common.add_argument("--seed", type=int, help=f"base seed (default ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--out", help="output file (default standard output)")
    common.add_argument("--jobs", type=int, default=1, help="rows evaluated in parallel")

    parser = argparse.ArgumentParser(prog="qswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", parents=[common], help="evaluate selected channel counts and inputs")
    run_p.add_argument("--n", type=int, nargs="+", help="channel counts (default 1 2 3 4)")
    run_p.add_argument("--inputs", nargs="+", help="input states: 0 1 D A R L or Bloch vectors x,y,z (default D A R L)")
    sub.add_parser("sweep", parents=[common], help="full grid n = 1..4 for inputs D, A, R, L")
    return parser


_FLAG_FIELDS = {
    "n": "n",
    "d": "d",
    "orders": "order_kind",
    "inputs": "inputs",
    "mode": "mode",
    "rate": "rate",
    "seconds": "seconds",
    "trials": "mc_trials",
    "seed": "seed",
    "format": "output_format",
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {"seed": _default_seed()}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must contain a JSON object")
        data.update(loaded)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    cfg = RunConfig.from_mapping(data)
    if args.command == "sweep":
        cfg = replace(cfg, n=(1, 2, 3, 4), inputs=DEFAULT_INPUTS)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
    except (ValueError, TypeError) as exc:
        print(f"qswitch: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = run(cfg, args.jobs)
    except UsageError as exc:
        print(f"qswitch: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QSwitchError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"qswitch: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        emit(rows, cfg.output_format, args.out)
    except OSError as exc:
        print(f"qswitch: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
