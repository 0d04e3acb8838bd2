"""Command-line interface: sweeps, figure datasets, bounds and self-checks.

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 solver non-convergence, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import schemes
from .bounds import sphere_packing
from .circuits import Layout, build_v, circuit_unitary, measurement_povm, v_gate_circuit
from .discrimination import NotConverged, optimal_multi
from .errors import AdcLabError
from .matcore import fidelity, ket, projector

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_IO = 0, 1, 2, 3, 4
CSV_HEADER = ("gamma", "scheme", "uses", "message_bits", "success_probability", "gain_vs_classical",
              "params_json")
SIG_DIGITS = 12
ONEBIT_SCHEMES = ("classical", "coherent", "quantum", "circuit")
TWOBIT_SCHEMES = ("classical", "coherent", "quantum")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    gamma_start: float = 0.0
    gamma_end: float = 1.0
    gamma_step: float = 0.005
    schemes: tuple[str, ...] = ("classical", "coherent", "quantum")
    uses: int = 1
    message_bits: int = 1
    tol: float = 1e-7
    seed: int = 0
    output_format: str = "csv"
    output_path: str | None = None
    threads: int = 1

    def __post_init__(self):
        if not (0.0 <= self.gamma_start < self.gamma_end <= 1.0):
            raise ConfigError("need 0 <= gamma-start < gamma-end <= 1")
        if not self.gamma_step > 0:
            raise ConfigError("gamma-step must be positive")
        if not self.schemes:
            raise ConfigError("no schemes selected")
        if self.message_bits not in (1, 2):
            raise ConfigError("message-bits must be 1 or 2")
        allowed = ONEBIT_SCHEMES if self.message_bits == 1 else TWOBIT_SCHEMES
        unknown = [s for s in self.schemes if s not in allowed]
        if unknown:
            raise ConfigError(f"unknown scheme(s) {unknown} for {self.message_bits}-bit messages; "
                              f"choose from {list(allowed)}")
        if self.message_bits == 1:
            if self.uses not in schemes.ONEBIT_USES:
                raise ConfigError(f"uses must be one of {schemes.ONEBIT_USES}")
            if "circuit" in self.schemes and self.uses != 2:
                raise ConfigError("the circuit decoder is defined for uses = 2")
        elif self.uses != schemes.TWOBIT_LENGTH:
            raise ConfigError(f"two-bit messages use {schemes.TWOBIT_LENGTH} channel uses")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")

    @property
    def gammas(self) -> list[float]:
        return gamma_grid(self.gamma_start, self.gamma_end, self.gamma_step)


def gamma_grid(start: float, end: float, step: float) -> list[float]:
    """Inclusive grid, rounded so that repeated runs give identical values."""
    count = int(math.floor((end - start) / step + 1e-9))
    grid = [round(start + k * step, 12) for k in range(count + 1)]
    if end - grid[-1] > 1e-9:
        grid.append(round(end, 12))
    return grid


# ---------------------------------------------------------------------------
# serialization


def fmt_number(x) -> str:
    """12 significant digits, shortest round-trip form of the rounded value."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(f"{float(x):.{SIG_DIGITS}g}")
    if v == 0.0:
        v = 0.0  # drop the sign of -0.0
    return repr(v)


def _round_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    v = float(f"{float(x):.{SIG_DIGITS}g}")
    return 0.0 if v == 0.0 else v


def _params_json(record: schemes.SweepRecord) -> str:
    params = {k: _round_value(v) for k, v in record.params.items()}
    if not record.converged:
        params["converged"] = False
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


def _row(record: schemes.SweepRecord) -> list[str]:
    return [fmt_number(record.gamma), record.scheme, str(record.uses), str(record.message_bits),
            fmt_number(record.success_probability), fmt_number(record.gain_vs_classical),
            _params_json(record)]


def records_to_csv(records: Sequence[schemes.SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(_row(r))
    return buf.getvalue()


def records_to_json(records: Sequence[schemes.SweepRecord]) -> str:
    rows = []
    for r in records:
        row = {
            "gamma": _round_value(r.gamma),
            "scheme": r.scheme,
            "uses": r.uses,
            "message_bits": r.message_bits,
            "success_probability": _round_value(r.success_probability),
            "gain_vs_classical": _round_value(r.gain_vs_classical),
            "params": json.loads(_params_json(r)),
        }
        rows.append(row)
    return json.dumps(rows, indent=1, sort_keys=True) + "\n"


def _write(path: str | Path | None, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(task: tuple[str, float, int, int, float]) -> schemes.SweepRecord:
    """One (scheme, gamma) point; module level so worker processes can pickle it."""
    name, gamma, uses, bits, tol = task
    if bits == 1:
        if name == "classical":
            return schemes.classical_onebit(gamma, uses)
        if name == "coherent":
            return schemes.coherent_onebit(gamma, uses)
        if name == "quantum":
            return schemes.quantum_onebit(gamma, uses)
        if name == "circuit":
            return schemes.circuit_decoder_onebit(gamma)
    else:
        if name == "classical":
            return schemes.classical_twobit(gamma)[0]
        if name == "coherent":
            return schemes.coherent_twobit(gamma)
        if name == "quantum":
            return schemes.quantum_twobit(gamma, tol=tol)
    raise ConfigError(f"unknown scheme {name!r}")


def run_parallel(fn: Callable, tasks: Sequence, threads: int) -> list:
    """Map ``fn`` over ``tasks``; the result order always follows ``tasks``."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def sweep_records(config: RunConfig) -> list[schemes.SweepRecord]:
    tasks = [(s, g, config.uses, config.message_bits, config.tol)
             for g in config.gammas for s in sorted(set(config.schemes))]
    records = run_parallel(evaluate, tasks, config.threads)
    return sorted(records, key=lambda r: (r.gamma, r.scheme))


def cmd_sweep(config: RunConfig) -> int:
    records = sweep_records(config)
    text = records_to_csv(records) if config.output_format == "csv" else records_to_json(records)
    try:
        _write(config.output_path, text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not all(r.converged for r in records):
        print("error: solver did not reach the requested tolerance at every point", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# figures

FIG1_PANELS = {1: ("d", "h"), 2: ("e", "i"), 4: ("f", "j"), 8: ("g", "k")}


def figure_datasets(which: str, config: RunConfig) -> dict[str, list[schemes.SweepRecord]]:
    """Panel name -> records for one figure."""
    gammas = config.gammas
    out: dict[str, list[schemes.SweepRecord]] = {}

    def sweep(names, uses, bits):
        tasks = [(s, g, uses, bits, config.tol) for g in gammas for s in names]
        return sorted(run_parallel(evaluate, tasks, config.threads), key=lambda r: (r.gamma, r.scheme))

    if which == "FIG1":
        for m, (success_panel, gain_panel) in FIG1_PANELS.items():
            recs = sweep(("classical", "coherent", "quantum"), m, 1)
            out[f"fig1_{success_panel}"] = recs
            out[f"fig1_{gain_panel}"] = [r for r in recs if r.scheme != "classical"]
    elif which == "FIG2":
        recs = sweep(("classical", "coherent", "quantum", "circuit"), 2, 1)
        out["fig2_success"] = recs
        out["fig2_gain"] = [r for r in recs if r.scheme != "classical"]
    elif which == "FIG3":
        recs = sweep(("classical", "coherent", "quantum"), schemes.TWOBIT_LENGTH, 2)
        out["fig3_success"] = recs
        out["fig3_gain"] = [r for r in recs if r.scheme != "classical_twobit"]
    elif which == "APP4":
        for mode, layouts in ((schemes.Mode.PER_GAMMA, (Layout.DECODER_ONLY, Layout.ENCODER_AND_DECODER)),
                              (schemes.Mode.FIXED_AVERAGE, (Layout.ENCODER_ONLY_CNOT, Layout.DECODER_ONLY_CNOT))):
            recs = []
            for layout in layouts:
                recs += schemes.ansatz_compare(gammas, layout, mode, seed=config.seed).records
            out[f"app4_{mode.value}"] = sorted(recs, key=lambda r: (r.gamma, r.scheme))
    else:
        raise ConfigError(f"unknown figure {which!r}")
    return out


def svg_chart(records: Sequence[schemes.SweepRecord], value: str, title: str) -> str:
    """Minimal line chart: one polyline per scheme over gamma."""
    width, height, pad = 480, 320, 40
    series: dict[str, list[tuple[float, float]]] = {}
    for r in records:
        series.setdefault(r.scheme, []).append((r.gamma, getattr(r, value)))
    ys = [y for pts in series.values() for _, y in pts] or [0.0]
    lo, hi = min(ys), max(ys)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")

    def xy(g, y):
        return (pad + g * (width - 2 * pad), height - pad - (y - lo) / (hi - lo) * (height - 2 * pad))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{width / 2}" y="20" text-anchor="middle">{title}</text>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle">gamma</text>',
             f'<text x="4" y="{pad}">{fmt_number(hi)}</text>',
             f'<text x="4" y="{height - pad}">{fmt_number(lo)}</text>']
    for i, (name, pts) in enumerate(sorted(series.items())):
        color = colors[i % len(colors)]
        coords = " ".join("{:.2f},{:.2f}".format(*xy(g, y)) for g, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" points="{coords}"/>')
        parts.append(f'<text x="{width - pad - 150}" y="{pad + 14 * i}" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_figure(which: str, out_dir: str, config: RunConfig, svg: bool = False) -> int:
    datasets = figure_datasets(which, config)
    try:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        for name, recs in datasets.items():
            _write(Path(out_dir) / f"{name}.csv", records_to_csv(recs))
            if svg:
                value = "gain_vs_classical" if ("gain" in name or name in ("fig1_h", "fig1_i", "fig1_j", "fig1_k")) \
                    else "success_probability"
                _write(Path(out_dir) / f"{name}.svg", svg_chart(recs, value, name))
    except OSError as exc:
        print(f"error: cannot write figure data: {exc}", file=sys.stderr)
        return EXIT_IO
    if not all(r.converged for recs in datasets.values() for r in recs):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# bound


def bound_csv(n: int, messages: int, deltas: Sequence[float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("delta", "L", "lambda", "epsilon_lower"))
    for d in deltas:
        res = sphere_packing(n, messages, d)
        writer.writerow((fmt_number(d), res.big_l, fmt_number(res.lam), fmt_number(res.epsilon_lower)))
    return buf.getvalue()


def cmd_bound(n: int, messages: int, deltas: Sequence[float], out: str | None) -> int:
    text = bound_csv(n, messages, deltas)
    try:
        _write(out, text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification


def verify_v_circuit(tol: float = 1e-10) -> tuple[bool, list[str]]:
    v = build_v()
    s = np.sqrt(0.5)
    v0 = s * ket("00") + 0.5 * (ket("01") + ket("10"))
    v1 = s * ket("11") + 0.5 * (ket("01") - ket("10"))
    zz = np.diag([1, -1, -1, 1])
    targets = (("v0", v0, "00"), ("v1", v1, "01"), ("ZZ v0", zz @ v0, "11"), ("ZZ v1", zz @ v1, "10"))
    lines, ok = [], True
    for name, vec, label in targets:
        infidelity = 1.0 - fidelity(v @ vec, ket(label))
        passed = infidelity <= tol
        ok &= passed
        lines.append(f"V |{name}> -> |{label}>: infidelity {infidelity:.3e} {'ok' if passed else 'FAIL'}")
    povm = measurement_povm(v, 0)
    err = povm.completeness_error()
    ok &= err <= tol
    lines.append(f"POVM completeness error {err:.3e} {'ok' if err <= tol else 'FAIL'}")
    m0 = projector(v0) + projector(v1)
    gate_povm = measurement_povm(circuit_unitary(v_gate_circuit()), 0)
    diff = float(np.max(np.abs(gate_povm.elements[0] - m0)))
    ok &= diff <= tol
    lines.append(f"gate-level decoder M0 max deviation {diff:.3e} {'ok' if diff <= tol else 'FAIL'}")
    return ok, lines


def verify_povm_cert(step: float = 0.05, tol: float = 1e-7) -> tuple[bool, list[str]]:
    worst, lines = 0.0, []
    subset = schemes.TWOBIT_SUBSETS.index((0, 3, 5, 6))
    for g in gamma_grid(0.0, 1.0, step):
        for theta in (np.pi / 4, np.pi / 2):
            try:
                gap = optimal_multi(schemes.twobit_code_states(g, theta, subset), tol=tol).dual_gap
            except NotConverged as exc:
                gap = exc.result.dual_gap
            worst = max(worst, gap)
    ok = worst <= tol
    lines.append(f"max YKL gap over two-bit code states {worst:.3e} {'ok' if ok else 'FAIL'}")
    return ok, lines


def verify_classical_opt(step: float = 0.05) -> tuple[bool, list[str]]:
    failures = [(g, m) for g in gamma_grid(0.0, 1.0, step) for m in (1, 2, 3, 4)
                if not schemes.verify_classical_optimality(g, m)]
    lines = [f"repetition code optimal at all grid points for m <= 4: {'ok' if not failures else 'FAIL'}"]
    for g, m in failures:
        best, pair = schemes.best_two_codeword_success(g, m)
        lines.append(f"  gamma={g} m={m}: codewords {pair} reach {best:.12g} > {schemes.classical_success(g, m):.12g}")
    return not failures, lines


VERIFIERS = {"V_CIRCUIT": verify_v_circuit, "POVM_CERT": verify_povm_cert, "CLASSICAL_OPT": verify_classical_opt}


def cmd_verify(which: str) -> int:
    ok, lines = VERIFIERS[which]()
    print(f"{which}: {'PASS' if ok else 'FAIL'}")
    for line in lines:
        print("  " + line)
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing


def default_threads() -> int:
    env = os.environ.get("ADCLAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"ADCLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-start", type=float, default=0.0)
    p.add_argument("--gamma-end", type=float, default=1.0)
    p.add_argument("--gamma-step", type=float, default=0.005)
    p.add_argument("--tol", type=float, default=1e-7, help="YKL certificate tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for optimizer restarts")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $ADCLAB_THREADS, else all CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate schemes over a gamma grid")
    _add_run_options(p)
    p.add_argument("--schemes", default="classical,coherent,quantum",
                   help="comma separated subset of classical,coherent,quantum,circuit")
    p.add_argument("--uses", type=int, default=1)
    p.add_argument("--message-bits", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("figure", help="write the per-panel datasets of a figure")
    p.add_argument("which", choices=("FIG1", "FIG2", "FIG3", "APP4"))
    _add_run_options(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG chart per panel")

    p = sub.add_parser("bound", help="sphere-packing lower bound on the failure probability")
    p.add_argument("--n", type=int, default=2, help="block length")
    p.add_argument("--messages", type=int, default=2)
    p.add_argument("--delta-start", type=float, default=0.0)
    p.add_argument("--delta-end", type=float, default=0.5)
    p.add_argument("--delta-step", type=float, default=0.1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run a self-check")
    p.add_argument("which", choices=tuple(VERIFIERS))
    return parser


def _run_config(args, **overrides) -> RunConfig:
    threads = args.threads if args.threads is not None else default_threads()
    fields = dict(gamma_start=args.gamma_start, gamma_end=args.gamma_end, gamma_step=args.gamma_step,
                  tol=args.tol, seed=args.seed, threads=threads)
    fields.update(overrides)
    return RunConfig(**fields)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "sweep":
            names = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
            config = _run_config(args, schemes=names, uses=args.uses, message_bits=args.message_bits,
                                 output_format=args.format, output_path=args.out)
            return cmd_sweep(config)
        if args.command == "figure":
            return cmd_figure(args.which, args.out, _run_config(args), svg=args.svg)
        if args.command == "bound":
            if not args.delta_step > 0:
                raise ConfigError("delta-step must be positive")
            deltas = gamma_grid(args.delta_start, args.delta_end, args.delta_step) \
                if args.delta_start < args.delta_end else [args.delta_start]
            return cmd_bound(args.n, args.messages, deltas, args.out)
        return cmd_verify(args.which)
    except (ConfigError, AdcLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
