"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 malformed input, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import coherent as coh
from . import thermal as th
from .errors import DomainError, ModelError, NumericalError, TfdcsError
from .model import DEFAULT_N_MAX, DEFAULT_TAIL_TOL, DeformedModel, Truncation, auto_raise
from .verify import REFERENCE_BATTERY, SUITES, run_suites, thread_count

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3


class ConfigError(TfdcsError, ValueError):
    """Malformed command-line configuration."""


def fmt(v: Any) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def parse_beta(text: str, geometric: bool) -> list[float]:
    """``v`` or ``start:stop:count`` (linear, or geometric with the flag)."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --beta {text!r}") from exc
    if len(vals) == 1:
        grid = vals
    elif len(vals) == 3:
        start, stop, count = vals
        if count != int(count) or count < 2:
            raise ConfigError("beta range count must be an integer >= 2")
        if not start < stop:
            raise ConfigError("beta range needs start < stop")
        if geometric:
            if start <= 0:
                raise ConfigError("geometric beta range needs start > 0")
            grid = [float(v) for v in np.geomspace(start, stop, int(count))]
        else:
            grid = [float(v) for v in np.linspace(start, stop, int(count))]
    else:
        raise ConfigError(f"--beta must be 'v' or 'start:stop:count', got {text!r}")
    for b in grid:
        if not (math.isfinite(b) and b > 0):
            raise ConfigError(f"beta values must be finite and > 0, got {b!r}")
    return grid


def load_model(path: str | None) -> DeformedModel:
    if path is None:
        raise ConfigError("--model is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from exc
    return DeformedModel.from_json(text)


def truncation_from(args) -> Truncation:
    try:
        return Truncation(args.n_max, args.tail_tol)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def write_table(header: list[str], rows: list[list[Any]], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def dump_json(doc: Any, out) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _open_out(args):
    if args.out in (None, "-"):
        return None
    return open(args.out, "w", newline="", encoding="utf-8")


def _emit(args, header: list[str], rows: list[list[Any]], extra: dict[str, Any] | None = None) -> None:
    fh = _open_out(args)
    out = fh or sys.stdout
    try:
        if args.format == "json":
            doc: dict[str, Any] = {"schema_version": 1, "columns": header, "rows": rows}
            if extra:
                doc.update(extra)
            dump_json(doc, out)
        else:
            write_table(header, rows, out)
    finally:
        if fh:
            fh.close()


# quantity name -> (is_vector, evaluator(model, beta, trunc))
def _scalar(fn: Callable[[DeformedModel, float, Truncation], float]):
    return False, fn


QUANTITIES: dict[str, tuple[bool, Callable]] = {
    "partition": _scalar(th.partition),
    "theta": _scalar(lambda m, b, t: th.theta_of_beta(m, b)),
    "internal-energy": _scalar(th.internal_energy),
    "free-energy": _scalar(th.free_energy),
    "nT": _scalar(lambda m, b, t: th.bose_einstein(m, b)),
    "vacuum-expect": _scalar(th.vacuum_expect_num),
    "thermal-expect": _scalar(lambda m, b, t: th.thermal_expect_ApAm(m, b, t)),
    "thermal-vacuum": (True, lambda m, b, t: th.thermal_vacuum(m, b, t).coeffs),
}


def _auto(fn: Callable[[Truncation], Any], trunc: Truncation) -> Any:
    return auto_raise(fn, trunc)


def _trim(vec: np.ndarray) -> np.ndarray:
    nz = np.nonzero(vec)[0]
    return vec[: (int(nz[-1]) + 1 if nz.size else 1)]


def cmd_eval(args) -> int:
    model = load_model(args.model)
    trunc = truncation_from(args)
    if args.quantity not in QUANTITIES:
        raise ConfigError(f"unknown quantity {args.quantity!r}; choose from {', '.join(QUANTITIES)}")
    is_vec, fn = QUANTITIES[args.quantity]
    betas = parse_beta(args.beta, args.geometric)
    rows: list[list[Any]] = []
    for b in betas:
        val = _auto(lambda t: fn(model, b, t), trunc)
        if is_vec:
            rows.extend([b, n, float(v)] for n, v in enumerate(_trim(np.asarray(val))))
        else:
            rows.append([b, float(val)])
    header = ["beta", "n", args.quantity] if is_vec else ["beta", args.quantity]
    _emit(args, header, rows)
    return EXIT_OK


def cmd_cs(args) -> int:
    model = load_model(args.model)
    trunc = truncation_from(args)
    betas = parse_beta(args.beta, False)
    if len(betas) != 1:
        raise ConfigError("cs takes a single beta value")
    try:
        kind = coh.Kind(args.kind)
    except ValueError as exc:
        raise ConfigError(f"unknown kind {args.kind!r}") from exc
    z = complex(args.z_re, args.z_im)
    st = _auto(lambda t: coh.cs_build(model, kind, z, betas[0], t), trunc)
    c = _trim(st.coeffs)
    rows = [[n, float(v.real), float(v.imag), float(abs(v) ** 2)] for n, v in enumerate(c)]
    if args.format == "json":
        _emit(args, ["n", "re", "im", "abs2"], rows,
              {"norm_log": st.norm_log, "tail_weight": st.tail_weight, "n_max": st.n_max})
    else:
        _emit(args, ["n", "re", "im", "abs2", "norm_log", "tail_weight"],
              [r + [st.norm_log, st.tail_weight] for r in rows])
    return EXIT_OK


def _threads() -> int:
    try:
        return thread_count()
    except ValueError as exc:
        raise ConfigError(f"TFDCS_THREADS: {exc}") from exc


def cmd_scan(args) -> int:
    model = load_model(args.model)
    trunc = truncation_from(args)
    names = [q.strip() for q in args.quantity.split(",") if q.strip()]
    for q in names:
        if q not in QUANTITIES or QUANTITIES[q][0]:
            raise ConfigError(f"scan needs scalar quantities; got {q!r}")
    betas = parse_beta(args.beta, args.geometric)
    if len(betas) < 2:
        raise ConfigError("scan needs a beta range start:stop:count")

    def row(b: float) -> list[Any]:
        vals: list[Any] = []
        err = ""
        for q in names:
            try:
                vals.append(float(_auto(lambda t: QUANTITIES[q][1](model, b, t), trunc)))
            except NumericalError as exc:
                vals.append("")
                err = err or type(exc).__name__
        return [b, *vals, err]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(row, betas))
    _emit(args, ["beta", *names, "error"], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    battery = REFERENCE_BATTERY if args.model is None else {Path(args.model).stem: load_model(args.model)}
    _threads()
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be > 0")
    suites = [s.strip() for s in args.suite.split(",")]
    for s in suites:
        if s != "all" and s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}")
    betas = parse_beta(args.beta, args.geometric) if args.beta else None
    kwargs = {"betas": betas} if betas else {}
    report = run_suites(suites, battery, trunc=truncation_from(args), tol_override=args.tol, **kwargs)
    fh = _open_out(args)
    try:
        dump_json(report.to_dict(timings=args.timings), fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    s = report.to_dict()["summary"]
    print(f"verify: {s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped", file=sys.stderr)
    return EXIT_OK if report.overall_pass else EXIT_VERIFY_FAILED


def cmd_qubit(args) -> int:
    betas = parse_beta(args.beta, args.geometric)
    rows = []
    for b in betas:
        c0, c1 = th.thermal_qubit(args.e0, args.e1, b)
        rows.append([b, c0, c1, c0 * c0, c1 * c1])
    _emit(args, ["beta", "c0", "c1", "c0sq", "c1sq"], rows)
    return EXIT_OK


def cmd_model_print(args) -> int:
    model = load_model(args.model)
    fh = _open_out(args)
    (fh or sys.stdout).write(model.to_json())
    if fh:
        fh.close()
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tfdcs", description="Deformed-boson thermofield dynamics toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, beta_required=True):
        sp.add_argument("--model", help="model JSON file")
        sp.add_argument("--beta", required=beta_required, help="v or start:stop:count")
        sp.add_argument("--geometric", action="store_true", help="geometric beta grid")
        sp.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
        sp.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("eval", help="evaluate a thermal quantity")
    common(sp)
    sp.add_argument("--quantity", required=True, help=", ".join(QUANTITIES))
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("cs", help="thermal coherent-state coefficients")
    common(sp)
    sp.add_argument("--kind", choices=("bg", "kp"), default="bg")
    sp.add_argument("--z-re", type=float, default=0.0)
    sp.add_argument("--z-im", type=float, default=0.0)
    sp.set_defaults(func=cmd_cs)

    sp = sub.add_parser("scan", help="sweep scalar quantities over a beta grid")
    common(sp)
    sp.add_argument("--quantity", default="partition,internal-energy,free-energy",
                    help="comma-separated scalar quantities")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run verification suites")
    common(sp, beta_required=False)
    sp.add_argument("--suite", default="all", help=f"{', '.join(SUITES)} or all")
    sp.add_argument("--tol", type=float, help="override every check tolerance")
    sp.add_argument("--timings", action="store_true", help="include per-check runtimes (not byte-stable)")
    sp.set_defaults(func=cmd_verify, format="json")

    sp = sub.add_parser("qubit", help="two-level thermal vacuum amplitudes")
    sp.add_argument("--e0", type=float, required=True)
    sp.add_argument("--e1", type=float, required=True)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--geometric", action="store_true")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_qubit)

    sp = sub.add_parser("model", help="model file utilities")
    msub = sp.add_subparsers(dest="model_command", required=True, parser_class=_Parser)
    mp = msub.add_parser("print", help="echo a normalised model file")
    mp.add_argument("--model", required=True)
    mp.add_argument("--out")
    mp.set_defaults(func=cmd_model_print)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ModelError, DomainError) as exc:
        print(f"tfdcs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"tfdcs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
