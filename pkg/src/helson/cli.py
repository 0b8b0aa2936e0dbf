"""Command-line front end: ``python -m helson COMMAND [options]``.

Exit status 0 on success, 1 for bad input or configuration, 2 for numerical
failure (non-convergence, divergence, or an inconclusive or unstabilized
result under ``--strict``).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from helson.diagnostics import (
    gram_dual,
    halfline_window,
    helson_decay,
    window_multi,
)
from helson.errors import (
    ContractError,
    DivergenceError,
    DomainError,
    IndexOverflowError,
    IndexRangeError,
    NumericalError,
    UnsupportedInputError,
)
from helson.experiments import (
    CounterexampleConfig,
    counterexample_report,
    hankel_norm_study,
    mult_hilbert_study,
)
from helson.finiterank.forms import (
    HelsonFormSpec,
    boundedness_check,
    form_alpha,
    form_rank,
    symbol_eval,
    symbol_taylor,
)
from helson.index import factorize
from helson.matrix import build_helson, matrix_csv
from helson.moments import DiscreteMoments, HalfLineMoments, MomentSequence, point_from_json
from helson.spectral import eig_dense, norm_schedule
from helson.specio import dumps, fmt_float, load_json_arg, parse_spec, write_output

COMMANDS = ("alpha", "build", "spectrum", "diagnose", "rank", "symbol", "gram", "experiment")
EXPERIMENTS = ("mult-hilbert", "hankel-hilbert", "hankel-ramp", "counterexample")


class UserError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated options for one command."""

    command: str
    spec: object = None
    spec_text: str | None = None
    n: list[int] = field(default_factory=list)
    size: int | None = None
    sizes: list[int] = field(default_factory=list)
    offset: int | None = None
    degree_cap: int = 64
    grid: list[float] | None = None
    point: object = None
    out: str | None = None
    strict: bool = False
    experiment: str | None = None


def _int_list(text: str) -> list[int]:
    """``5``, ``1,2,3`` or an inclusive range ``2:100``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            a, b = part.split(":", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UserError(f"empty integer list {text!r}")
    return out


def _grid(text: str) -> list[float] | None:
    if text == "default":
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UserError(f"grid must be comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helson", description="Helson matrices: moments, spectra, diagnostics, finite-rank forms.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("experiment", nargs="?", help=f"experiment name: {', '.join(EXPERIMENTS)}")
    p.add_argument("--spec", help="closed:NAME, inline JSON, or a JSON file")
    p.add_argument("--n", help="index, list 1,2,3 or range 2:100 (experiment: number of factors)")
    p.add_argument("--size", type=int, help="upper index N of the truncation")
    p.add_argument("--sizes", help="ascending list of sizes")
    p.add_argument("--offset", type=int, choices=(1, 2))
    p.add_argument("--degree-cap", type=int, default=64)
    p.add_argument("--grid", help="comma-separated grid, or 'default'")
    p.add_argument("--point", help="point JSON for 'symbol', e.g. '{\"explicit\": [[1, 0.5]]}'")
    p.add_argument("--out", help="output file (written atomically); stdout otherwise")
    p.add_argument("--strict", action="store_true", help="inconclusive or unstabilized results exit with 2")
    return p


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command, out=args.out, strict=args.strict, degree_cap=args.degree_cap,
                    offset=args.offset, size=args.size, experiment=args.experiment)
    if args.command == "experiment":
        if args.experiment not in EXPERIMENTS:
            raise UserError(f"experiment must be one of {', '.join(EXPERIMENTS)}")
    elif args.experiment is not None:
        raise UserError(f"unexpected argument {args.experiment!r}")
    if args.command != "experiment":
        if not args.spec:
            raise UserError("--spec is required")
        cfg.spec_text = args.spec
        cfg.spec = parse_spec(args.spec)
    if args.n is not None:
        cfg.n = _int_list(args.n)
    if args.sizes is not None:
        cfg.sizes = _int_list(args.sizes)
    if args.grid is not None:
        cfg.grid = _grid(args.grid)
    if args.point is not None:
        cfg.point = point_from_json(load_json_arg(args.point))
    if cfg.degree_cap < 1:
        raise UserError("--degree-cap must be >= 1")
    needs_form = args.command in ("rank", "symbol")
    if needs_form and not isinstance(cfg.spec, HelsonFormSpec):
        raise UserError(f"'{args.command}' needs a form spec (an object with 'terms')")
    if args.command in ("alpha",) and not cfg.n:
        raise UserError("'alpha' needs --n")
    if args.command == "build" and cfg.size is None:
        raise UserError("'build' needs --size")
    if args.command == "spectrum" and cfg.size is None and not cfg.sizes:
        raise UserError("'spectrum' needs --size or --sizes")
    if args.command in ("build", "spectrum", "gram") and not isinstance(cfg.spec, MomentSequence):
        raise UserError(f"'{args.command}' needs a moment spec")
    if args.command == "gram" and not isinstance(cfg.spec, DiscreteMoments):
        raise UserError("'gram' needs a discrete measure")
    if args.command == "symbol" and not cfg.n and cfg.point is None:
        raise UserError("'symbol' needs --n (Taylor coefficient) or --point (value)")
    return cfg


# ---------------------------------------------------------------------------
# commands


def _value(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return fmt_float(v.real)
    return f"{fmt_float(v.real)},{fmt_float(v.imag)}"


def _offset(cfg: RunConfig) -> int:
    if cfg.offset is not None:
        return cfg.offset
    return 1 if cfg.spec.defined_at_one else 2


def cmd_alpha(cfg: RunConfig) -> tuple[str, int]:
    if isinstance(cfg.spec, HelsonFormSpec):
        vals = [form_alpha(cfg.spec, n) for n in cfg.n]
    else:
        vals = list(cfg.spec.alpha_many(np.array(cfg.n, dtype=np.uint64)))
    if len(cfg.n) == 1:
        return _value(vals[0]) + "\n", 0
    return "".join(f"{n},{_value(v)}\n" for n, v in zip(cfg.n, vals)), 0


def cmd_build(cfg: RunConfig) -> tuple[str, int]:
    return matrix_csv(build_helson(cfg.spec, cfg.size, _offset(cfg)).A), 0


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    if cfg.sizes:
        sched = norm_schedule(cfg.spec, cfg.sizes, offset=_offset(cfg), extrapolate=len(cfg.sizes) >= 2)
        return dumps({"spec": cfg.spec.to_json(), "offset": _offset(cfg), **sched.to_json()}), 0
    A = build_helson(cfg.spec, cfg.size, _offset(cfg)).A
    return eig_dense(A, vectors=False).to_csv(), 0


def cmd_diagnose(cfg: RunConfig) -> tuple[str, int]:
    spec = cfg.spec
    if isinstance(spec, HelsonFormSpec):
        b = boundedness_check(spec)
        out = {"spec": spec.to_json(), **b.to_json()}
        code = 2 if cfg.strict and not b.consistent else 0
        return dumps(out), code
    if isinstance(spec, DiscreteMoments):
        rep = window_multi(spec.measure, cfg.grid)
    elif isinstance(spec, HalfLineMoments):
        rep = halfline_window(spec.density, cfg.grid)
    else:
        N = max(cfg.n) if cfg.n else 2**512
        rep = helson_decay(spec, N=N)
    out = {"spec": spec.to_json(), **rep.to_json(), "levels": [[a, b] for a, b in rep.levels]}
    code = 2 if cfg.strict and rep.verdict == "inconclusive" else 0
    return dumps(out), code


def cmd_rank(cfg: RunConfig) -> tuple[str, int]:
    r = form_rank(cfg.spec, cfg.degree_cap)
    if cfg.out is not None:
        text = dumps({"spec": cfg.spec.to_json(), **r.to_json()})
    else:
        text = f"{r.rank}\n"
    if not r.stabilized:
        sys.stderr.write(f"warning: rank {r.rank} did not stabilize (caps {r.caps}, ranks {r.ranks})\n")
        return text, 2 if cfg.strict else 0
    return text, 0


def cmd_symbol(cfg: RunConfig) -> tuple[str, int]:
    lines = []
    if cfg.point is not None:
        lines.append(_value(symbol_eval(cfg.spec, cfg.point)))
    for n in cfg.n:
        v = symbol_taylor(cfg.spec, factorize(n))
        lines.append(f"{n},{_value(v)}" if len(cfg.n) > 1 else _value(v))
    return "\n".join(lines) + "\n", 0


def cmd_gram(cfg: RunConfig) -> tuple[str, int]:
    g = gram_dual(cfg.spec.measure)
    out = {"spec": cfg.spec.to_json(), "gram": g.G, "eigenvalues": g.eigenvalues,
           "residuals": g.spectrum.residuals}
    return dumps(out), 0


def cmd_experiment(cfg: RunConfig) -> tuple[str, int]:
    name = cfg.experiment
    if name == "mult-hilbert":
        rep = mult_hilbert_study(cfg.sizes or [2, 64, 256, 1024], strict=False)
    elif name in ("hankel-hilbert", "hankel-ramp"):
        rep = hankel_norm_study(name.split("-", 1)[1], cfg.sizes or [16, 64, 256, 1024, 4096])
    else:
        kw = {}
        if cfg.n:
            kw["N"] = cfg.n[0]
        if cfg.sizes:
            kw["sizes"] = tuple(cfg.sizes)
        if cfg.grid is not None:
            kw["s_grid"] = cfg.grid
        rep = counterexample_report(CounterexampleConfig(**kw))
    code = 2 if cfg.strict and not all(rep["checks"].values()) else 0
    return dumps(rep), code


HANDLERS = {
    "alpha": cmd_alpha,
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "diagnose": cmd_diagnose,
    "rank": cmd_rank,
    "symbol": cmd_symbol,
    "gram": cmd_gram,
    "experiment": cmd_experiment,
}

USER_ERRORS = (UserError, ContractError, DomainError, UnsupportedInputError, IndexOverflowError,
               IndexRangeError, ValueError, KeyError, TypeError, OSError)
NUMERIC_ERRORS = (NumericalError, DivergenceError, ArithmeticError)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = make_config(args)
        text, code = HANDLERS[cfg.command](cfg)
        write_output(text, cfg.out, stdout)
        return code
    except USER_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except NUMERIC_ERRORS as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
