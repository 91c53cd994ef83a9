"""
Subcommands of the `univoque` command line.

Every handler takes a validated RunConfig, writes its result to stdout
(logs go to stderr) and returns an exit code:

    0 ok, 1 internal failure, 2 bad input, 3 undecided at the depth cap,
    4 tolerance not reached

A sweep exits nonzero only when every row failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Callable, Optional, TextIO

from analysis.dimension import DimensionEstimate, dimension, hatU_block_count, sigma_lower_bound
from analysis.kl import kl_constant, thue_morse_agreement
from analysis.measure import (
    check_ratio_bound,
    estimate_zero_block_measure,
    interval_triple,
    measure_lower_bound,
    zero_run_experiment,
)
from analysis.sweep import (
    SweepRow,
    format_base,
    row_record,
    rows_to_csv,
    rows_to_json,
    staircase_sweep,
    summarize_sweep,
    total_failure_cause,
)
from arith.errors import (
    CapExceeded,
    CertificateDepthExceeded,
    ConsistencyAlarm,
    DepthExceeded,
    NotFound,
    ToleranceNotReached,
    UndecidedAtDepth,
)
from arith.exactnum import compare_rational
from arith.intervals import Enclosure, format_decimal
from arith.parsing import parse_base, parse_grid, parse_rational
from cli.options import RunConfig
from config.settings import get_settings
from symbolic.entropy import sandwich
from symbolic.expansion import (
    beta_is_finite,
    expansion_oracle_unique,
    greedy_expansion,
    greedy_sequence,
    is_unique_expansion,
    quasi_greedy_expansion,
)
from symbolic.models import Alphabet, PeriodicSeq, format_sequence, parse_sequence

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_UNDECIDED = 3
EXIT_TOLERANCE = 4

Handler = Callable[[RunConfig, TextIO], int]

_SWEEP_EXIT = {"tolerance": EXIT_TOLERANCE, "undecided": EXIT_UNDECIDED, "input": EXIT_USAGE, "failure": EXIT_FAILURE}


# ============================================================================
# OUTPUT HELPERS
# ============================================================================


def _emit(config: RunConfig, record: dict, out: TextIO) -> None:
    """One result: `k=v,k=v` for csv, an object for json."""
    if config.format == "json":
        print(json.dumps(record, ensure_ascii=False), file=out)
    else:
        print(",".join(f"{k}={v}" for k, v in record.items()), file=out)


def _decimal(x, places: Optional[int] = None) -> str:
    return format_decimal(x, places or get_settings().decimal_places)


def _enclosure_fields(prefix: str, e: Enclosure) -> dict[str, str]:
    return {f"{prefix}_lo": _decimal(e.lo), f"{prefix}_hi": _decimal(e.hi)}


def _alphabet(config: RunConfig) -> Alphabet:
    return Alphabet(M=config.M)


def _require_base(config: RunConfig):
    if not config.base:
        raise ValueError("this command needs a base (-q)")
    return parse_base(config.base)


# ============================================================================
# HANDLERS
# ============================================================================


def cmd_expand(config: RunConfig, out: TextIO) -> int:
    alphabet = _alphabet(config)
    q = _require_base(config)
    n = config.option("n", 16)
    beta = greedy_expansion(q, alphabet, n)
    finite_at = beta_is_finite(q, alphabet)
    if finite_at is not None:
        status = f"finite at {finite_at}"
    elif isinstance(greedy_sequence(q, alphabet), PeriodicSeq):
        status = "periodic"
    else:
        status = f"no period within {get_settings().digit_depth} digits"
    alpha = quasi_greedy_expansion(q, alphabet)
    if config.format == "json":
        alpha_value = alpha.to_json() if isinstance(alpha, PeriodicSeq) else format_sequence(alpha, n)
        _emit(config, {"beta": str(beta), "finite_at": finite_at, "alpha": alpha_value}, out)
    else:
        print(f"beta: {beta} ({status}); alpha: {format_sequence(alpha, n)}", file=out)
    return EXIT_OK


def _dimension_record(q_label: str, estimate: DimensionEstimate) -> dict:
    places = get_settings().decimal_places
    record = row_record(SweepRow.from_estimate(q_label, estimate), places)
    return {"q": record["q"], "D_lo": record["D_lo"], "D_hi": record["D_hi"], "method": record["method"]}


def cmd_dimension(config: RunConfig, out: TextIO) -> int:
    alphabet = _alphabet(config)
    q = _require_base(config)
    label = format_base(q)
    try:
        estimate = dimension(q, alphabet, config.tol, config.option("max_window"))
    except ToleranceNotReached as e:
        _emit(config, _dimension_record(label, e.best), out)
        raise
    _emit(config, _dimension_record(label, estimate), out)
    return EXIT_OK


def cmd_sweep(config: RunConfig, out: TextIO) -> int:
    grid_text = config.option("grid")
    if not grid_text:
        raise ValueError("sweep needs --grid lo:hi:step")
    rows = staircase_sweep(config.M, parse_grid(grid_text), config.tol, config.jobs)
    out.write(rows_to_json(rows) + "\n" if config.format == "json" else rows_to_csv(rows))
    summarize_sweep(config.M, rows)
    cause = total_failure_cause(rows)
    if cause is None:
        return EXIT_OK
    logger.error(f"❌ every row failed ({cause})")
    return _SWEEP_EXIT[cause]


def cmd_kl(config: RunConfig, out: TextIO) -> int:
    width = config.option("width")
    kl = kl_constant(config.M, parse_rational(width) if width else None)
    record = {
        "M": config.M,
        "lo": _decimal(kl.lo),
        "hi": _decimal(kl.hi),
        "certificate_depth": kl.certificate_depth,
        "thue_morse_agreement": thue_morse_agreement(kl),
    }
    _emit(config, record, out)
    return EXIT_OK


def cmd_sigma(config: RunConfig, out: TextIO) -> int:
    N = config.option("N", 2)
    bound = sigma_lower_bound(config.M, N)
    record = {
        "M": config.M,
        "N": N,
        **_enclosure_fields("sigma", bound.sigma),
        **_enclosure_fields("c", bound.separation_constant),
        "hatU_blocks": hatU_block_count(config.M, N, config.option("blocks", 3)),
    }
    _emit(config, record, out)
    return EXIT_OK


def cmd_intervals(config: RunConfig, out: TextIO) -> int:
    prefix = config.option("prefix")
    if not prefix:
        raise ValueError("intervals needs --prefix")
    triple = interval_triple(config.M, prefix, config.option("t", 1))
    record = {"prefix": str(triple.prefix), "t": triple.t, "q1": str(triple.q1), "q3": str(triple.q3)}
    record["q2"] = str(triple.q2)
    if triple.boundary:
        record["boundary"] = "true"
    else:
        check = check_ratio_bound(triple)
        record.update({**_enclosure_fields("ratio", check.ratio), **_enclosure_fields("bound", check.bound)})
        record["holds"] = str(check.holds).lower()
    _emit(config, record, out)
    return EXIT_OK


def cmd_measure(config: RunConfig, out: TextIO) -> int:
    p, r = parse_rational(config.option("p", "")), parse_rational(config.option("r", ""))
    t = config.option("t", 1)
    bound = measure_lower_bound(config.M, p, r, t)
    record: dict = {"p": _decimal(p), "r": _decimal(r), "t": t, "bound": _decimal(bound.lo)}
    samples = config.option("samples", 0)
    if samples:
        estimate = estimate_zero_block_measure(config.M, p, r, config.option("n", 4), t, samples, config.seed)
        record.update({"estimate": f"{estimate.estimate:.6f}", "stderr": f"{estimate.stderr:.6f}"})
        record["consistent"] = str(estimate.consistent).lower()
    _emit(config, record, out)
    return EXIT_OK


def cmd_zeroruns(config: RunConfig, out: TextIO) -> int:
    r = parse_rational(config.option("r", str(config.M + 1)))
    depth = config.depth or 200
    report = zero_run_experiment(config.M, r, config.option("samples", 100), depth, config.seed)
    if config.format == "json":
        print(json.dumps(report.to_json(), ensure_ascii=False), file=out)
    else:
        print("q,deepest_m", file=out)
        for row in report.rows:
            print(f"{format_base(row.q)},{row.deepest}", file=out)
    logger.info(f"success fraction {float(report.fraction):.4f}")
    return EXIT_OK


def cmd_entropy(config: RunConfig, out: TextIO) -> int:
    alphabet = _alphabet(config)
    q = _require_base(config)
    n = config.option("n", 8)
    lower, upper = sandwich(q, alphabet, n)
    _emit(config, {"q": format_base(q), "n": n, "h_lo": _decimal(lower.lo), "h_hi": _decimal(upper.hi)}, out)
    return EXIT_OK


def cmd_unique(config: RunConfig, out: TextIO) -> int:
    alphabet = _alphabet(config)
    q = _require_base(config)
    text = config.option("sequence")
    if not text:
        raise ValueError("unique needs --sequence, e.g. 110(10)")
    c = parse_sequence(text, alphabet)
    criterion = is_unique_expansion(q, alphabet, c)
    record = {"sequence": c.display(), "unique": str(criterion).lower()}
    if compare_rational(q, alphabet.size) <= 0:
        oracle = expansion_oracle_unique(q, alphabet, c)
        if oracle != criterion:
            raise ConsistencyAlarm(f"uniqueness criterion and oracle disagree on {c.display()}")
        record["oracle"] = str(oracle).lower()
    _emit(config, record, out)
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-M", type=int, default=1, help="largest digit (default: 1)")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="output format (default: csv)")
    common.add_argument("--log-level", dest="log_level", default=None, help="DEBUG, INFO, WARNING (default: env)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: UNIVOQUE_JOBS or all CPUs)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: UNIVOQUE_SEED or 12345)")
    common.add_argument("--depth", type=int, default=None, help="digit depth cap (default: UNIVOQUE_DIGIT_DEPTH)")
    common.add_argument("--precision", type=int, default=None, help="decimal places in output (default: 12)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="univoque", description="Certified dimension bounds for univoque sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command("expand", cmd_expand, "greedy and quasi-greedy expansions of 1")
    p.add_argument("-q", dest="base", required=True, help="base: decimal, p/q, golden, tribonacci or poly spec")
    p.add_argument("-n", type=int, default=16, help="digits to print (default: 16)")

    p = command("dimension", cmd_dimension, "certified enclosure of D(q)")
    p.add_argument("-q", dest="base", required=True, help="base")
    p.add_argument("--tol", default=None, help="enclosure width (default: UNIVOQUE_DEFAULT_TOL or 0.01)")
    p.add_argument("--max-window", dest="max_window", type=int, default=None, help="largest window n")

    p = command("sweep", cmd_sweep, "D(q) over a grid of bases")
    p.add_argument("--grid", required=True, help="lo:hi:step, endpoints included")
    p.add_argument("--tol", default=None, help="enclosure width per row (default: 0.01)")

    p = command("kl", cmd_kl, "enclosure of the critical base q′(M)")
    p.add_argument("--width", default=None, help="enclosure width (default: 2^-24)")

    p = command("sigma", cmd_sigma, "lower bound σ(N) and separation constant")
    p.add_argument("-N", type=int, default=2, help="block length (default: 2)")
    p.add_argument("--blocks", type=int, default=3, help="n for the block count (default: 3)")

    p = command("intervals", cmd_intervals, "base intervals of a greedy prefix and the ratio bound")
    p.add_argument("--prefix", required=True, help="greedy-admissible digits, e.g. 11")
    p.add_argument("-t", type=int, default=1, help="zero block length (default: 1)")

    p = command("measure", cmd_measure, "lower bound for the measure of bases with a zero block")
    p.add_argument("-p", required=True, help="left end of the base range")
    p.add_argument("-r", required=True, help="right end of the base range")
    p.add_argument("-t", type=int, default=1, help="zero block length (default: 1)")
    p.add_argument("-n", type=int, default=4, help="block position for sampling (default: 4)")
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo samples, 0 to skip (default: 0)")

    p = command("zeroruns", cmd_zeroruns, "zero runs in greedy expansions of random bases")
    p.add_argument("-r", default=None, help="largest base sampled (default: M+1)")
    p.add_argument("--samples", type=int, default=100, help="number of bases (default: 100)")

    p = command("entropy", cmd_entropy, "sandwich entropy bounds at one window")
    p.add_argument("-q", dest="base", required=True, help="base")
    p.add_argument("-n", type=int, default=8, help="window length (default: 8)")

    p = command("unique", cmd_unique, "uniqueness of an eventually periodic expansion")
    p.add_argument("-q", dest="base", required=True, help="base")
    p.add_argument("--sequence", required=True, help="e.g. 110(10) or 1(0)")
    return parser


def run(argv: Optional[list[str]] = None, out: Optional[TextIO] = None) -> int:
    """Parse, validate, dispatch, and map errors to exit codes."""
    out = out or sys.stdout
    ns = build_parser().parse_args(argv)
    handler: Handler = ns.handler
    try:
        config = RunConfig.from_namespace(ns)
        config.apply()
        return handler(config, out)
    except ToleranceNotReached as e:
        logger.warning(f"⚠️ {e}")
        return EXIT_TOLERANCE
    except (UndecidedAtDepth, DepthExceeded, CertificateDepthExceeded, CapExceeded, NotFound) as e:
        logger.error(f"❌ {e}")
        return EXIT_UNDECIDED
    except ConsistencyAlarm as e:
        logger.error(f"❌ internal consistency check failed: {e}", exc_info=True)
        return EXIT_FAILURE
    except ValueError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
