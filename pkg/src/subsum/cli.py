"""Command-line front end.

Every command prints one deterministic JSON document (rationals rendered as
"p/q" strings) and exits with a code that states what happened:

    0  success
    1  unexpected failure
    2  could not parse an input (set DSL, matrix, sequence, selector, args)
    3  a scan or tail-bound budget ran out before a certified answer
    4  the matrix was certified not regular
    5  the result is diagnostic-only (no certificate at this scale)
    6  a certificate failed verification
    7  a precondition or move legality check failed

The optional run log (--runlog) appends one JSON line per invocation with a
timestamp, the argument vector, and the sha256 digest of the printed
output; the printed output itself never contains the timestamp.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from fractions import Fraction

from . import constructions, games, setlang, sigma, summability
from ._version import __version__
from .constructions import (
    ConstructionError,
    OscillationCertificate,
    PreconditionError,
)
from .games import IllegalMoveError, StrategySearchError
from .ideals import (
    IdealPresentation,
    RestrictionError,
    SelectorNotCertifiedError,
    UnsupportedIdealError,
    parse_ideal,
)
from .setlang import EnumerationCapError, SetSyntaxError, fraction_decimal, parse_set
from .sigma import ImageUndecidableError, SelectorSpecError, parse_selector
from .summability import (
    DomainRiskError,
    MatrixSpecError,
    SequenceSpecError,
    TailToleranceError,
    parse_matrix,
    parse_row,
    parse_sequence,
)

OK = 0
FAIL = 1
PARSE_ERROR = 2
BUDGET_EXCEEDED = 3
NOT_REGULAR = 4
DIAGNOSTIC_ONLY = 5
VERIFY_FAILED = 6
PRECONDITION_FAILED = 7


def _frac(value: Fraction | None) -> str | None:
    return None if value is None else str(Fraction(value))


def _parse_stem(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    if not text:
        return ()
    return tuple(int(t) for t in text.split(","))


def _config_dict(pairs: list[str] | None) -> dict[str, str]:
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"config entries look like key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


# ------------------------------------------------------------------ commands


def _cmd_density(args) -> tuple[dict, int]:
    s = parse_set(args.set)
    report = setlang.density_report(s, args.scale, window=args.window)
    if args.csv:
        return {"csv": setlang.density_csv(report)}, OK
    payload = {
        "command": "density",
        "set": setlang.render(report.description),
        "scale": args.scale,
        "prefix_counts": [[n, c] for n, c in report.prefix_counts],
        "ratios": [
            [n, _frac(r), fraction_decimal(r)] for n, r in report.ratios()
        ],
        "lower_estimate": _frac(report.lower_estimate),
        "upper_estimate": _frac(report.upper_estimate),
        "exact": _frac(report.exact),
    }
    if report.banach_upper is not None:
        density, window = report.banach_upper
        payload["window"] = window
        payload["window_max_density"] = _frac(density)
    return payload, OK


def _cmd_verdict(args) -> tuple[dict, int]:
    ideal = parse_ideal(args.ideal)
    s = parse_set(args.set)
    verdict = ideal.verdict(s, args.scale)
    payload = {
        "command": "verdict",
        "ideal": ideal.name,
        "set": setlang.render(s),
        "status": verdict.status,
        "reason": verdict.reason,
        "scale": verdict.scale,
        "evidence": verdict.evidence,
    }
    return payload, OK


def _cmd_regularity(args) -> tuple[dict, int]:
    matrix = parse_matrix(args.matrix)
    ideal = parse_ideal(args.ideal)
    verdict = summability.regularity_verdict(matrix, ideal, n_rows=args.scale)
    payload = {
        "command": "regularity",
        "matrix": verdict.matrix_spec,
        "ideal": verdict.ideal_name,
        "overall": verdict.overall,
        "conditions": {
            label: {
                "holds": rep.holds,
                "certified": rep.certified,
                "detail": rep.detail,
                "data": rep.data,
            }
            for label, rep in (
                ("row_l1_bound", verdict.r1),
                ("columns_vanish", verdict.r2),
                ("row_sums_to_one", verdict.r3),
            )
        },
        "witness": verdict.witness,
    }
    if verdict.overall == "not_regular":
        return payload, NOT_REGULAR
    if verdict.overall == "undecided":
        return payload, DIAGNOSTIC_ONLY
    return payload, OK


def _cmd_transform(args) -> tuple[dict, int]:
    matrix = parse_matrix(args.matrix)
    x = parse_sequence(args.x)
    tol = Fraction(args.tail_tol)
    points = summability.transform_prefix(matrix, x, args.rows, tail_tol=tol)
    payload = {
        "command": "transform",
        "matrix": matrix.spec_string(),
        "x": x.name,
        "rows": [
            {"n": p.n, "value": _frac(p.value), "tail_bound": _frac(p.tail_bound)}
            for p in points
        ],
    }
    return payload, OK


def _cmd_domain(args) -> tuple[dict, int]:
    matrix = parse_matrix(args.matrix)
    x = parse_sequence(args.x)
    check = summability.domain_check(matrix, x, args.row, Fraction(args.tol))
    payload = {
        "command": "domain",
        "matrix": matrix.spec_string(),
        "x": x.name,
        "row": check.n,
        "status": check.status,
        "value": _frac(check.value),
        "tail_bound": _frac(check.tail_bound),
        "evidence": check.evidence,
    }
    return payload, OK if check.status == "converged" else DIAGNOSTIC_ONLY


def _cmd_metric(args) -> tuple[dict, int]:
    s1 = parse_selector(args.s1)
    s2 = parse_selector(args.s2)
    interval = sigma.metric(s1, s2, args.resolution)
    payload = {
        "command": "metric",
        "s1": s1.spec_string(),
        "s2": s2.spec_string(),
        "resolution": interval.resolution,
        "lower": _frac(interval.lo),
        "upper": _frac(interval.hi),
        "width": _frac(interval.width),
    }
    return payload, OK


def _cmd_escape(args) -> tuple[dict, int]:
    stem = _parse_stem(args.stem)
    x = parse_sequence(args.x)
    if args.mode == "unbounded":
        row = parse_row(args.row)
        result = constructions.escape_unbounded(stem, row, x, Fraction(args.m0))
        payload = {
            "command": "escape",
            "mode": "unbounded",
            "row": row.name,
            "x": x.name,
            "stem": list(stem),
            "selector": result.selector.spec_string(),
            "pivot_index": result.pivot_index,
            "pivot_position": result.pivot_position,
            "partial_sum": _frac(result.partial_sum),
            "bound": _frac(result.bound),
            "holds": result.holds,
            "detail": result.detail,
        }
    else:
        matrix = parse_matrix(args.matrix)
        ideal = parse_ideal(args.ideal)
        result = constructions.escape_rowfinite(
            stem, matrix, x, ideal, Fraction(args.m0), p0=args.block_floor
        )
        payload = {
            "command": "escape",
            "mode": "row_finite",
            "matrix": matrix.spec_string(),
            "ideal": ideal.name,
            "x": x.name,
            "stem": list(stem),
            "selector": result.selector.spec_string(),
            "block_index": result.block_index,
            "block": list(result.block),
            "row_values": [[n, _frac(v)] for n, v in result.row_values],
            "bound": _frac(result.bound),
            "holds": result.holds,
            "detail": result.detail,
        }
    return payload, OK if result.holds else FAIL


def _cmd_oscillate(args) -> tuple[dict, int]:
    stem = _parse_stem(args.stem)
    x = parse_sequence(args.x)
    matrix = parse_matrix(args.matrix)
    pair = constructions.oscillation_pair(
        stem, x, matrix, scan=args.scale, tol=Fraction(args.tol)
    )
    payload = {
        "command": "oscillate",
        "matrix": matrix.spec_string(),
        "x": x.name,
        "stem": list(stem),
        "row": pair.row,
        "lower_selector": pair.lower_selector.spec_string(),
        "upper_selector": pair.upper_selector.spec_string(),
        "lower_value": _frac(pair.lower_value),
        "upper_value": _frac(pair.upper_value),
        "gap": _frac(pair.gap),
        "targets": [_frac(pair.lower_target), _frac(pair.upper_target)],
    }
    return payload, OK


def _cmd_adversary(args) -> tuple[dict, int]:
    matrix = parse_matrix(args.matrix)
    report = constructions.steinhaus_adversary(
        matrix, mode=args.mode, scale=args.scale, seed=args.seed
    )
    cert_dict = report.certificate.to_json_dict() if report.certificate else None
    payload = {
        "command": "adversary",
        "mode": report.mode,
        "matrix": report.matrix_spec,
        "x": report.x_spec,
        "scale": report.scale,
        "status": report.status,
        "certificate": cert_dict,
        "boundary_means": [
            {
                "level": b.level,
                "at": b.at,
                "mean": _frac(b.mean),
                "target": _frac(b.target),
                "error": _frac(b.error),
                "allowance": _frac(b.allowance),
                "within": b.within,
            }
            for b in report.boundary_means
        ],
        "evidence": report.evidence,
    }
    if args.certificate_out and cert_dict is not None:
        with open(args.certificate_out, "w", encoding="ascii") as handle:
            json.dump(cert_dict, handle, sort_keys=True, indent=2)
            handle.write("\n")
    return payload, OK if report.status == "certified" else DIAGNOSTIC_ONLY


def _certificate_values(matrix, x, limit: int) -> list[Fraction]:
    """Transform values for certificate verification, using the 0/1 fast
    path when the sequence really is 0/1 on the needed prefix."""
    bits = []
    zero_one = True
    for n in range(1, limit + 1):
        v = x.value(n)
        if v == 0:
            bits.append(0)
        elif v == 1:
            bits.append(1)
        else:
            zero_one = False
            break
    if zero_one and matrix.row_finite:
        return summability._bits_transform_values(matrix, bits, limit)
    if limit > 4096:
        raise TailToleranceError(
            "certificate verification beyond 4096 rows needs a 0/1 sequence "
            "and a row-finite matrix"
        )
    return [p.value for p in summability.transform_prefix(matrix, x, limit)]


def _cmd_verify(args) -> tuple[dict, int]:
    with open(args.certificate, "r", encoding="ascii") as handle:
        data = json.load(handle)
    try:
        cert = OscillationCertificate.from_json_dict(data)
    except (KeyError, ConstructionError) as exc:
        raise ValueError(f"malformed certificate: {exc}") from exc
    matrix = parse_matrix(cert.matrix_spec)
    x = parse_sequence(cert.x_spec)
    values = _certificate_values(matrix, x, cert.scales[-1])
    ok = cert.audit_values(values)
    payload = {
        "command": "verify",
        "certificate": args.certificate,
        "matrix": cert.matrix_spec,
        "x": cert.x_spec,
        "scales": list(cert.scales),
        "verified": ok,
        "delta_lower": _frac(cert.delta_lower),
        "delta_upper": _frac(cert.delta_upper),
    }
    return payload, OK if ok else VERIFY_FAILED


def _cmd_game(args) -> tuple[dict, int]:
    ideal = parse_ideal(args.ideal)
    strategy = games.parse_strategy(args.strategy)
    if args.moves == "nu2tower":
        moves = [games.nu2_tower_move(r) for r in range(1, args.rounds + 1)]
    else:
        moves = [parse_set(text) for text in args.moves.split(";") if text.strip()]
    transcript = games.play_game(
        ideal, moves, strategy, rounds=args.rounds, scale=args.scale
    )
    ruling = games.adjudicate(transcript, ideal)
    if args.transcript_out:
        with open(args.transcript_out, "w", encoding="ascii") as handle:
            handle.write(transcript.to_jsonl())
    payload = {
        "command": "game",
        "ideal": ideal.name,
        "strategy": strategy.name,
        "rounds": [
            {
                "round": r.index,
                "move": r.move_spec,
                "reply": list(r.reply),
                "witness": r.witness,
            }
            for r in transcript.rounds
        ],
        "adjudication": {
            "label": ruling.label,
            "favored": ruling.favored,
            "evidence": ruling.evidence,
        },
    }
    return payload, OK


def _cmd_demo(args) -> tuple[dict, int]:
    matrix = parse_matrix(args.matrix)
    x = parse_sequence(args.x)
    ideal = parse_ideal(args.ideal)
    schedule = tuple(int(t) for t in args.schedule.split(","))
    demo = constructions.meagerness_demo(matrix, x, ideal, schedule)
    payload = {
        "command": "demo",
        "matrix": matrix.spec_string(),
        "x": x.name,
        "ideal": ideal.name,
        "schedule": list(schedule),
        "rounds": [
            {
                "bound": _frac(r.bound),
                "block_index": r.block_index,
                "block": list(r.block),
                "holds": r.holds,
                "stem_length": len(r.selector.stem),
            }
            for r in demo.results
        ],
        "all_hold": demo.all_hold,
    }
    return payload, OK if demo.all_hold else FAIL


# ------------------------------------------------------------------- plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scale", type=int, default=10**4, help="working scale")
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (mt19937)")
    common.add_argument("--out", help="also write the JSON output to this path")
    common.add_argument("--runlog", help="append a run record to this JSONL file")
    common.add_argument(
        "--config",
        action="append",
        metavar="KEY=VALUE",
        help="extra knobs, recorded in the run log",
    )

    parser = argparse.ArgumentParser(
        prog="subsum",
        description="Summability matrices, densities, ideals, selectors, and games",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("density", parents=[common], help="prefix densities of a set")
    p.add_argument("set", help="set DSL expression")
    p.add_argument("--window", type=int, default=None, help="sliding window length")
    p.add_argument("--csv", action="store_true", help="emit n,count,ratio CSV")
    p.set_defaults(handler=_cmd_density)

    p = sub.add_parser("verdict", parents=[common], help="ideal membership verdict")
    p.add_argument("set")
    p.add_argument("--ideal", required=True, help="fin | z | bd | finxfin | matrix:<spec>")
    p.set_defaults(handler=_cmd_verdict)

    p = sub.add_parser("regularity", parents=[common], help="regularity relative to an ideal")
    p.add_argument("--matrix", required=True)
    p.add_argument("--ideal", default="fin")
    p.set_defaults(handler=_cmd_regularity)

    p = sub.add_parser("transform", parents=[common], help="matrix transform of a sequence")
    p.add_argument("--matrix", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--tail-tol", default="0", help="certified tail tolerance (p/q)")
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("domain", parents=[common], help="does one transform row converge")
    p.add_argument("--matrix", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--row", type=int, default=1)
    p.add_argument("--tol", default="1/1000000")
    p.set_defaults(handler=_cmd_domain)

    p = sub.add_parser("metric", parents=[common], help="distance between selectors")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--resolution", type=int, default=40)
    p.set_defaults(handler=_cmd_metric)

    p = sub.add_parser("escape", parents=[common], help="extend a stem past a bound")
    p.add_argument("--mode", choices=("unbounded", "rowfinite"), required=True)
    p.add_argument("--stem", default="", help="comma list or {v1,v2,...}")
    p.add_argument("--x", required=True)
    p.add_argument("--m0", default="1", help="bound to defeat (p/q)")
    p.add_argument("--row", help="row spec (unbounded mode)")
    p.add_argument("--matrix", help="matrix spec (rowfinite mode)")
    p.add_argument("--ideal", default="z", help="ideal (rowfinite mode)")
    p.add_argument("--block-floor", type=int, default=1, help="least block index")
    p.set_defaults(handler=_cmd_escape)

    p = sub.add_parser("oscillate", parents=[common], help="two separating stem extensions")
    p.add_argument("--matrix", default="cesaro")
    p.add_argument("--x", required=True)
    p.add_argument("--stem", default="")
    p.add_argument("--tol", default="1/16")
    p.set_defaults(handler=_cmd_oscillate)

    p = sub.add_parser("adversary", parents=[common], help="0/1 sequence defeating averaging")
    p.add_argument("--matrix", default="cesaro")
    p.add_argument("--mode", choices=("blocks", "greedy"), default="blocks")
    p.add_argument("--certificate-out", help="write the certificate JSON here")
    p.set_defaults(handler=_cmd_adversary)

    p = sub.add_parser("verify", parents=[common], help="re-audit a certificate file")
    p.add_argument("certificate", help="path to a certificate JSON file")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("game", parents=[common], help="play a filter game")
    p.add_argument("--ideal", default="z")
    p.add_argument("--moves", default="nu2tower", help="semicolon-joined set DSL, or nu2tower")
    p.add_argument("--strategy", default="prefix_density")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--transcript-out", help="write the JSONL transcript here")
    p.set_defaults(handler=_cmd_game)

    p = sub.add_parser("demo", parents=[common], help="repeated escapes on fresh blocks")
    p.add_argument("--matrix", default="cesaro")
    p.add_argument("--x", default="n")
    p.add_argument("--ideal", default="z")
    p.add_argument("--schedule", default="1,2,4,8")
    p.set_defaults(handler=_cmd_demo)

    return parser


_PARSE_ERRORS = (
    SetSyntaxError,
    MatrixSpecError,
    SequenceSpecError,
    SelectorSpecError,
    ValueError,
)
_BUDGET_ERRORS = (EnumerationCapError, TailToleranceError, StrategySearchError)
_PRECONDITION_ERRORS = (
    PreconditionError,
    IllegalMoveError,
    DomainRiskError,
    RestrictionError,
    UnsupportedIdealError,
    SelectorNotCertifiedError,
    ImageUndecidableError,
)


def _render_output(payload: dict) -> str:
    if set(payload.keys()) == {"csv"}:
        return payload["csv"]
    return json.dumps(payload, sort_keys=True, indent=2)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    payload: dict | None = None
    error: str | None = None
    try:
        config = _config_dict(args.config)
        payload, code = args.handler(args)
        if config:
            payload.setdefault("config", config)
    except _BUDGET_ERRORS as exc:
        error, code = f"{type(exc).__name__}: {exc}", BUDGET_EXCEEDED
    except _PRECONDITION_ERRORS as exc:
        error, code = f"{type(exc).__name__}: {exc}", PRECONDITION_FAILED
    except ConstructionError as exc:
        error, code = f"{type(exc).__name__}: {exc}", DIAGNOSTIC_ONLY
    except _PARSE_ERRORS as exc:
        error, code = f"{type(exc).__name__}: {exc}", PARSE_ERROR
    except OSError as exc:
        error, code = f"{type(exc).__name__}: {exc}", FAIL
    digest = None
    if payload is not None:
        text = _render_output(payload)
        print(text)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text + "\n")
    else:
        print(error, file=sys.stderr)
    if args.runlog:
        record = {
            "ts": started,
            "argv": list(argv) if argv is not None else sys.argv[1:],
            "command": args.cmd,
            "seed": args.seed,
            "version": __version__,
            "exit": code,
            "digest": digest,
            "error": error,
        }
        with open(args.runlog, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
