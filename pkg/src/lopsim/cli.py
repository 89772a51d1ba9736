"""Command line: rate tables, parameter sweeps, circuit simulation and checks.

Exit codes: 0 success, 2 usage, 3 circuit parse error, 4 failed validation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .analysis import bell_rate_table, sweep_beamsplitter, sweep_mismatch
from .circuits import LOGICAL_INPUTS, GateParams, build_cnot, build_cnot_mismatch, logical_basis_state
from .detection import (
    DetectorGroup,
    coincidence_rate,
    coincidence_table,
    logical_pairs,
    postselect_coincidence,
)
from .dsl import DslError, lower, parse_circuit, parse_number
from .errors import DomainError
from .fock import PureState, single_photon_state, transform_state
from .network import UNITARY_TOL, unitarity_defect
from .output import (
    output_record,
    round_floats,
    rate_table_payload,
    rate_table_rows,
    sweep_payload,
    sweep_rows,
    to_csv,
    to_json,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVALID = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _unit_value(text: str) -> float:
    try:
        value = parse_number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be lo:hi:count, got {text!r}")
    lo, hi = _unit_value(parts[0]), _unit_value(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"count must be an integer, got {parts[2]!r}") from None
    if count < 2 or lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}: need lo <= hi and count >= 2")
    return lo, hi, count


def _names(text: str) -> list[str]:
    names = [n for n in text.split(",") if n]
    if not names:
        raise argparse.ArgumentTypeError("expected a comma-separated list of mode names")
    return names


def _detector(text: str) -> tuple[str, list[str]]:
    label, sep, modes = text.partition("=")
    if not sep or not label:
        raise argparse.ArgumentTypeError(f"detector must be LABEL=mode[,mode...], got {text!r}")
    return label, _names(modes)


def _digits(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= value <= 17:
        raise argparse.ArgumentTypeError("digits must be between 1 and 17")
    return value


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument(
        "--digits", type=_digits, help="round numbers to this many significant digits (default: exact doubles)"
    )
    p.add_argument("-o", "--output", type=Path, help="write to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lopsim", description="Few-photon linear-optics simulator for the coincidence-basis CNOT gate."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="coincidence rate tables for logical or Bell inputs")
    p.add_argument("which", choices=("logical", "bell"))
    p.add_argument("--eta", type=_unit_value, default=1 / 3, help="B1/B2/B5 reflectivity (default 1/3)")
    p.add_argument("--etap", type=_unit_value, default=1 / 2, help="B3/B4 reflectivity (default 1/2)")
    p.add_argument("--xi", type=_unit_value, default=1.0, help="mode matching (default 1)")
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="Bell-discrimination error over a parameter grid")
    p.add_argument("kind", choices=("bs", "mismatch"))
    p.add_argument("--eta", type=_range, default=(0.28, 0.38, 101), help="lo:hi:count for bs sweeps")
    p.add_argument("--etap", type=_range, default=(0.40, 0.60, 101), help="lo:hi:count for bs sweeps")
    p.add_argument("--xi", type=_range, default=(0.8, 1.0, 201), help="lo:hi:count for mismatch sweeps")
    _add_output_flags(p)

    p = sub.add_parser("simulate", help="propagate an input through a .lop circuit")
    p.add_argument("circuit", type=Path)
    p.add_argument("--input", type=_names, help="photon modes, overriding the file's input lines")
    p.add_argument("--detector", type=_detector, action="append", help="LABEL=mode[,mode...]; repeatable")
    p.add_argument("--control", type=_names, help="control modes for coincidence post-selection")
    p.add_argument("--target", type=_names, help="target modes for coincidence post-selection")
    p.add_argument("--show-state", action="store_true", help="also print the (post-selected) output state")
    _add_output_flags(p)

    p = sub.add_parser("check", help="verify that a .lop circuit lowers to a unitary transform")
    p.add_argument("circuit", type=Path)
    return parser


def _tables(args) -> tuple[str, dict[str, Any], Any, tuple]:
    params = GateParams(args.eta, args.etap, args.xi)
    if args.which == "bell":
        table = bell_rate_table(params)
    else:
        builder = build_cnot if params.xi == 1.0 else build_cnot_mismatch
        transform, layout = builder(params)
        states = [(label, transform_state(logical_basis_state(label, layout), transform)) for label in LOGICAL_INPUTS]
        table = coincidence_table(states, logical_pairs(layout))
    meta = {"which": args.which, "eta": params.eta, "eta_prime": params.eta_prime, "xi": params.xi}
    return f"tables {args.which}", meta, rate_table_payload(table), [rate_table_rows(table)]


def _sweep(args):
    if args.kind == "bs":
        reports = sweep_beamsplitter(args.eta, args.etap)
        meta = {"kind": "bs", "eta": list(args.eta), "eta_prime": list(args.etap)}
        columns = ("eta", "eta_prime")
    else:
        reports = sweep_mismatch(args.xi)
        meta = {"kind": "mismatch", "xi": list(args.xi)}
        columns = ("xi",)
    return f"sweep {args.kind}", meta, sweep_payload(reports), [sweep_rows(reports, columns)]


def _read_circuit(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_circuit(text)


def _state_rows(state: PureState | None) -> list[list[Any]]:
    if state is None:
        return []
    return [
        ["".join(map(str, occ)), float(amp.real), float(amp.imag), abs(amp) ** 2]
        for occ, amp in state.items()
    ]


def _simulate(args):
    desc = _read_circuit(args.circuit)
    transform, layout = lower(desc)
    photons = args.input if args.input is not None else desc.input_photons
    if not photons:
        raise UsageError("no input: add 'input photon ...' to the circuit or pass --input")
    try:
        state = single_photon_state(layout.mode_count, layout.indices(photons))
        if args.detector:
            specs = [(label, modes) for label, modes in args.detector]
        elif desc.detectors:
            specs = [(d.label, list(d.modes)) for d in desc.detectors]
        else:
            specs = [(name, [name]) for name in desc.modes]
        groups = [DetectorGroup(label, tuple(layout.indices(modes))) for label, modes in specs]
        control = layout.indices(args.control) if args.control else None
        target = layout.indices(args.target) if args.target else None
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if (control is None) != (target is None):
        raise UsageError("--control and --target must be given together")

    out = transform_state(state, transform)
    rates = []
    for i, a in enumerate(groups):
        for b in groups[i + 1:]:
            if not set(a.modes) & set(b.modes):
                rates.append([a.label, b.label, coincidence_rate(out, a, b)])

    payload: dict[str, Any] = {
        "input": list(photons),
        "rates": [{"a": a, "b": b, "rate": r} for a, b, r in rates],
    }
    shown = out
    if control is not None:
        try:
            post = postselect_coincidence(out, control, target)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        payload["postselection"] = {
            "control": list(args.control),
            "target": list(args.target),
            "probability": post.probability,
            "empty": post.empty,
        }
        shown = post.state
    if args.show_state:
        payload["state"] = [
            {"ket": k, "re": re, "im": im, "probability": p} for k, re, im, p in _state_rows(shown)
        ]

    blocks = [(["detector_a", "detector_b", "rate"], rates)]
    if control is not None:
        blocks.append((["postselection_probability", "empty"], [[post.probability, str(post.empty).lower()]]))
    if args.show_state:
        blocks.append((["ket", "re", "im", "probability"], _state_rows(shown)))
    meta = {"circuit": args.circuit.name, "modes": list(desc.modes)}
    return "simulate", meta, payload, blocks


def _emit(args, text: str) -> None:
    if args.output is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error for us
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
    else:
        args.output.write_text(text, encoding="utf-8")


def _check(args) -> int:
    desc = _read_circuit(args.circuit)
    transform, _ = lower(desc)
    defect = unitarity_defect(transform)
    ok = defect <= UNITARY_TOL
    print(f"modes={transform.mode_count} max|U^dagger U - I|={defect!r} {'unitary' if ok else 'NOT unitary'}")
    return EXIT_OK if ok else EXIT_INVALID


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _check(args)
        handler = {"tables": _tables, "sweep": _sweep, "simulate": _simulate}[args.command]
        command, meta, payload, blocks = handler(args)
    except DslError as exc:
        print(f"{getattr(args, 'circuit', '<input>')}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lopsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.digits is not None:
        payload, blocks = round_floats(payload, args.digits), round_floats(blocks, args.digits)
    if args.format == "json":
        text = to_json(output_record(command, meta, payload))
    else:
        # multiple CSV blocks are separated by one blank line
        text = "\n".join(to_csv(header, rows) for header, rows in blocks)
    _emit(args, text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
