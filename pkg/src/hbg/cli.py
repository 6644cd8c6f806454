"""Command-line interface tying the solvers, models, and searches together.

Commands:

    value       game JSON -> three-regime solution JSON
    blackjack   round JSON -> game + three-regime solution JSON
    sweep       family JSON -> CSV of (t, I_U, I_C, I_H) + boundary report
    search      exhaustive shoe search -> catalog CSV (+ checkpoint)
    circuit     hyperbit solution JSON -> measurement circuit JSON
    simulate    circuit + solution JSON -> verification report JSON
    analytic32  3x2 game JSON -> closed-form analysis JSON
    validate    schema/invariant check of any input file

Every file output gets a sibling `<name>.manifest.json` recording the
command, arguments, input/output hashes, seed, and library versions.
Failures surface as one machine-readable JSON object on stderr with
exit status 1.  Identical inputs and seeds produce byte-identical
outputs; worker counts never change output bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__, blackjack
from .analytic32 import solve_3x2
from .blackjack import RoundConfig, build_game, normalize_card
from .circuits import CircuitSpec, build_circuit
from .classical import solve_classical, solve_unlimited
from .errors import HbgError, InvalidConfigError
from .explore import (
    AdvantageCatalog,
    SweepSpec,
    detect_boundaries,
    search_shoes,
    sweep,
)
from .game import GameMatrix
from .hyperbit import DEFAULT_RESTARTS, solve_hyperbit, strategy_from_solution
from .sim import verify_strategy
from .solutions import StrategySolution

CACHE_ENV = "HBG_CACHE_DIR"
_CACHE_FILE = "dp_cache.json"


# ─── Plumbing ────────────────────────────────────────────────────────────────


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_input(path: str) -> tuple[dict, str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(
            f"input file is not valid JSON: {exc}", path=path
        ) from exc


def _write_outputs(
    args: argparse.Namespace,
    outputs: dict[str, str],
    input_texts: dict[str, str],
) -> None:
    """Write every output file plus one manifest beside the primary output."""
    for path, text in outputs.items():
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    primary = args.output
    parameters = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("func", "input", "output") and value is not None
    }
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:],
        "parameters": parameters,
        "inputs": {
            path: _sha256(text.encode()) for path, text in sorted(input_texts.items())
        },
        "outputs": {
            path: _sha256(text.encode()) for path, text in sorted(outputs.items())
        },
        "versions": {
            "artifact": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
    }
    with open(primary + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(_dumps(manifest))


def _emit(args: argparse.Namespace, text: str, input_texts: dict[str, str]) -> None:
    if args.output:
        _write_outputs(args, {args.output: text}, input_texts)
    else:
        sys.stdout.write(text)


def _cache_path() -> str | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    return os.path.join(root, _CACHE_FILE)


def _load_dp_cache() -> None:
    path = _cache_path()
    if path is None or not os.path.exists(path):
        return
    try:
        with open(path, encoding="utf-8") as fh:
            blackjack.load_caches(json.load(fh))
    except (json.JSONDecodeError, HbgError, ValueError, KeyError):
        blackjack.clear_caches()  # corrupt cache: recompute from scratch


def _save_dp_cache() -> None:
    path = _cache_path()
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(blackjack.dump_caches()))


# ─── Shared solution assembly ────────────────────────────────────────────────


def _three_solutions(game: GameMatrix, seed: int, restarts: int) -> dict:
    unlimited = solve_unlimited(game)
    classical = solve_classical(game)
    hyperbit = solve_hyperbit(game, seed=seed, restarts=restarts)
    return {
        "I_U": unlimited.value,
        "I_C": classical.value,
        "I_H": hyperbit.value,
        "advantage": hyperbit.value - classical.value,
        "solutions": {
            "unlimited": unlimited.to_json(),
            "classical": classical.to_json(),
            "hyperbit": hyperbit.to_json(),
        },
    }


# ─── Commands ────────────────────────────────────────────────────────────────


def _cmd_value(args: argparse.Namespace) -> int:
    obj, text = _read_input(args.input)
    game = GameMatrix.from_json(obj)
    payload = {"game": game.to_json()}
    payload.update(_three_solutions(game, args.seed, args.restarts))
    _emit(args, _dumps(payload), {args.input: text})
    return 0


def _cmd_blackjack(args: argparse.Namespace) -> int:
    obj, text = _read_input(args.input)
    cfg = RoundConfig.from_json(obj)
    _load_dp_cache()
    game = build_game(cfg)
    payload = {"round": cfg.to_json(), "game": game.to_json()}
    payload.update(_three_solutions(game, args.seed, args.restarts))
    _emit(args, _dumps(payload), {args.input: text})
    _save_dp_cache()
    return 0


def _sweep_csv(points) -> str:
    lines = ["t,I_U,I_C,I_H"]
    for p in points:
        lines.append(
            f"{p.t:.17g},{p.unlimited:.17g},{p.classical:.17g},{p.hyperbit:.17g}"
        )
    return "\n".join(lines) + "\n"


def _cmd_sweep(args: argparse.Namespace) -> int:
    obj, text = _read_input(args.input)
    merged = dict(obj)
    if args.t_min is not None:
        merged["t_min"] = args.t_min
    if args.t_max is not None:
        merged["t_max"] = args.t_max
    if args.step is not None:
        merged["step"] = args.step
    for key in ("t_min", "t_max", "step"):
        if key not in merged:
            raise InvalidConfigError(
                f"sweep needs {key} (in the input file or as a flag)", missing=key
            )
    spec = SweepSpec.from_json(merged)
    points = sweep(spec, seed=args.seed, restarts=args.restarts)
    boundaries = detect_boundaries(spec)
    csv_text = _sweep_csv(points)
    report = _dumps(
        {
            "boundaries": [b.to_json() for b in boundaries],
            "points": [p.to_json() for p in points],
        }
    )
    if args.output:
        _write_outputs(
            args,
            {args.output: csv_text, args.output + ".boundaries.json": report},
            {args.input: text},
        )
    else:
        sys.stdout.write(csv_text)
    return 0


def _parse_upcards(raw: str | None) -> tuple[str, ...] | None:
    if raw is None:
        return None
    return tuple(normalize_card(part) for part in raw.split(",") if part.strip())


def _cmd_search(args: argparse.Namespace) -> int:
    _load_dp_cache()
    checkpoint = args.output + ".checkpoint.jsonl" if args.output else None
    catalog = search_shoes(
        shoe_size=args.size,
        bob_upcards=_parse_upcards(args.bob_upcards),
        dealer_upcards=_parse_upcards(args.dealer_upcards),
        threshold=args.threshold,
        seed=args.seed,
        restarts=args.restarts,
        checkpoint_path=checkpoint,
        workers=args.workers,
    )
    _emit(args, catalog.to_csv(), {})
    _save_dp_cache()
    return 0


def _unpack_solution(obj: dict) -> tuple[StrategySolution, tuple | None, tuple | None]:
    """Accept a bare solution, a {solution, labels} envelope, or a full
    value/blackjack output (using its hyperbit solution and game labels)."""
    row_labels = col_labels = None
    if "solutions" in obj:
        game = GameMatrix.from_json(obj["game"]) if "game" in obj else None
        if game is not None:
            row_labels, col_labels = game.row_labels, game.col_labels
        obj = obj["solutions"]["hyperbit"]
    elif "solution" in obj:
        row_labels = tuple(obj["row_labels"]) if "row_labels" in obj else None
        col_labels = tuple(obj["col_labels"]) if "col_labels" in obj else None
        obj = obj["solution"]
    solution = StrategySolution.from_json(obj)
    if solution.regime != "hyperbit":
        raise InvalidConfigError(
            f"circuits require a hyperbit solution, got regime {solution.regime!r}"
        )
    return solution, row_labels, col_labels


def _cmd_circuit(args: argparse.Namespace) -> int:
    obj, text = _read_input(args.input)
    solution, row_labels, col_labels = _unpack_solution(obj)
    strategy = strategy_from_solution(solution)
    circuit = build_circuit(strategy, row_labels, col_labels)
    _emit(args, _dumps(circuit.to_json()), {args.input: text})
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    obj, text = _read_input(args.input)
    if "circuit" not in obj or "solution" not in obj:
        raise InvalidConfigError(
            'simulate input must hold "circuit" and "solution" objects',
            keys=sorted(obj),
        )
    circuit = CircuitSpec.from_json(obj["circuit"])
    solution = StrategySolution.from_json(obj["solution"])
    strategy = strategy_from_solution(solution)
    report = verify_strategy(strategy, circuit, tolerance=args.tolerance)
    _emit(args, report.dumps(), {args.input: text})
    return 0


def _cmd_analytic32(args: argparse.Namespace) -> int:
    from .game import canonicalize_3x2

    obj, text = _read_input(args.input)
    game = GameMatrix.from_json(obj)
    canonical, transform = canonicalize_3x2(game)
    analysis = solve_3x2(canonical)
    payload = {
        "canonical_C": [list(row) for row in np.asarray(canonical.c)],
        "row_permutation": list(transform.row_permutation),
        "col_permutation": list(transform.col_permutation),
        "col_negations": list(transform.col_negations),
        "analysis": analysis.to_json(),
    }
    _emit(args, _dumps(payload), {args.input: text})
    return 0


_SCHEMA_KEYS = (
    ("round", ("bob_upcard", "dealer_upcard", "shoe")),
    ("game", ("C",)),
    ("sweep", ("A", "B")),
    ("solution", ("regime",)),
    ("circuit", ("qubits_per_player", "prep")),
)


def _detect_schema(obj: dict) -> str | None:
    for name, keys in _SCHEMA_KEYS:
        if any(key in obj for key in keys):
            return name
    return None


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        obj, text = _read_input(args.input)
    except InvalidConfigError as exc:
        sys.stdout.write(
            _dumps({"valid": False, "schema": None, "errors": [exc.message]})
        )
        return 1
    schema = _detect_schema(obj)
    if schema is None:
        sys.stdout.write(
            _dumps(
                {
                    "valid": False,
                    "schema": None,
                    "errors": [
                        "unrecognized input: expected a game, round, sweep,"
                        " solution, or circuit file"
                    ],
                }
            )
        )
        return 1
    parsers = {
        "round": RoundConfig.from_json,
        "game": GameMatrix.from_json,
        "sweep": SweepSpec.from_json,
        "solution": StrategySolution.from_json,
        "circuit": CircuitSpec.from_json,
    }
    try:
        parsers[schema](obj)
    except HbgError as exc:
        sys.stdout.write(
            _dumps({"valid": False, "schema": schema, "errors": [exc.message]})
        )
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        sys.stdout.write(
            _dumps({"valid": False, "schema": schema, "errors": [str(exc)]})
        )
        return 1
    sys.stdout.write(_dumps({"valid": True, "schema": schema, "errors": []}))
    return 0


# ─── Argument parsing ────────────────────────────────────────────────────────


def _add_io(parser: argparse.ArgumentParser, need_input: bool = True) -> None:
    if need_input:
        parser.add_argument("--input", required=True, help="input JSON file")
    parser.add_argument("--output", help="output file (stdout when omitted)")


def _add_solver(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="solver seed")
    parser.add_argument(
        "--restarts", type=int, default=DEFAULT_RESTARTS, help="ascent restarts"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbg",
        description="Hyperbit-game solvers, blackjack model, and searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("value", help="solve a game in all three regimes")
    _add_io(p)
    _add_solver(p)
    p.set_defaults(func=_cmd_value)

    p = sub.add_parser("blackjack", help="build and solve one blackjack round")
    _add_io(p)
    _add_solver(p)
    p.set_defaults(func=_cmd_blackjack)

    p = sub.add_parser("sweep", help="sweep a matrix family C = A + B t")
    _add_io(p)
    _add_solver(p)
    p.add_argument("--t-min", type=float, dest="t_min")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--step", type=float)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("search", help="exhaustive advantage search over shoes")
    _add_io(p, need_input=False)
    _add_solver(p)
    p.add_argument("--size", type=int, required=True, help="shoe size k")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--bob-upcards", dest="bob_upcards")
    p.add_argument("--dealer-upcards", dest="dealer_upcards")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("circuit", help="compile a hyperbit solution to circuits")
    _add_io(p)
    p.set_defaults(func=_cmd_circuit)

    p = sub.add_parser("simulate", help="verify circuits against their strategy")
    _add_io(p)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analytic32", help="closed-form analysis of a 3x2 game")
    _add_io(p)
    p.set_defaults(func=_cmd_analytic32)

    p = sub.add_parser("validate", help="schema-check an input file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HbgError as exc:
        sys.stderr.write(_dumps(exc.to_json()))
        return 1


if __name__ == "__main__":
    sys.exit(main())
