"""Command line entry point.

    stabforge <command> [<action>] [--config file.json | flags] --seed N --out path

Exit status: 0 on success, 1 when an invariant check fails, 2 on invalid input.
Errors go to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .codes import CODE_FAMILIES, build_code_family, code_distance, tester_soundness
from .games import (
    GAME_KINDS,
    GAME_REGISTRY,
    Game,
    StrategyValidationError,
    SynchronousStrategy,
    build_game,
    build_perfect_strategy,
    game_value,
    min_dimension_bound,
    strategy_registry,
)
from .operators import UnitaryAssignment
from .presentations import Presentation, presentation_length, sample_relation_indices, std_z2k
from .runner import (
    ConfigError,
    ExperimentConfig,
    EXPERIMENTS,
    SUITES,
    build_presentation,
    parse_edges,
    render_report,
    run_experiment,
    verify_suite,
)
from .stability import defect, graph_rep, inverse_spectral_gap

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2

PRESENTATION_KINDS = ("std_z2k", "pauli_small", "pauli_mult_like", "mult_table", "z2k_eff", "parity")


class InvariantFailure(Exception):
    def __init__(self, payload: dict):
        super().__init__(payload.get("message", "invariant failed"))
        self.payload = payload


def _emit(obj: Any, out: str | None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def _load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=CODE_FAMILIES, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--d", type=int, default=None)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys fill in unset flags")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stabforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    code = sub.add_parser("code", help="build codes and measure them").add_subparsers(dest="action", required=True)
    for name in ("build", "soundness", "distance"):
        p = code.add_parser(name)
        _code_args(p)
        _common(p)
        if name == "soundness":
            p.add_argument("--method", choices=("auto", "exhaustive", "sampled"), default=None)
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--budget", type=int, default=None)

    pres = sub.add_parser("pres", help="group presentations").add_subparsers(dest="action", required=True)
    for name in ("build", "length", "sample"):
        p = pres.add_parser(name)
        p.add_argument("--kind", choices=PRESENTATION_KINDS, default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--mu", default=None, help="relation weights for parity presentations: thirds or game")
        _code_args(p)
        _common(p)
        if name == "sample":
            p.add_argument("--count", type=int, default=None)

    stab = sub.add_parser("stab", help="defects and stability quantities").add_subparsers(dest="action", required=True)
    p = stab.add_parser("defect")
    p.add_argument("--pres", default=None, help="presentation JSON")
    p.add_argument("--assignment", default=None, help="assignment JSON")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default=None)
    p.add_argument("--samples", type=int, default=None)
    _common(p)
    p = stab.add_parser("graph-rep")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--edges", default=None, help='edge list such as "0-1,2-3"')
    _common(p)
    p = stab.add_parser("kappa")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--dist", choices=("uniform", "basis"), default=None)
    _common(p)

    game = sub.add_parser("game", help="nonlocal games").add_subparsers(dest="action", required=True)
    for name in ("build", "perfect"):
        p = game.add_parser(name)
        p.add_argument("--kind", choices=GAME_KINDS, default=None)
        p.add_argument("--code", dest="family", choices=("hadamard", "brm"), default=None)
        p.add_argument("--t", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--d", type=int, default=None)
        _common(p)
    p = game.add_parser("value")
    p.add_argument("--game", default=None, help="game JSON")
    p.add_argument("--strategy", default=None, help="strategy JSON")
    _common(p)
    p = game.add_parser("dimbound")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    _common(p)

    p = sub.add_parser("run", help="run an experiment from a config")
    p.add_argument("--kind", choices=sorted(EXPERIMENTS), default=None)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="experiment parameter (JSON value)")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    _common(p)

    p = sub.add_parser("verify", help="run a module's invariant checks")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default=None)
    _common(p)
    return parser


def _merge_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None) or args.command == "run":
        return
    data = _load_json(args.config)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key {key!r} for {args.command} {args.action}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _need(args, name: str, default=None):
    value = getattr(args, name, None)
    if value is None:
        if default is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required")
        return default
    return value


def _code_from(args):
    return build_code_family(_need(args, "family", "hadamard"), _need(args, "t", 2), _need(args, "m", 1), _need(args, "d", 1))


def cmd_code(args) -> int:
    code, tester = _code_from(args)
    if args.action == "build":
        _emit({"code": code.to_json(), "tester": tester.to_json(), "locality": tester.locality}, args.out)
    elif args.action == "distance":
        _emit({"n": code.n, "k": code.k, "q": code.q, "distance": code_distance(code)}, args.out)
    else:
        method = _need(args, "method", "auto")
        if method == "sampled" and args.seed is None:
            raise ConfigError("sampled soundness needs --seed")
        rep = tester_soundness(
            tester,
            budget=_need(args, "budget", 1 << 24),
            method=method,
            samples=_need(args, "samples", 2000),
            seed=args.seed or 0,
        )
        _emit(rep.to_json(), args.out)
    return EXIT_OK


def _presentation_from(args) -> Presentation:
    kind = _need(args, "kind")
    params = {key: getattr(args, key) for key in ("k", "t", "m", "d", "family", "mu") if getattr(args, key, None) is not None}
    if kind == "z2k_eff":
        params = {"t": params.get("t", 2), "m": params.get("m", 1), "d": params.get("d", 1)}
    if kind in ("std_z2k", "pauli_small", "pauli_mult_like", "mult_table") and "k" not in params:
        raise ConfigError("--k is required")
    return build_presentation(kind, params)


def cmd_pres(args) -> int:
    P = _presentation_from(args)
    if args.action == "build":
        _emit(P.to_json(), args.out)
    elif args.action == "length":
        _emit({"name": P.name, "generators": P.n_generators, "relations": len(P), "length": presentation_length(P)}, args.out)
    else:
        if args.seed is None:
            raise ConfigError("sampling needs --seed")
        count = _need(args, "count", 10)
        idx = sample_relation_indices(P, count, args.seed)
        rows = [{"index": int(i), "tag": P.relations[i].tag, "word": [list(l) for l in P.relations[i].word]} for i in idx]
        _emit({"seed": args.seed, "samples": count, "relations": rows}, args.out)
    return EXIT_OK


def cmd_stab(args) -> int:
    if args.action == "defect":
        P = Presentation.from_json(_load_json(_need(args, "pres")))
        A = UnitaryAssignment.from_json(_load_json(_need(args, "assignment")))
        mode = _need(args, "mode", "exhaustive")
        if mode == "sampled" and args.seed is None:
            raise ConfigError("sampled defect needs --seed")
        rep = defect(A, P, mode=mode, samples=_need(args, "samples", 1000), seed=args.seed)
        _emit(rep.to_json(), args.out)
    elif args.action == "graph-rep":
        k = _need(args, "k")
        edges = parse_edges(_need(args, "edges", ""))
        A = graph_rep(k, edges)
        rep = defect(A, std_z2k(k))
        _emit({"assignment": A.to_json(), "edges": edges, "defect": rep.epsilon}, args.out)
    else:
        k = _need(args, "k")
        K = 1 << k
        if _need(args, "dist", "uniform") == "uniform":
            mu = [Fraction(1, K)] * K
        else:
            mu = [Fraction(0)] * K
            for i in range(k):
                mu[1 << i] = Fraction(1, k)
        kappa = inverse_spectral_gap(mu)
        _emit({"k": k, "dist": args.dist or "uniform", "kappa": str(kappa), "kappa_float": float(kappa)}, args.out)
    return EXIT_OK


def _game_from(args) -> Game:
    kind = _need(args, "kind")
    params: dict = {}
    for key in ("t", "m", "d"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    if kind in ("code", "braiding", "dls"):
        params["code"] = _need(args, "family", "hadamard")
        params.setdefault("t", 2)
    if kind == "qld":
        params = {"t": params.get("t", 2), "m": params.get("m", 1), "d": params.get("d", 1)}
    return build_game(kind, **params)


def cmd_game(args) -> int:
    if args.action == "build":
        _emit(_game_from(args).to_json(), args.out)
    elif args.action == "perfect":
        game = _game_from(args)
        strat = build_perfect_strategy(game)
        _emit(strat.to_json(), args.out)
    elif args.action == "value":
        game = Game.from_json(_load_json(_need(args, "game")), GAME_REGISTRY)
        strat = SynchronousStrategy.from_json(_load_json(_need(args, "strategy")), strategy_registry)
        rep = game_value(game, strat)
        _emit({"game": game.name, **rep.to_json(), "dimension": strat.dim}, args.out)
    else:
        k = _need(args, "k")
        delta = _need(args, "delta", 0.0)
        c = _need(args, "c", 1.0)
        _emit({"k": k, "delta": delta, "c": c, "bound": min_dimension_bound(k, delta, c)}, args.out)
    return EXIT_OK


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def cmd_run(args) -> int:
    if args.config:
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        cfg = ExperimentConfig.from_dict(data)
        cfg.params.update(_parse_params(args.param))
        if args.kind is not None:
            cfg.kind = args.kind
    elif args.kind:
        cfg = ExperimentConfig(args.kind, _parse_params(args.param))
    else:
        raise ConfigError("run needs --config or --kind")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    report = run_experiment(cfg)
    _emit(render_report(report, cfg.format), cfg.out)
    if not report["passed"]:
        raise InvariantFailure({"error": "invariant", "message": f"experiment {cfg.kind} reported a failed check"})
    return EXIT_OK


def cmd_verify(args) -> int:
    summary = verify_suite(_need(args, "suite", "all"))
    _emit(summary, args.out)
    if not summary["passed"]:
        failed = [c["check"] for c in summary["checks"] if not c["passed"]]
        raise InvariantFailure({"error": "invariant", "message": "verification failed", "failed": failed})
    return EXIT_OK


COMMANDS = {"code": cmd_code, "pres": cmd_pres, "stab": cmd_stab, "game": cmd_game, "run": cmd_run, "verify": cmd_verify}


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; normalize the status for bad input
        return EXIT_OK if exc.code == 0 else _fail(EXIT_INPUT, {"error": "invalid-input", "message": "could not parse arguments"})
    try:
        _merge_config(args)
        return COMMANDS[args.command](args)
    except StrategyValidationError as exc:
        return _fail(EXIT_INVARIANT, exc.to_json())
    except InvariantFailure as exc:
        return _fail(EXIT_INVARIANT, exc.payload)
    except BrokenPipeError:
        # downstream reader closed early (e.g. `| head`); not an input problem
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (ConfigError, ValueError, KeyError, TypeError, OSError) as exc:
        return _fail(EXIT_INPUT, {"error": "invalid-input", "type": type(exc).__name__, "message": str(exc)})


if __name__ == "__main__":
    sys.exit(main())
