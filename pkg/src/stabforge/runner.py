"""Config-driven experiments and per-module verification suites.

A report is a plain dict; everything except the "timestamp" entry is a
deterministic function of the config.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import __version__
from .batteries import BATTERIES, run_battery
from .codes import build_code_family, code_distance, tester_soundness
from .games import (
    build_game,
    build_perfect_strategy,
    extract_homomorphism,
    extraction_sweep,
    game_value,
    min_dimension_bound,
    perturb_strategy,
    strategy_closeness,
)
from .presentations import (
    Presentation,
    multiplication_table_z2k,
    pauli_mult_like,
    pauli_small,
    presentation_from_parity_check,
    std_z2k,
    z2k_eff_presentation,
)
from .stability import amplification_check, defect, graph_rep, inverse_spectral_gap

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "ConfigError",
    "ExperimentConfig",
    "EXPERIMENTS",
    "run_experiment",
    "write_report",
    "verify_suite",
    "SUITES",
    "build_presentation",
    "parse_edges",
]

CONFIG_SCHEMA_VERSION = 1

# kinds whose results depend on random draws
SAMPLED_KINDS = {"perturbation-sweep", "extraction-sweep", "battery", "value-gap"}


class ConfigError(ValueError):
    """Invalid experiment input; maps to exit code 2."""


@dataclass
class ExperimentConfig:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None
    format: str = "json"
    schema: int = CONFIG_SCHEMA_VERSION

    def validate(self) -> None:
        if self.kind not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {sorted(EXPERIMENTS)}")
        if self.schema != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"config schema {self.schema} is not supported (expected {CONFIG_SCHEMA_VERSION})")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be 'json' or 'csv'")
        if self.kind in SAMPLED_KINDS and self.seed is None:
            raise ConfigError(f"experiment {self.kind!r} is sampled and needs a seed")
        if self.seed is not None and (not isinstance(self.seed, int) or self.seed < 0):
            raise ConfigError("seed must be a nonnegative integer")
        for key in ("budget", "samples", "trials", "points"):
            if key in self.params and int(self.params[key]) <= 0:
                raise ConfigError(f"{key} must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - {"kind", "params", "seed", "out", "format", "schema"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("config needs a 'kind'")
        return cls(
            kind=data["kind"],
            params=dict(data.get("params", {})),
            seed=data.get("seed"),
            out=data.get("out"),
            format=data.get("format", "json"),
            schema=data.get("schema", CONFIG_SCHEMA_VERSION),
        )


def _frac(x) -> str | float:
    return str(x) if isinstance(x, Fraction) else float(x)


def parse_edges(spec) -> list[tuple[int, int]]:
    """Edges from [[0, 1], ...] or the string "0-1,2-3"."""
    if isinstance(spec, str):
        spec = [part.split("-") for part in spec.split(",") if part.strip()]
    try:
        return [(int(a), int(b)) for a, b in spec]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read edge list {spec!r}") from exc


def _code(p: dict):
    return build_code_family(p.get("family", "hadamard"), int(p.get("t", 2)), int(p.get("m", 1)), int(p.get("d", 1)))


def build_presentation(kind: str, p: dict) -> Presentation:
    if kind == "std_z2k":
        return std_z2k(int(p["k"]))
    if kind == "pauli_small":
        return pauli_small(int(p["k"]))
    if kind == "pauli_mult_like":
        return pauli_mult_like(int(p["k"]))
    if kind == "mult_table":
        return multiplication_table_z2k(int(p["k"]))
    if kind == "z2k_eff":
        return z2k_eff_presentation(int(p["t"]), int(p["m"]), int(p["d"]))
    if kind == "parity":
        _, tester = _code(p)
        return presentation_from_parity_check(tester.dense() & 1, mu_spec=p.get("mu", "thirds"))
    raise ConfigError(f"unknown presentation kind {kind!r}")


# experiments: each returns (results, passed, csv_rows or None)


def _exp_code_soundness(p, seed):
    _, tester = _code(p)
    rep = tester_soundness(
        tester,
        budget=int(p.get("budget", 1 << 24)),
        method=p.get("method", "auto"),
        samples=int(p.get("samples", 2000)),
        seed=seed or 0,
    )
    return rep.to_json(), True, None


def _exp_code_distance(p, seed):
    code, tester = _code(p)
    dist = code_distance(code, int(p.get("budget", 1 << 22)))
    res = {"n": code.n, "k": code.k, "q": code.q, "distance": dist, "locality": tester.locality, "name": code.name}
    return res, dist > 0, None


def _exp_graph_defect(p, seed):
    k = int(p.get("k", 4))
    edges = parse_edges(p.get("edges", [[0, 1], [2, 3]]))
    A = graph_rep(k, edges)
    rep = defect(A, std_z2k(k))
    expected = Fraction(len(edges), math.comb(k, 2))
    ok = abs(rep.epsilon - float(expected)) <= 1e-12
    return {"epsilon": rep.epsilon, "expected": str(expected), "dimension": A.dim, "tolerance": 1e-12}, ok, None


def _exp_perfect(kind):
    def run(p, seed):
        params = {"t": int(p.get("t", 2)), "m": int(p.get("m", 1)), "d": int(p.get("d", 1))}
        if kind == "braiding":
            params["code"] = p.get("family", "hadamard")
        game = build_game(kind, **params)
        strat = build_perfect_strategy(game)
        rep = game_value(game, strat)
        pauli_dim = getattr(strat, "pauli_dim", None)
        res = {
            "game": game.name,
            "questions": len(game.questions),
            **rep.to_json(),
            "dimension": strat.dim,
            "pauli_dimension": pauli_dim,
            "tolerance": 1e-9,
        }
        if pauli_dim:
            k = int(math.log2(pauli_dim))
            res["min_dimension_bound"] = min_dimension_bound(k, 0.0)
        return res, abs(rep.omega - 1) <= 1e-9, None

    return run


def _thetas(p) -> np.ndarray:
    return np.geomspace(float(p.get("theta_min", 1e-3)), float(p.get("theta_max", 0.1)), int(p.get("points", 10)))


def _exp_extraction_sweep(p, seed):
    from .games import code_game, perfect_code_strategy

    code, tester = _code({"family": "hadamard", **p})
    game = code_game(code, tester)
    points = extraction_sweep(game, perfect_code_strategy(game, code), _thetas(p), seed)
    factor = float(p.get("constant", 100)) * tester.locality
    rows = [pt.to_json() for pt in points]
    within = all(pt.presentation_defect <= factor * pt.game_deficit + 1e-12 for pt in points)
    defects = [pt.presentation_defect for pt in points]
    monotone = all(a <= b + 1e-15 for a, b in zip(defects, defects[1:]))
    res = {
        "points": rows,
        "bound_factor": factor,
        "within_bound": within,
        "monotone_in_theta": monotone,
        "seed": seed,
        "samples": len(rows),
    }
    return res, within and monotone, rows


def _exp_perturbation_sweep(p, seed):
    kind = p.get("game", "braiding")
    params = {"t": int(p.get("t", 2)), "m": int(p.get("m", 1)), "d": int(p.get("d", 1))}
    if kind in ("braiding", "dls"):
        params["code"] = p.get("family", "hadamard")
    game = build_game(kind, **params)
    S = build_perfect_strategy(game)
    base = game_value(game, S).omega
    rows = []
    ok = True
    for theta in _thetas(p):
        T = perturb_strategy(S, float(theta), seed)
        eps = strategy_closeness(S, T, None, game).delta
        omega = game_value(game, T).omega
        bound = 8 * math.sqrt(eps)
        ok &= abs(base - omega) <= bound + 1e-12
        rows.append({"theta": float(theta), "omega": omega, "closeness": eps, "gap": abs(base - omega), "bound": bound})
    return {"game": game.name, "points": rows, "seed": seed, "samples": len(rows)}, ok, rows


def _exp_battery(p, seed):
    names = sorted(BATTERIES) if p.get("name", "all") == "all" else [p["name"]]
    reports = []
    for name in names:
        if name not in BATTERIES:
            raise ConfigError(f"unknown battery {name!r}")
        reports.append(run_battery(name, int(p["trials"]) if "trials" in p else None, seed))
    return {"batteries": [r.to_json() for r in reports]}, all(r.passed for r in reports), None


def _exp_amplification(p, seed):
    k = int(p.get("k", 3))
    edges = parse_edges(p.get("edges", [[0, 1]]))
    perms = p.get("perms") or [list(g) for g in _symmetric_generators(k)]
    A = graph_rep(k, edges)
    rep = amplification_check(A, perms, std_z2k(k))
    return rep.to_json(), rep.holds, None


def _symmetric_generators(k: int) -> list[tuple[int, ...]]:
    if k < 2:
        return [tuple(range(k))]
    swap = (1, 0, *range(2, k))
    cycle = (*range(1, k), 0)
    return [swap, cycle]


def _exp_kappa(p, seed):
    k = int(p.get("k", 3))
    dist = p.get("dist", "uniform")
    K = 1 << k
    if dist == "uniform":
        mu = [Fraction(1, K)] * K
    elif dist == "basis":
        mu = [Fraction(0)] * K
        for i in range(k):
            mu[1 << i] = Fraction(1, k)
    elif dist == "weights":
        mu = [Fraction(w) for w in p["weights"]]
    else:
        raise ConfigError(f"unknown distribution {dist!r}")
    kappa = inverse_spectral_gap(mu)
    return {"k": k, "dist": dist, "kappa": _frac(kappa), "kappa_float": float(kappa)}, True, None


def _exp_dimbound(p, seed):
    k = int(p.get("k", 4))
    delta = float(p.get("delta", 0.0))
    c = float(p.get("c", 1.0))
    try:
        bound = min_dimension_bound(k, delta, c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return {"k": k, "delta": delta, "c": c, "bound": bound}, True, None


EXPERIMENTS: dict[str, Callable] = {
    "code-soundness": _exp_code_soundness,
    "code-distance": _exp_code_distance,
    "graph-defect": _exp_graph_defect,
    "qld-perfect": _exp_perfect("qld"),
    "braiding-perfect": _exp_perfect("braiding"),
    "extraction-sweep": _exp_extraction_sweep,
    "perturbation-sweep": _exp_perturbation_sweep,
    "battery": _exp_battery,
    "amplification": _exp_amplification,
    "kappa": _exp_kappa,
    "dimbound": _exp_dimbound,
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    cfg.validate()
    start = time.perf_counter()
    try:
        results, passed, rows = EXPERIMENTS[cfg.kind](cfg.params, cfg.seed)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad parameters for {cfg.kind!r}: {exc}") from exc
    report = {
        "schema": CONFIG_SCHEMA_VERSION,
        "version": __version__,
        "config": asdict(cfg),
        "passed": bool(passed),
        "results": results,
        "timestamp": {
            "utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "wall_time_s": round(time.perf_counter() - start, 6),
        },
    }
    if rows is not None:
        report["_rows"] = rows
    return report


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def render_report(report: dict, fmt: str = "json") -> str:
    rows = report.get("_rows")
    if fmt == "csv":
        if not rows:
            raise ConfigError("csv output is only available for sweep experiments")
        return _rows_to_csv(rows)
    clean = {k: v for k, v in report.items() if k != "_rows"}
    return json.dumps(clean, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_report(report: dict, out: str | None, fmt: str = "json") -> str:
    text = render_report(report, fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    return text


# verification suites: lists of (name, check) where check returns (ok, detail)


def _check(name: str, fn: Callable[[], tuple[bool, str]]) -> tuple[str, bool, str]:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported not raised
        return name, False, f"{type(exc).__name__}: {exc}"
    return name, bool(ok), detail


def _suite_fields():
    from .fields import field_trace, find_self_dual_basis, kappa

    def self_dual():
        for t in range(1, 7):
            spec = find_self_dual_basis(t)
            for a in range(spec.q):
                for b in range(spec.q):
                    ab = field_trace(spec.element(spec.mul(a, b)))
                    if ab != kappa(spec.element(a)).dot(kappa(spec.element(b))):
                        return False, f"t={t} a={a} b={b}"
        return True, "tr(ab) = kappa(a).kappa(b) for t <= 6"

    def inverses():
        for t in range(1, 9):
            spec = find_self_dual_basis(t)
            if any(spec.mul(a, spec.inv(a)) != 1 for a in range(1, spec.q)):
                return False, f"t={t}"
        return True, "a * a^-1 = 1 for t <= 8"

    return [("self-dual basis", self_dual), ("inverses", inverses)]


def _suite_codes():
    def hadamard():
        for t in (2, 3):
            code, _ = build_code_family("hadamard", t)
            if (code.n, code.k, code_distance(code)) != (1 << t, t, 1 << (t - 1)):
                return False, f"t={t}"
        return True, "[2^t, t, 2^(t-1)] for t = 2, 3"

    def composed():
        code, _ = build_code_family("composed", 2, 1, 1)
        code.check_invariants()
        return code_distance(code) >= 6, f"[{code.n}, {code.k}, {code_distance(code)}]"

    def soundness():
        _, tester = build_code_family("rm", 2, 1, 1)
        rho = tester_soundness(tester, method="exhaustive").rho
        return rho >= Fraction(1, 6), f"rho = {rho}"

    return [("hadamard parameters", hadamard), ("composition", composed), ("rm soundness", soundness)]


def _suite_presentations():
    from .presentations import abelian_rank, orbit_weights

    def ranks():
        for fam, t in (("hadamard", 1), ("hadamard", 2), ("hadamard", 3), ("composed", 2), ("brm", 2)):
            code, tester = build_code_family(fam, t)
            if abelian_rank(tester.dense()) != code.k:
                return False, fam
        return True, "abelian rank equals code dimension"

    def weights():
        for P in (std_z2k(4), pauli_small(2), z2k_eff_presentation(2, 1, 1)):
            if abs(P.weights.sum() - 1) > 1e-12:
                return False, P.name
        return True, "relation weights sum to 1"

    def orbits():
        _, w = orbit_weights(std_z2k(3), _symmetric_generators(3))
        return np.allclose(sorted(w), [0.5, 0.5]), f"orbit weights {w}"

    return [("abelian rank", ranks), ("weights", weights), ("orbits", orbits)]


def _suite_stability():
    from .stability import observables_from_pvm, pvm_from_commuting_involutions

    def graph():
        rep = defect(graph_rep(4, [(0, 1), (2, 3)]), std_z2k(4))
        return abs(rep.epsilon - 1 / 3) <= 1e-12, f"epsilon = {rep.epsilon}"

    def kappa():
        ok = all(inverse_spectral_gap([Fraction(1, 1 << k)] * (1 << k)) == 1 for k in range(1, 8))
        return ok, "kappa(uniform) = 1"

    def fourier():
        A = graph_rep(3, [])
        gens = [A[i] for i in range(len(A))]
        back = observables_from_pvm(pvm_from_commuting_involutions(gens))[[1 << i for i in range(len(gens))]]
        return np.allclose(back, np.array(gens), atol=1e-9), "round trip on an edgeless graph"

    def batteries():
        reps = [run_battery(name, 100, 0) for name in ("pull-back-purity", "sign-round")]
        return all(r.passed for r in reps), ", ".join(f"{r.name}: {r.violations} violations" for r in reps)

    return [("graph defect", graph), ("spectral gap", kappa), ("fourier", fourier), ("batteries", batteries)]


def _suite_pauli():
    from .pauli import braiding_relation_check, pauli_group_order_check

    def braiding():
        for k in range(1, 5):
            for a, b in itertools.product(range(1 << k), repeat=2):
                if braiding_relation_check(a, b, k) > 1e-12:
                    return False, f"k={k} a={a} b={b}"
        return True, "braiding relations hold for k <= 4"

    def order():
        orders = [pauli_group_order_check(k) for k in range(1, 4)]
        return orders == [2 ** (2 * k + 1) for k in range(1, 4)], f"orders {orders}"

    return [("braiding relations", braiding), ("group order", order)]


def _suite_games():
    def perfect():
        values = {}
        for kind, params in (("braiding", {"t": 2}), ("dls", {"t": 2}), ("commutation", {}), ("anticommutation", {})):
            game = build_game(kind, **params)
            values[kind] = game_value(game, build_perfect_strategy(game)).omega
        return all(abs(v - 1) <= 1e-9 for v in values.values()), json.dumps(values)

    def extraction():
        from .games import code_game, perfect_code_strategy

        code, tester = build_code_family("hadamard", 2)
        game = code_game(code, tester)
        rep = extract_homomorphism(game, perfect_code_strategy(game, code))
        return rep.presentation_defect <= 1e-9, f"defect {rep.presentation_defect}"

    def inequalities():
        reps = [run_battery(name, 100, 0) for name in ("l1-bound", "value-gap", "data-processing")]
        return all(r.passed for r in reps), ", ".join(f"{r.name}: {r.violations} violations" for r in reps)

    return [("perfect strategies", perfect), ("extraction", extraction), ("inequalities", inequalities)]


SUITES: dict[str, Callable[[], list]] = {
    "fields": _suite_fields,
    "codes": _suite_codes,
    "presentations": _suite_presentations,
    "stability": _suite_stability,
    "pauli": _suite_pauli,
    "games": _suite_games,
}


def verify_suite(name: str) -> dict:
    """Run one module's checks (or all of them) and summarize."""
    if name != "all" and name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; expected one of {sorted(SUITES) + ['all']}")
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for suite in names:
        for check_name, fn in SUITES[suite]():
            n, ok, detail = _check(check_name, fn)
            checks.append({"suite": suite, "check": n, "passed": ok, "detail": detail})
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
