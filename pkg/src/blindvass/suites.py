"""Cross-validation suites and the benchmark, producing JSON/CSV reports."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
import random
import time
from dataclasses import asdict, dataclass, field
from functools import cmp_to_key
from typing import Callable, Dict, List, Optional, Tuple

from . import oracles, tree_orders as T
from .machines import (
    A1,
    A2,
    DEFAULT_LETTER_BUDGET,
    build,
    phase_frontiers,
    render_runs,
    render_word,
    symbolic_max_visits,
)
from .reductions import (
    FiniteOrder,
    HashedTreeSet,
    TreeSet,
    all_treesets,
    alpha1_visits,
    encode,
    full_treeset,
    left_comb,
    order_to_tree,
    random_treeset,
    right_comb,
)
from .vass import brute_force_visits, max_accepting_visits

log = logging.getLogger(__name__)

SUITES = ("t1", "t2", "cross", "invariants", "orders", "a2law", "extremal")

# below this depth the t1/t2 suites enumerate every tree set
EXHAUSTIVE_DEPTH = 2


@dataclass
class ExperimentConfig:
    suite: str
    max_depth: int = 4
    samples: int = 500
    seed: int = 0
    letter_budget: int = DEFAULT_LETTER_BUDGET
    out: Optional[str] = None
    p: float = 0.5
    # orders suite: also run every order of this size when set
    big_order_size: Optional[int] = None


@dataclass
class Report:
    suite: str
    config: dict
    records: List[dict] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.records if not r["ok"])

    @property
    def passed(self) -> int:
        return len(self.records) - self.failed

    def add(self, case: dict, ok: bool, **data) -> dict:
        blob = json.dumps(case, sort_keys=True, default=str).encode()
        rec = {"digest": hashlib.sha256(blob).hexdigest()[:16], "case": case, "ok": bool(ok), **data}
        self.records.append(rec)
        return rec

    def failures(self) -> List[dict]:
        return [r for r in self.records if not r["ok"]]

    def to_json(self, with_timings: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "config": self.config,
            "passed": self.passed,
            "failed": self.failed,
            "records": sorted(self.records, key=lambda r: (r["digest"], json.dumps(r["case"], sort_keys=True))),
        }
        if with_timings:
            out["timings"] = self.timings
        return out

    def dumps(self, with_timings: bool = True) -> str:
        return json.dumps(self.to_json(with_timings), sort_keys=True, indent=1, default=str)


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d.pop("out")
    return d


def shrink(X: TreeSet, phases: int, fails: Callable[[TreeSet, int], bool]) -> Tuple[TreeSet, int]:
    """Greedily drop phases, depth and members while ``fails`` keeps holding."""
    changed = True
    while changed:
        changed = False
        if phases > 0 and fails(X, phases - 1):
            phases -= 1
            changed = True
            continue
        if X.depth > max(phases - 1, 0):
            smaller = TreeSet.of(X.depth - 1, (v for v in X.members if len(v) < X.depth))
            if fails(smaller, phases):
                X, changed = smaller, True
                continue
        for v in sorted(X.members):
            smaller = X.with_membership(v, False)
            if fails(smaller, phases):
                X, changed = smaller, True
                break
    return X, phases


def _tree_cases(cfg: ExperimentConfig, rng: random.Random) -> List[TreeSet]:
    if cfg.max_depth <= EXHAUSTIVE_DEPTH:
        return list(all_treesets(cfg.max_depth))
    cases = list(all_treesets(EXHAUSTIVE_DEPTH))
    d = cfg.max_depth
    cases += [TreeSet.of(d), full_treeset(d), left_comb(d), right_comb(d)]
    cases += [random_treeset(rng, d, cfg.p) for _ in range(cfg.samples)]
    return cases


def _biconditional_suite(cfg: ExperimentConfig, kind: str) -> Report:
    """Engine visits >= K iff oracle count >= K, for every N <= depth+1 and K <= N."""
    report = Report(cfg.suite, _config_dict(cfg))
    rng = random.Random(cfg.seed)
    oracle = oracles.max_good_steps if kind == A1 else oracles.max_branch_hits
    vass = build(kind)

    def mismatches(X: TreeSet, n: int) -> List[int]:
        w = encode(kind, X, n)
        target = oracle(X, n)[0]
        return [k for k in range(n + 1) if (symbolic_max_visits(kind, w, n, k) >= k) != (target >= k)]

    start = time.perf_counter()
    for X in _tree_cases(cfg, rng):
        per_phase = []
        bad = []
        for n in range(X.depth + 2):
            w = encode(kind, X, n)
            value, witness = oracle(X, n)
            engine = symbolic_max_visits(kind, w, n, n)
            wrong = mismatches(X, n)
            trace = oracles.chosen_block_trace(kind, w, n, n, X)
            entry = {"phases": n, "engine": engine, "oracle": value, "mismatched_K": wrong}
            if kind == A1:
                witness.check_against(X)
                ok_trace = len(trace.witness["good_steps"]) == engine == trace.value
            else:
                ok_trace = oracles.branch_hits(X, trace.witness["branch"], n) == engine
                ok_trace &= oracles.branch_hits(X, witness, n) == value
            if X.depth <= EXHAUSTIVE_DEPTH and n <= 3:
                entry["brute"] = brute_force_visits(vass, render_word(w, budget=cfg.letter_budget), n)
                ok_trace &= entry["brute"] == engine
            if wrong or not ok_trace:
                bad.append(n)
            per_phase.append(entry)
        rec = report.add({"tree": X.to_json()}, not bad, results=per_phase)
        if bad:
            Xs, ns = shrink(X, bad[0], lambda Y, m: bool(mismatches(Y, m)))
            rec["reproduction"] = {"tree": Xs.to_json(), "phases": ns}
    report.timings["total_s"] = time.perf_counter() - start
    return report


def suite_t1(cfg: ExperimentConfig) -> Report:
    return _biconditional_suite(cfg, A2)


def suite_t2(cfg: ExperimentConfig) -> Report:
    return _biconditional_suite(cfg, A1)


def suite_cross(cfg: ExperimentConfig, a1_depth: Optional[int] = None, a2_depth: Optional[int] = None) -> Report:
    """Block-level executor against the letter-level engine on rendered words.

    ``max_depth`` bounds the one-counter sets; two-counter sets go two levels
    deeper since their words stay short.
    """
    report = Report(cfg.suite, _config_dict(cfg))
    rng = random.Random(cfg.seed)
    depths = {A1: cfg.max_depth if a1_depth is None else a1_depth, A2: cfg.max_depth + 2 if a2_depth is None else a2_depth}
    start = time.perf_counter()
    for kind, dmax in depths.items():
        vass = build(kind)
        cases = [TreeSet.of(dmax), full_treeset(dmax), left_comb(dmax), right_comb(dmax)]
        for i in range(cfg.samples):
            d = dmax if i % 2 == 0 else rng.randint(0, dmax)
            cases.append(random_treeset(rng, d, cfg.p))
        for X in cases:
            rows = []
            ok = True
            for n in range(X.depth + 2):
                w = encode(kind, X, n)
                letters = render_runs(w, budget=cfg.letter_budget)
                for k in range(X.depth + 1):
                    sym = symbolic_max_visits(kind, w, n, k)
                    let = max_accepting_visits(vass, letters, k)
                    row = {"phases": n, "K": k, "symbolic": sym, "letters": let}
                    if X.depth <= 2:
                        row["brute"] = brute_force_visits(vass, letters, k)
                        ok &= row["brute"] == let
                    ok &= sym == let
                    rows.append(row)
            rec = report.add({"automaton": kind, "tree": X.to_json()}, ok, results=rows)
            if not ok:
                rec["reproduction"] = {"tree": X.to_json(), "phases": X.depth + 1}
    report.timings["total_s"] = time.perf_counter() - start
    return report


def _pairs_check(depth: int, rel: Callable[[str, str], bool]) -> Tuple[bool, Optional[list]]:
    for n in range(depth + 1):
        nodes = list(T.level(n))
        for u in nodes:
            for v in nodes:
                if not rel(u, v):
                    return False, [u, v]
    return True, None


def suite_invariants(cfg: ExperimentConfig, weight_depth: int = 10, total_depth: int = 8,
                     density_depth: int = 6) -> Report:
    report = Report(cfg.suite, _config_dict(cfg))

    def timed(name, fn):
        t0 = time.perf_counter()
        ok, counterexample = fn()
        report.timings[name] = time.perf_counter() - t0
        report.add({"check": name}, ok, counterexample=counterexample)

    weights = {v: T.weight(v) for n in range(weight_depth + 1) for v in T.level(n)}
    timed("lex_infix_coincide", lambda: _pairs_check(weight_depth, lambda u, v: T.lex_leq(u, v) == T.infix_leq(u, v)))
    timed("weight_order", lambda: _pairs_check(weight_depth, lambda u, v: T.infix_leq(u, v) == (weights[u] <= weights[v])))

    def upper_bound():
        for v, w in weights.items():
            if w + T.growth(len(v) - 1) > T.growth(len(v)):
                return False, [v]
        return True, None

    timed("weight_upper_bound", upper_bound)

    def bijections():
        for n in range(weight_depth + 1):
            nodes = list(T.level(n))
            full = set(range(1 << n))
            if {T.binary_value(v) for v in nodes} != full or {T.co_value(v) for v in nodes} != full:
                return False, [n]
        return True, None

    timed("value_bijections", bijections)

    def anti(u, v):
        if u == v:
            return True
        bu, bv, cu, cv = T.binary_value(u), T.binary_value(v), T.co_value(u), T.co_value(v)
        return (bu < bv and cu > cv) != (bu > bv and cu < cv)

    timed("value_anti_monotone", lambda: _pairs_check(weight_depth, anti))

    def growth_closed_form():
        for n in range(-1, 64):
            if T.growth(n) != 1 << (n * (n + 1) // 2):
                return False, [n]
        return True, None

    timed("growth_closed_form", growth_closed_form)

    def totality():
        nodes = list(T.nodes_up_to(total_depth))
        # a relation that matches position order in some listing is a linear order
        listing = sorted(nodes, key=cmp_to_key(lambda u, v: -1 if u != v and T.infix_leq(u, v) else (0 if u == v else 1)))
        pos = {v: i for i, v in enumerate(listing)}
        for u in nodes:
            for v in nodes:
                if T.infix_leq(u, v) != (pos[u] <= pos[v]):
                    return False, [u, v]
        return True, None

    timed("infix_linear_order", totality)

    def density():
        shallow = list(T.nodes_up_to(density_depth))
        deep = sorted(T.nodes_up_to(density_depth + 2), key=len, reverse=True)
        for u in shallow:
            for w in shallow:
                if T.infix_lt(u, w) and not any(T.infix_lt(u, z) and T.infix_lt(z, w) for z in deep):
                    return False, [u, w]
        return True, None

    timed("infix_density", density)
    return report


def _perturb_outside(rank: List[int], n: int, rng: random.Random) -> List[int]:
    """A ranking agreeing with ``rank`` on ``0..n`` and shuffled elsewhere."""
    inside = sorted(range(n + 1), key=lambda i: rank[i])
    order = list(inside)
    for i in range(n + 1, len(rank)):
        order.insert(rng.randint(0, len(order)), i)
    out = [0] * len(rank)
    for r, i in enumerate(order):
        out[i] = r
    return out


def suite_orders(cfg: ExperimentConfig) -> Report:
    report = Report(cfg.suite, _config_dict(cfg))
    rng = random.Random(cfg.seed)
    sizes = list(range(1, cfg.max_depth + 2))
    if cfg.big_order_size and cfg.big_order_size not in sizes:
        sizes.append(cfg.big_order_size)
    start = time.perf_counter()
    for size in sizes:
        bad = 0
        for rank in itertools.permutations(range(size)):
            o = FiniteOrder.from_ranking(rank)
            xs, _ = order_to_tree(o)
            ok = all(len(x) == k for k, x in enumerate(xs))
            ok &= all(T.infix_leq(xs[i], xs[j]) == o.leq[i][j] for i in range(size) for j in range(size))
            if size > 1:
                n = rng.randrange(size - 1)
                other, _ = order_to_tree(FiniteOrder.from_ranking(_perturb_outside(list(rank), n, rng)))
                ok &= other[: n + 1] == xs[: n + 1]
            if not ok:
                bad += 1
                report.add({"size": size, "rank": list(rank)}, False, nodes=xs)
        report.add({"size": size, "orders": "all"}, bad == 0, failures=bad)
        report.timings[f"size_{size}_s"] = time.perf_counter() - start
    return report


def suite_a2law(cfg: ExperimentConfig, depth: int = 6) -> Report:
    """Reachable two-counter points before phase n are exactly (b(v), b'(v)) for v on level n."""
    report = Report(cfg.suite, _config_dict(cfg))
    rng = random.Random(cfg.seed)
    start = time.perf_counter()
    for _ in range(cfg.samples):
        X = random_treeset(rng, depth, cfg.p)
        w = encode(A2, X, depth + 1)
        ok = True
        for n, frontier in enumerate(phase_frontiers(A2, w, depth + 1, depth + 1)):
            counters = {c for c, _ in frontier}
            ok &= all(c1 + c2 == (1 << n) - 1 for c1, c2 in counters)
            ok &= counters == {(T.binary_value(v), T.co_value(v)) for v in T.level(n)}
        report.add({"tree": X.to_json()}, ok)
    report.timings["total_s"] = time.perf_counter() - start
    return report


def suite_extremal(cfg: ExperimentConfig, top: int = 8) -> Report:
    report = Report(cfg.suite, _config_dict(cfg))
    for n in range(top + 1):
        for name, X, check in (("left", left_comb(n), lambda v: v == n), ("right", right_comb(n), lambda v: v <= 1)):
            value, chain = oracles.max_good_steps(X, n)
            engine = symbolic_max_visits(A1, encode(A1, X, n), n, n)
            report.add({"comb": name, "N": n}, check(value) and engine == value, oracle=value, engine=engine,
                       chain=list(chain.nodes))
    return report


def run_suite(cfg: ExperimentConfig) -> Report:
    fn = {
        "t1": suite_t1,
        "t2": suite_t2,
        "cross": suite_cross,
        "invariants": suite_invariants,
        "orders": suite_orders,
        "a2law": suite_a2law,
        "extremal": suite_extremal,
    }.get(cfg.suite)
    if fn is None:
        raise ValueError(f"unknown suite {cfg.suite!r}; expected one of {', '.join(SUITES)}")
    log.info("running suite %s", cfg.suite)
    return fn(cfg)


BENCH_SYMBOLIC = (0, 5, 10, 20, 30, 40)
BENCH_ORACLE = (0, 4, 8, 12)


def bench(cfg: ExperimentConfig, symbolic_phases=BENCH_SYMBOLIC, oracle_phases=BENCH_ORACLE) -> Tuple[Report, str]:
    report = Report("bench", _config_dict(cfg))
    rng = random.Random(cfg.seed)
    rows = []
    for n in symbolic_phases:
        X = HashedTreeSet(max(n - 1, 0), seed=cfg.seed, p=cfg.p)
        t0 = time.perf_counter()
        visits, peak = alpha1_visits(X, n, n)
        dt = time.perf_counter() - t0
        rows.append(("symbolic_a1", n, dt, visits, peak.bit_length()))
    for n in oracle_phases:
        X = random_treeset(rng, max(n - 1, 0), cfg.p)
        t0 = time.perf_counter()
        g, _ = oracles.max_good_steps(X, n)
        rows.append(("oracle_good_steps", n, time.perf_counter() - t0, g, 0))
        t0 = time.perf_counter()
        h, _ = oracles.max_branch_hits(X, n)
        rows.append(("oracle_branch_hits", n, time.perf_counter() - t0, h, 0))
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["task", "phases", "seconds", "value", "counter_bits"])
    for task, n, dt, value, bits in rows:
        out.writerow([task, n, f"{dt:.6f}", value, bits])
        report.add({"task": task, "phases": n}, True, value=value, counter_bits=bits)
        report.timings[f"{task}_{n}_s"] = dt
    return report, buf.getvalue()
