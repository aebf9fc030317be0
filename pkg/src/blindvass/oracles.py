"""Combinatorial witnesses the automata are checked against.

Branch hits count how often a branch of the tree passes through ``X``; good
steps count how often a correct chain visits ``X`` and then drops below the
left child.  Both maxima are computed by dynamic programming over levels,
with exhaustive enumerators kept alongside as a second opinion for small
depths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .machines import A1, PLUS, SymbolicWord, counters_of, symbolic_run
from .reductions import check_phases
from .tree_orders import (
    DIRECTIONS,
    L,
    R,
    Node,
    binary_value,
    co_value,
    growth,
    infix_leq,
    infix_lt,
    level,
    node_from_value,
    weight,
)


class ChainError(ValueError):
    pass


def is_good_step(X, v: Node, nxt: Node) -> bool:
    return v in X and infix_leq(nxt, v + L)


@dataclass(frozen=True)
class CorrectChain:
    nodes: Tuple[Node, ...]
    good_steps: FrozenSet[int] = frozenset()

    @classmethod
    def of(cls, nodes: Sequence[Node], X) -> "CorrectChain":
        nodes = tuple(nodes)
        good = frozenset(n for n in range(len(nodes) - 1) if is_good_step(X, nodes[n], nodes[n + 1]))
        return cls(nodes, good)

    def check(self) -> None:
        """Raise :class:`ChainError` unless the chain is correct."""
        if not self.nodes or self.nodes[0] != "":
            raise ChainError("a chain starts at the root")
        for n in range(len(self.nodes) - 1):
            v, w = self.nodes[n], self.nodes[n + 1]
            if len(w) != len(v) + 1:
                raise ChainError(f"step {n}: depth goes {len(v)} -> {len(w)}")
            if not infix_leq(w, v + R):
                raise ChainError(f"step {n}: {w!r} is above {v + R!r}")
        for n in self.good_steps:
            if not 0 <= n < len(self.nodes) - 1 or not infix_leq(self.nodes[n + 1], self.nodes[n] + L):
                raise ChainError(f"step {n} is not good")

    def check_against(self, X) -> None:
        self.check()
        for n in self.good_steps:
            if self.nodes[n] not in X:
                raise ChainError(f"good step {n} at {self.nodes[n]!r}, which is not in X")


@dataclass(frozen=True)
class WitnessReport:
    kind: str  # "branch", "chain" or "run"
    value: int
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "witness": self.witness}


def branch_hits(X, branch: str, phases: int) -> int:
    return sum(1 for n in range(phases) if branch[:n] in X)


def max_branch_hits(X, phases: int) -> Tuple[int, str]:
    """Best number of levels ``n < phases`` where a branch passes through ``X``."""
    check_phases(X, phases)
    if phases == 0:
        return 0, ""
    score = {"": int("" in X)}
    for n in range(1, phases):
        nxt = {}
        for v in level(n):
            nxt[v] = score[v[:-1]] + (v in X)
        score = nxt
    best = max(score, key=lambda v: (score[v], [-ord(c) for c in v]))
    return score[best], best + L


def brute_branch_hits(X, phases: int) -> int:
    check_phases(X, phases)
    return max(branch_hits(X, "".join(b), phases) for b in product(DIRECTIONS, repeat=phases))


def max_good_steps(X, phases: int) -> Tuple[int, CorrectChain]:
    """Most good steps among steps ``0..phases-1`` of a correct chain ``v_0..v_phases``.

    ``best[v]`` is the best count for chains ending at ``v``.  On one level
    the order of nodes is the order of their binary values, so the
    predecessors allowed for ``w`` form a suffix of the previous level and a
    running suffix maximum does the work.
    """
    check_phases(X, phases)
    best = [0]
    back: List[List[Tuple[int, bool]]] = []
    for n in range(phases):
        size = 1 << n
        member = [node_from_value(b, n) in X for b in range(size)]
        # suffix maxima: any predecessor, and members counted with the good-step bonus
        any_max: List[Tuple[int, int]] = [(-1, -1)] * (size + 1)
        good_max: List[Tuple[int, int]] = [(-1, -1)] * (size + 1)
        for b in range(size - 1, -1, -1):
            any_max[b] = max(any_max[b + 1], (best[b], b), key=lambda t: t[0])
            cand = (best[b] + 1, b) if member[b] else (-1, -1)
            good_max[b] = max(good_max[b + 1], cand, key=lambda t: t[0])
        row = []
        links = []
        for c in range(2 * size):
            # w <= u·R  iff  c <= 2b+1;  w <= u·L  iff  c <= 2b
            plain = any_max[min(c // 2, size)] if c < 2 * size else (-1, -1)
            bonus = good_max[(c + 1) // 2] if (c + 1) // 2 < size else (-1, -1)
            if bonus[0] > plain[0]:
                row.append(bonus[0])
                links.append((bonus[1], True))
            else:
                row.append(plain[0])
                links.append((plain[1], False))
        best = row
        back.append(links)
    end = max(range(len(best)), key=lambda b: best[b])
    values = [end]
    for n in range(phases - 1, -1, -1):
        values.append(back[n][values[-1]][0])
    values.reverse()
    nodes = [node_from_value(b, n) for n, b in enumerate(values)]
    chain = CorrectChain.of(nodes, X)
    assert len(chain.good_steps) == best[end], (chain, best[end])
    return best[end], chain


def iter_correct_chains(phases: int) -> Iterator[Tuple[Node, ...]]:
    """Every correct chain ``v_0..v_phases``, found by plain search."""

    def grow(chain):
        if len(chain) == phases + 1:
            yield tuple(chain)
            return
        top = chain[-1] + R
        for w in level(len(chain)):
            if infix_leq(w, top):
                chain.append(w)
                yield from grow(chain)
                chain.pop()

    yield from grow([""])


def brute_good_steps(X, phases: int) -> int:
    check_phases(X, phases)
    return max(len(CorrectChain.of(c, X).good_steps) for c in iter_correct_chains(phases))


def chain_from_descending(xs: Sequence[Node], X=None) -> CorrectChain:
    """Fill in a correct chain through a descending sequence of nodes.

    ``xs`` must be strictly decreasing in the infix order with strictly
    increasing depths.  Level ``n`` of the chain is the length-``n`` prefix of
    the first ``x_i`` at least ``n`` deep; the chain stops at the depth of the
    last ``x_i``.
    """
    if not xs:
        raise ChainError("need at least one node")
    for a, b in zip(xs, xs[1:]):
        if len(b) <= len(a):
            raise ChainError(f"depths must increase: {a!r} then {b!r}")
        if not infix_lt(b, a):
            raise ChainError(f"not descending: {b!r} is not below {a!r}")
    if X is not None:
        for x in xs:
            if x not in X:
                raise ChainError(f"{x!r} is not in X")
    nodes = []
    i = 0
    for n in range(len(xs[-1]) + 1):
        if n > len(xs[i]):
            i += 1
        nodes.append(xs[i][:n])
    if X is None:
        good = frozenset(len(x) for x in xs[:-1])
        chain = CorrectChain(tuple(nodes), good)
    else:
        chain = CorrectChain.of(nodes, X)
    chain.check()
    return chain


def decode_block(kind: str, phase: int, block) -> Tuple[Node, str]:
    """Recover ``(v, d)`` from a block of the encoded word, checking its numbers."""
    n = phase
    if kind == A1:
        (dec,), (inc,) = block.dec, block.inc
        v = node_from_value(dec // growth(n - 1), n)
        vd = node_from_value(inc // growth(n), n + 1)
        ok = weight(v) == dec and weight(vd) == inc
    else:
        v = node_from_value(block.dec[0], n)
        vd = node_from_value(block.inc[0], n + 1)
        ok = (binary_value(v), co_value(v)) == block.dec and (binary_value(vd), co_value(vd)) == block.inc
    if not ok or vd[:-1] != v:
        raise ValueError(f"phase {phase}: block {block} does not encode a node")
    return v, vd[-1]


def chosen_block_trace(kind: str, w: SymbolicWord, phases: Optional[int] = None, cap: Optional[int] = None,
                       X=None) -> WitnessReport:
    """A best run on ``w`` as its chosen blocks, decoded back into tree nodes.

    For ``a1`` the nodes form a correct chain whose good steps include every
    accepting block; for ``a2`` they spell a branch.
    """
    counters_of(kind)
    phases = len(w.phases) if phases is None else phases
    run = symbolic_run(kind, w, phases, cap)
    if run.visits is None:
        return WitnessReport("run", 0, {"blocks": [], "full_run": False})
    chosen = [w.phases[n][j] for n, j in enumerate(run.blocks)]
    decoded = [decode_block(kind, n, b) for n, b in enumerate(chosen)]
    accepting = [n for n, b in enumerate(chosen) if b.sign == PLUS]
    witness: Dict[str, Any] = {
        "blocks": list(run.blocks),
        "accepting_phases": accepting,
        "nodes": [v for v, _ in decoded],
        "directions": [d for _, d in decoded],
    }
    if kind == A1:
        nodes = [v for v, _ in decoded] + ([decoded[-1][0] + decoded[-1][1]] if decoded else [""])
        if X is not None:
            chain = CorrectChain.of(nodes, X)
        else:
            chain = CorrectChain(tuple(nodes), frozenset(n for n in accepting if infix_leq(nodes[n + 1], nodes[n] + L)))
        chain.check()
        # every accepting block is a good step, and a best run cannot have more good steps than blocks
        assert set(accepting) <= chain.good_steps, (accepting, chain)
        witness["chain"] = list(chain.nodes)
        witness["good_steps"] = sorted(chain.good_steps)
    else:
        branch = "".join(d for _, d in decoded)
        for n, (v, _) in enumerate(decoded):
            assert v == branch[:n]
        witness["branch"] = branch
    return WitnessReport("run", run.visits, witness)
