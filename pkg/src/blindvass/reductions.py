"""Finite truncations of the reductions: tree sets to block words, orders to nodes."""

from __future__ import annotations

import hashlib
import json
import random
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .machines import MINUS, PLUS, Block, SymbolicWord
from .tree_orders import (
    DIRECTIONS,
    L,
    Node,
    binary_value,
    check_node,
    co_value,
    growth,
    infix_leq,
    level,
    node_from_value,
    nodes_up_to,
    weight,
)


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class TreeSet:
    """A subset of the binary tree, known on every node of depth ``<= depth``."""

    depth: int
    members: FrozenSet[Node] = frozenset()

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        for v in self.members:
            check_node(v)
            if len(v) > self.depth:
                raise ValueError(f"member {v!r} is deeper than the truncation depth {self.depth}")

    @classmethod
    def of(cls, depth: int, members: Iterable[Node] = ()) -> "TreeSet":
        return cls(depth, frozenset(members))

    def __contains__(self, v: Node) -> bool:
        if len(v) > self.depth:
            raise TruncationError(f"membership of {v!r} is unknown beyond depth {self.depth}")
        return v in self.members

    def __len__(self) -> int:
        return len(self.members)

    def level_members(self, n: int) -> List[Node]:
        return sorted(v for v in self.members if len(v) == n)

    @cached_property
    def _level_values(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for v in self.members:
            out.setdefault(len(v), []).append(binary_value(v))
        for vals in out.values():
            vals.sort()
        return out

    def max_member_at_most(self, n: int, bound: int) -> Optional[int]:
        """Largest binary value ``<= bound`` of a member on level ``n``."""
        vals = self._level_values.get(n, [])
        i = bisect_right(vals, bound)
        return vals[i - 1] if i else None

    def with_membership(self, v: Node, member: bool) -> "TreeSet":
        check_node(v)
        if len(v) > self.depth:
            raise TruncationError(f"{v!r} is deeper than {self.depth}")
        return TreeSet(self.depth, self.members | {v} if member else self.members - {v})

    def to_json(self) -> dict:
        return {"depth": self.depth, "nodes": sorted(self.members, key=lambda v: (len(v), v))}

    @classmethod
    def from_json(cls, data: dict) -> "TreeSet":
        try:
            depth = int(data["depth"])
            nodes = list(data["nodes"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"cannot read tree set: {exc}") from exc
        return cls.of(depth, nodes)

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class HashedTreeSet:
    """Pseudo-random tree set defined on every node up to ``depth`` by hashing.

    Membership of ``v`` is a keyed BLAKE2 draw compared against ``p``; nothing
    is stored, so very deep truncations cost nothing to build.
    """

    depth: int
    seed: int = 0
    p: float = 0.5

    def __contains__(self, v: Node) -> bool:
        if len(v) > self.depth:
            raise TruncationError(f"membership of {v!r} is unknown beyond depth {self.depth}")
        h = hashlib.blake2b(v.encode(), digest_size=8, key=self.seed.to_bytes(8, "little", signed=True))
        return int.from_bytes(h.digest(), "little") < self.p * 2**64

    def max_member_at_most(self, n: int, bound: int) -> Optional[int]:
        for b in range(min(bound, (1 << n) - 1), -1, -1):
            if node_from_value(b, n) in self:
                return b
        return None

    def materialise(self) -> TreeSet:
        return TreeSet.of(self.depth, (v for v in nodes_up_to(self.depth) if v in self))


def random_treeset(rng: random.Random, depth: int, p: float = 0.5) -> TreeSet:
    return TreeSet.of(depth, (v for v in nodes_up_to(depth) if rng.random() < p))


def all_treesets(depth: int) -> Iterable[TreeSet]:
    nodes = list(nodes_up_to(depth))
    for mask in range(1 << len(nodes)):
        yield TreeSet.of(depth, (v for i, v in enumerate(nodes) if mask >> i & 1))


def left_comb(depth: int) -> TreeSet:
    return TreeSet.of(depth, ("L" * n for n in range(depth + 1)))


def right_comb(depth: int) -> TreeSet:
    return TreeSet.of(depth, ("R" * n for n in range(depth + 1)))


def full_treeset(depth: int) -> TreeSet:
    return TreeSet.of(depth, nodes_up_to(depth))


def check_phases(X, phases: int) -> None:
    if phases < 0:
        raise TruncationError("phase count must be non-negative")
    if phases > X.depth + 1:
        raise TruncationError(f"{phases} phases need depth {phases - 1}, tree set is known to depth {X.depth}")


def alpha2_phase(X, n: int) -> Tuple[Block, ...]:
    blocks = []
    for v in level(n):
        sign = PLUS if v in X else MINUS
        for d in DIRECTIONS:
            vd = v + d
            blocks.append(Block(sign, (binary_value(v), co_value(v)), (binary_value(vd), co_value(vd))))
    return tuple(blocks)


def alpha1_phase(X, n: int) -> Tuple[Block, ...]:
    blocks = []
    for v in level(n):
        member = v in X
        for d in DIRECTIONS:
            sign = PLUS if member and d == L else MINUS
            blocks.append(Block(sign, (weight(v),), (weight(v + d),)))
    return tuple(blocks)


def encode_alpha2(X, phases: int) -> SymbolicWord:
    check_phases(X, phases)
    return SymbolicWord(2, tuple(alpha2_phase(X, n) for n in range(phases)))


def encode_alpha1(X, phases: int) -> SymbolicWord:
    check_phases(X, phases)
    return SymbolicWord(1, tuple(alpha1_phase(X, n) for n in range(phases)))


def encode(kind: str, X, phases: int) -> SymbolicWord:
    if kind == "a1":
        return encode_alpha1(X, phases)
    if kind == "a2":
        return encode_alpha2(X, phases)
    raise ValueError(f"unknown automaton {kind!r}")


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteOrder:
    """``leq[i][j]`` holds when ``i`` is below-or-equal ``j``."""

    size: int
    leq: Tuple[Tuple[bool, ...], ...]

    @classmethod
    def from_matrix(cls, leq: Sequence[Sequence]) -> "FiniteOrder":
        return cls(len(leq), tuple(tuple(bool(x) for x in row) for row in leq))

    @classmethod
    def from_ranking(cls, rank: Sequence[int]) -> "FiniteOrder":
        """Order where ``i <= j`` iff ``rank[i] <= rank[j]``."""
        return cls.from_matrix([[rank[i] <= rank[j] for j in range(len(rank))] for i in range(len(rank))])

    def check(self) -> None:
        n = self.size
        if len(self.leq) != n or any(len(row) != n for row in self.leq):
            raise OrderError(f"matrix is not {n}x{n}")
        le = self.leq
        for i in range(n):
            if not le[i][i]:
                raise OrderError(f"reflexivity violated at {i}")
        for i in range(n):
            for j in range(i + 1, n):
                if le[i][j] and le[j][i]:
                    raise OrderError(f"antisymmetry violated: {i} and {j} are below each other")
                if not le[i][j] and not le[j][i]:
                    raise OrderError(f"totality violated: {i} and {j} are incomparable")
        for i in range(n):
            for j in range(n):
                if le[i][j]:
                    for k in range(n):
                        if le[j][k] and not le[i][k]:
                            raise OrderError(f"transitivity violated: {i} <= {j} <= {k} but not {i} <= {k}")

    def to_json(self) -> dict:
        return {"size": self.size, "leq": [[int(x) for x in row] for row in self.leq]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteOrder":
        try:
            size = int(data["size"])
            order = cls.from_matrix(data["leq"])
        except (KeyError, TypeError, ValueError) as exc:
            raise OrderError(f"cannot read order: {exc}") from exc
        if order.size != size:
            raise OrderError(f"declared size {size} but matrix has {order.size} rows")
        return order


def order_to_tree(o: FiniteOrder) -> Tuple[List[Node], TreeSet]:
    """Place ``0, 1, ...`` on nodes of depth ``0, 1, ...`` preserving the order.

    Node ``k`` is the lexicographically least node of depth ``k`` sitting at the
    right place in the infix order relative to nodes ``0..k-1``.
    """
    o.check()
    xs: List[Node] = []
    for n in range(o.size):
        if n == 0:
            xs.append("")
            continue
        for cand in level(n):
            if all(infix_leq(cand, xs[k]) == o.leq[n][k] for k in range(n)):
                xs.append(cand)
                break
        else:
            raise AssertionError(f"no depth-{n} node fits the order at step {n}")
    return xs, TreeSet.of(max(o.size - 1, 0), xs)


def alpha1_visits(X, phases: int, cap: Optional[int] = None) -> Tuple[int, int]:
    """Block-level run of the one-counter automaton on the implicit word for ``X``.

    Never lists a phase.  From counter ``c`` before phase ``n`` the blocks on
    offer are those of level-``n`` nodes ``v`` with ``weight(v) <= c``; the
    counter after a block grows with the value of ``v``, so besides the best
    ``'-'`` block only the best ``'+'`` block (largest member, left child) can
    survive pruning.  That keeps at most one point per visit count.

    Returns ``(visits, largest counter seen)``.
    """
    check_phases(X, phases)
    frontier: Dict[int, int] = {0: 0}  # acc -> largest counter
    peak = 0
    for n in range(phases):
        below, here = growth(n - 1), growth(n)
        top = (1 << n) - 1
        nxt: Dict[int, int] = {}

        def offer(acc, c):
            if nxt.get(acc, -1) < c:
                nxt[acc] = c

        for acc, c in frontier.items():
            bound = min(c // below, top)
            offer(acc, c - below * bound + here * (2 * bound + 1))
            b = X.max_member_at_most(n, bound)
            if b is not None:
                up = acc + 1 if cap is None or acc < cap else acc
                offer(up, c - below * b + here * 2 * b)
        # drop points beaten by one with more visits and a larger counter
        frontier = {}
        best = -1
        for acc in sorted(nxt, reverse=True):
            if nxt[acc] > best:
                frontier[acc] = best = nxt[acc]
        peak = max(peak, best)
    return max(frontier), peak
