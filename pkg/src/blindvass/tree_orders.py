"""Binary-tree nodes, their three orders and the integer weights used by the encoders.

A node is a plain ``str`` over ``{'L', 'R'}``; the root is ``""``.  The
virtual middle direction ``'M'`` only ever shows up as padding inside
:func:`infix_leq`.  ASCII happens to order the three letters as
``L < M < R``, so padded nodes compare correctly as ordinary strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator

L, M, R = "L", "M", "R"
DIRECTIONS = (L, R)

Node = str


def check_node(v: str) -> str:
    if not isinstance(v, str) or v.strip("LR"):
        raise ValueError(f"not a node over {{L,R}}: {v!r}")
    return v


def level(n: int) -> Iterator[Node]:
    """All nodes of depth ``n`` in lexicographic order."""
    if n < 0:
        raise ValueError("negative depth")
    for dirs in product(DIRECTIONS, repeat=n):
        yield "".join(dirs)


def nodes_up_to(depth: int) -> Iterator[Node]:
    for n in range(depth + 1):
        yield from level(n)


def prefix_leq(u: Node, v: Node) -> bool:
    return v.startswith(u)


def lex_leq(u: Node, v: Node) -> bool:
    # str ordering already puts a proper prefix before its extensions
    return u <= v


def infix_key(v: Node, width: int) -> str:
    """``v`` padded with the middle direction to ``width`` symbols."""
    return v.ljust(width, M)


def infix_leq(u: Node, v: Node) -> bool:
    """``u·M^ω <=lex v·M^ω``.

    Past ``max(|u|, |v|)`` both infinite words are ``M^ω``, so comparing the
    padded finite words decides the order exactly.
    """
    width = max(len(u), len(v))
    return u.ljust(width, M) <= v.ljust(width, M)


def infix_lt(u: Node, v: Node) -> bool:
    return u != v and infix_leq(u, v)


def binary_value(v: Node) -> int:
    if not v:
        return 0
    return int(v.translate(_TO_BITS), 2)


_TO_BITS = str.maketrans("LR", "01")


def co_value(v: Node) -> int:
    return (1 << len(v)) - binary_value(v) - 1


def node_from_value(b: int, n: int) -> Node:
    """Inverse of :func:`binary_value` on level ``n``."""
    if not 0 <= b < (1 << n):
        raise ValueError(f"value {b} out of range for level {n}")
    if n == 0:
        return ""
    return format(b, f"0{n}b").translate(_FROM_BITS)


_FROM_BITS = str.maketrans("01", "LR")


@lru_cache(maxsize=None)
def growth(n: int) -> int:
    """``m(-1) = 1`` and ``m(n) = m(n-1) * 2**n``; equals ``2**(n(n+1)/2)``."""
    if n < -1:
        raise ValueError(f"growth is defined for n >= -1, got {n}")
    if n == -1:
        return 1
    return growth(n - 1) << n


def weight(v: Node) -> int:
    return growth(len(v) - 1) * binary_value(v)


@dataclass(frozen=True)
class LevelWeights:
    n: int
    growth_m: int
    weights: Dict[Node, int]

    def check(self) -> None:
        prev = growth(self.n - 1)
        assert self.growth_m == prev << self.n
        for v, w in self.weights.items():
            assert len(v) == self.n
            assert w + prev <= self.growth_m, v


def level_weights(n: int) -> LevelWeights:
    return LevelWeights(n, growth(n), {v: weight(v) for v in level(n)})
