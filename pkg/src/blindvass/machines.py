"""The two block automata, block/phase words and the block-level executor.

Letter table (one ASCII byte per letter)::

    <  d  e  |  i  j  +  -  >  #

``d``/``e`` decrement counters 1/2, ``i``/``j`` increment them, ``#`` ends a
phase.  The one-counter automaton uses only ``d`` and ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .vass import RunLengthWord, Vass

OPEN, BAR, CLOSE, SHARP = "<", "|", ">", "#"
PLUS, MINUS = "+", "-"
DEC_LETTERS = ("d", "e")
INC_LETTERS = ("i", "j")

DEFAULT_LETTER_BUDGET = 10**6

A1, A2 = "a1", "a2"


class LetterBudgetError(ValueError):
    pass


class MalformedWordError(ValueError):
    pass


def _block_alphabet(k: int) -> Tuple[str, ...]:
    return (OPEN, *DEC_LETTERS[:k], BAR, *INC_LETTERS[:k], PLUS, MINUS, CLOSE)


def _build(k: int) -> Vass:
    a0 = _block_alphabet(k)
    zero = (0,) * k
    transitions = [("q0", a, zero, "q0") for a in a0]
    transitions.append(("q0", OPEN, zero, "q1"))
    for i in range(k):
        unit = tuple(1 if j == i else 0 for j in range(k))
        transitions.append(("q1", DEC_LETTERS[i], tuple(-u for u in unit), "q1"))
        transitions.append(("q2", INC_LETTERS[i], unit, "q2"))
    transitions += [
        ("q1", BAR, zero, "q2"),
        ("q2", PLUS, zero, "qa"),
        ("q2", MINUS, zero, "qr"),
        ("qa", CLOSE, zero, "q3"),
        ("qr", CLOSE, zero, "q3"),
    ]
    transitions += [("q3", a, zero, "q3") for a in a0]
    transitions.append(("q3", SHARP, zero, "q0"))
    return Vass.build(
        alphabet=a0 + (SHARP,),
        states=("q0", "q1", "q2", "qa", "qr", "q3"),
        initial="q0",
        accepting={"qa"},
        counters=k,
        transitions=transitions,
    )


def build_a1() -> Vass:
    return _build(1)


def build_a2() -> Vass:
    return _build(2)


def build(kind: str) -> Vass:
    counters_of(kind)
    return {A1: build_a1, A2: build_a2}[kind]()


def counters_of(kind: str) -> int:
    try:
        return {A1: 1, A2: 2}[kind]
    except KeyError:
        raise ValueError(f"unknown automaton {kind!r}; expected a1 or a2") from None


@dataclass(frozen=True)
class Block:
    sign: str
    dec: Tuple[int, ...]
    inc: Tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (PLUS, MINUS):
            raise MalformedWordError(f"bad block sign {self.sign!r}")
        if len(self.dec) != len(self.inc):
            raise MalformedWordError("decrement and increment vectors differ in length")
        if any(x < 0 for x in self.dec + self.inc):
            raise MalformedWordError("block counts must be natural numbers")

    @property
    def accepting(self) -> bool:
        return self.sign == PLUS

    def size(self) -> int:
        return 4 + sum(self.dec) + sum(self.inc)

    def __str__(self):
        dec = ",".join(f"-{x}" for x in self.dec)
        inc = ",".join(f"+{x}" for x in self.inc)
        return f"B{self.sign}({dec},{inc})"


Phase = Tuple[Block, ...]


@dataclass(frozen=True)
class SymbolicWord:
    counters: int
    phases: Tuple[Phase, ...]

    def __post_init__(self):
        for n, phase in enumerate(self.phases):
            if not phase:
                raise MalformedWordError(f"phase {n} is empty")
            for block in phase:
                if len(block.dec) != self.counters:
                    raise MalformedWordError(f"phase {n}: block {block} does not have {self.counters} counters")

    def letter_count(self, upto: Optional[int] = None) -> int:
        phases = self.phases[:upto]
        return sum(sum(b.size() for b in p) + 1 for p in phases)

    def to_json(self) -> dict:
        return {
            "counters": self.counters,
            "phases": [
                [{"sign": b.sign, "dec": [str(x) for x in b.dec], "inc": [str(x) for x in b.inc]} for b in p]
                for p in self.phases
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SymbolicWord":
        try:
            k = int(data["counters"])
            phases = tuple(
                tuple(
                    Block(b["sign"], tuple(int(x) for x in b["dec"]), tuple(int(x) for x in b["inc"]))
                    for b in phase
                )
                for phase in data["phases"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedWordError):
                raise
            raise MalformedWordError(f"cannot read symbolic word: {exc}") from exc
        if k not in (1, 2):
            raise MalformedWordError(f"counters must be 1 or 2, got {k}")
        return cls(k, phases)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def render_block(block: Block, budget: int = DEFAULT_LETTER_BUDGET) -> str:
    if block.size() > budget:
        raise LetterBudgetError(f"block {block} needs {block.size()} letters, budget is {budget}")
    k = len(block.dec)
    return "".join(
        [OPEN]
        + [DEC_LETTERS[i] * block.dec[i] for i in range(k)]
        + [BAR]
        + [INC_LETTERS[i] * block.inc[i] for i in range(k)]
        + [block.sign, CLOSE]
    )


def _check_upto(w: SymbolicWord, upto: Optional[int]) -> int:
    if upto is None:
        return len(w.phases)
    if not 0 <= upto <= len(w.phases):
        raise MalformedWordError(f"asked for {upto} phases, word has {len(w.phases)}")
    return upto


def render_word(w: SymbolicWord, upto: Optional[int] = None, budget: int = DEFAULT_LETTER_BUDGET) -> str:
    upto = _check_upto(w, upto)
    total = w.letter_count(upto)
    if total > budget:
        raise LetterBudgetError(f"word needs {total} letters, budget is {budget}")
    return "".join("".join(render_block(b, budget) for b in p) + SHARP for p in w.phases[:upto])


def render_runs(w: SymbolicWord, upto: Optional[int] = None, budget: int = DEFAULT_LETTER_BUDGET) -> RunLengthWord:
    """Run-length form of :func:`render_word`, without building the string."""
    upto = _check_upto(w, upto)
    total = w.letter_count(upto)
    if total > budget:
        raise LetterBudgetError(f"word needs {total} letters, budget is {budget}")
    runs: List[Tuple[str, int]] = []

    def emit(a, n):
        if n == 0:
            return
        if runs and runs[-1][0] == a:
            runs[-1] = (a, runs[-1][1] + n)
        else:
            runs.append((a, n))

    for phase in w.phases[:upto]:
        for b in phase:
            emit(OPEN, 1)
            for i, x in enumerate(b.dec):
                emit(DEC_LETTERS[i], x)
            emit(BAR, 1)
            for i, x in enumerate(b.inc):
                emit(INC_LETTERS[i], x)
            emit(b.sign, 1)
            emit(CLOSE, 1)
        emit(SHARP, 1)
    return RunLengthWord(tuple(runs))


# Block-level execution.  A point is (counters, acc); its trace is a linked
# list (previous, block index) of the blocks chosen so far.
Point = Tuple[Tuple[int, ...], int]


@dataclass(frozen=True)
class SymbolicRun:
    visits: Optional[int]
    blocks: Tuple[int, ...]  # chosen block index per phase, for one best run
    frontiers: Tuple[Dict[Point, Tuple[int, ...]], ...]  # before each phase, and after the last


def _prune_points(points: Dict[Point, object]) -> Dict[Point, object]:
    ordered = sorted(points, key=lambda p: (sum(p[0]) + p[1], p), reverse=True)
    kept: List[Point] = []
    for c, a in ordered:
        if any(ka >= a and all(x >= y for x, y in zip(kc, c)) for kc, ka in kept):
            continue
        kept.append((c, a))
    return {p: points[p] for p in kept}


def _unlink(trace) -> Tuple[int, ...]:
    out = []
    while trace is not None:
        trace, j = trace
        out.append(j)
    return tuple(reversed(out))


def symbolic_run(kind: str, w: SymbolicWord, upto: Optional[int] = None, cap: Optional[int] = None,
                 keep_frontiers: bool = False) -> SymbolicRun:
    """Execute ``kind`` on the first ``upto`` phases of ``w`` one block at a time.

    Each run picks exactly one block per phase; a block is available when the
    counters cover its decrements.
    """
    k = counters_of(kind)
    if w.counters != k:
        raise MalformedWordError(f"{kind} needs {k}-counter blocks, word has {w.counters}")
    upto = _check_upto(w, upto)
    frontier: Dict[Point, object] = {((0,) * k, 0): None}
    seen = []
    for phase in w.phases[:upto]:
        if keep_frontiers:
            seen.append({p: _unlink(t) for p, t in frontier.items()})
        nxt: Dict[Point, object] = {}
        for (c, a), trace in frontier.items():
            for j, b in enumerate(phase):
                if any(x < y for x, y in zip(c, b.dec)):
                    continue
                nc = tuple(x - y + z for x, y, z in zip(c, b.dec, b.inc))
                na = a + (b.sign == PLUS)
                if cap is not None and na > cap:
                    na = cap
                nxt.setdefault((nc, na), (trace, j))
        frontier = _prune_points(nxt)
        if not frontier:
            return SymbolicRun(None, (), tuple(seen))
    if keep_frontiers:
        seen.append({p: _unlink(t) for p, t in frontier.items()})
    (c, a), trace = max(frontier.items(), key=lambda item: item[0][1])
    return SymbolicRun(a, _unlink(trace), tuple(seen))


def symbolic_max_visits(kind: str, w: SymbolicWord, upto: Optional[int] = None, cap: Optional[int] = None) -> Optional[int]:
    return symbolic_run(kind, w, upto, cap).visits


def phase_frontiers(kind: str, w: SymbolicWord, upto: Optional[int] = None, cap: Optional[int] = None):
    """Pruned ``(counters, acc) -> chosen blocks`` maps before every phase."""
    return symbolic_run(kind, w, upto, cap, keep_frontiers=True).frontiers


def parse_letters(text: str, counters: int) -> SymbolicWord:
    """Read a rendered word back into blocks and phases.

    Accepts exactly the shape :func:`render_word` produces: a sequence of
    ``#``-terminated phases, each a non-empty run of well-formed blocks.
    """
    dec_letters, inc_letters = DEC_LETTERS[:counters], INC_LETTERS[:counters]
    phases: List[Phase] = []
    blocks: List[Block] = []
    pos = 0
    n = len(text)

    def count(letter):
        nonlocal pos
        start = pos
        while pos < n and text[pos] == letter:
            pos += 1
        return pos - start

    def expect(letters):
        nonlocal pos
        if pos >= n or text[pos] not in letters:
            got = repr(text[pos]) if pos < n else "end of word"
            raise MalformedWordError(f"position {pos}: expected one of {''.join(letters)!r}, got {got}")
        pos += 1
        return text[pos - 1]

    while pos < n:
        if text[pos] == SHARP:
            if not blocks:
                raise MalformedWordError(f"position {pos}: empty phase")
            phases.append(tuple(blocks))
            blocks = []
            pos += 1
            continue
        expect(OPEN)
        dec = tuple(count(a) for a in dec_letters)
        expect(BAR)
        inc = tuple(count(a) for a in inc_letters)
        sign = expect((PLUS, MINUS))
        expect(CLOSE)
        blocks.append(Block(sign, dec, inc))
    if blocks:
        raise MalformedWordError("word ends inside a phase (missing '#')")
    return SymbolicWord(counters, tuple(phases))
