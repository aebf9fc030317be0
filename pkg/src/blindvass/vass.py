"""Letter-level Büchi VASS exploration over finite input prefixes.

Büchi acceptance is approximated by counting accepting visits along a run
of a finite word, capped at a query bound ``K``.  The forward search keeps
a frontier of :class:`SearchPoint` and prunes it to an
antichain under the simulation order: same state, pointwise larger counters
and at least as many accepting visits.

Letters on which no state has two transitions are deterministic.  The
word is cut into segments, each one occurrence of a branching letter plus
the deterministic runs after it, and every point crosses a segment in a
single jump.  The jump is exact: it follows the unique transition path,
folding any cycle on a run of one letter into closed-form arithmetic, and
checks non-negativity against the minimum counter value along the way.
Pruning happens once per segment.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import groupby
from operator import add, ge
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

log = logging.getLogger(__name__)

Letter = Hashable
State = Hashable
Counters = Tuple[int, ...]


class Transition(NamedTuple):
    source: State
    letter: Letter
    effect: Counters
    target: State


class SearchPoint(NamedTuple):
    state: State
    counters: Counters
    acc: int


@dataclass(frozen=True)
class Vass:
    alphabet: FrozenSet[Letter]
    states: Tuple[State, ...]
    initial: State
    accepting: FrozenSet[State]
    counters: int
    transitions: Tuple[Transition, ...]
    _index: Dict[Tuple[State, Letter], Tuple[Tuple[Counters, State], ...]] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        states = set(self.states)
        if self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        if not self.accepting <= states:
            raise ValueError(f"accepting states {set(self.accepting - states)} unknown")
        index: Dict[Tuple[State, Letter], List[Tuple[Counters, State]]] = {}
        for t in self.transitions:
            if t.source not in states or t.target not in states:
                raise ValueError(f"transition {t} references an unknown state")
            if t.letter not in self.alphabet:
                raise ValueError(f"transition {t} is over an unknown letter")
            if len(t.effect) != self.counters:
                raise ValueError(f"transition {t} has {len(t.effect)} effects, expected {self.counters}")
            index.setdefault((t.source, t.letter), []).append((tuple(t.effect), t.target))
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})
        branching = {a for (_, a), moves in self._index.items() if len(moves) > 1}
        object.__setattr__(self, "_branching", frozenset(branching))
        # path summaries shared by every query on this automaton
        object.__setattr__(self, "_summaries", {})
        object.__setattr__(self, "_stretches", {})
        object.__setattr__(self, "_segments", {})

    @classmethod
    def build(cls, alphabet, states, initial, accepting, counters, transitions) -> "Vass":
        return cls(
            frozenset(alphabet),
            tuple(states),
            initial,
            frozenset(accepting),
            counters,
            tuple(Transition(s, a, tuple(e), t) for s, a, e, t in transitions),
        )

    def moves(self, state: State, letter: Letter) -> Tuple[Tuple[Counters, State], ...]:
        return self._index.get((state, letter), ())

    def deterministic_on(self, letter: Letter) -> bool:
        return letter not in self._branching

    def initial_point(self, cap: Optional[int] = None) -> SearchPoint:
        return SearchPoint(self.initial, (0,) * self.counters, _bump(0, self.initial in self.accepting, cap))

    def with_transition(self, source, letter, effect, target) -> "Vass":
        return Vass(
            self.alphabet,
            self.states,
            self.initial,
            self.accepting,
            self.counters,
            self.transitions + (Transition(source, letter, tuple(effect), target),),
        )


def _bump(acc: int, hit, cap: Optional[int]) -> int:
    acc += int(hit)
    return acc if cap is None or acc <= cap else cap


def successors(vass: Vass, point: SearchPoint, letter: Letter, cap: Optional[int] = None) -> Set[SearchPoint]:
    if letter not in vass.alphabet:
        raise ValueError(f"letter {letter!r} not in the alphabet")
    out = set()
    for effect, target in vass.moves(point.state, letter):
        counters = tuple(c + e for c, e in zip(point.counters, effect))
        if min(counters, default=0) < 0:
            continue
        out.add(SearchPoint(target, counters, _bump(point.acc, target in vass.accepting, cap)))
    return out


def dominates(p: SearchPoint, q: SearchPoint) -> bool:
    """``p`` simulates ``q``."""
    return (
        p.state == q.state
        and p.acc >= q.acc
        and all(a >= b for a, b in zip(p.counters, q.counters))
    )


def _antichain(items: Iterable[Tuple[Counters, int, object]]) -> List[Tuple[Counters, int, object]]:
    """Pareto-maximal ``(counters, acc, payload)`` triples of one state.

    Sorting by total size puts every dominating item before the items it
    dominates, so a candidate only needs checking against what was kept.
    """
    seen = {}
    for c, a, payload in items:
        seen.setdefault((c, a), payload)
    ordered = sorted(seen, key=lambda ca: (sum(ca[0]) + ca[1], ca), reverse=True)
    kept: List[Tuple[Counters, int]] = []
    for c, a in ordered:
        if any(ka >= a and all(x >= y for x, y in zip(kc, c)) for kc, ka in kept):
            continue
        kept.append((c, a))
    return [(c, a, seen[(c, a)]) for c, a in kept]


def prune(frontier: Iterable[SearchPoint]) -> Set[SearchPoint]:
    groups: Dict[State, List[Tuple[Counters, int, None]]] = {}
    for p in frontier:
        groups.setdefault(p.state, []).append((tuple(p.counters), p.acc, None))
    return {
        SearchPoint(q, c, a)
        for q, items in groups.items()
        for c, a, _ in _antichain(items)
    }


@dataclass(frozen=True)
class RunLengthWord:
    """A letter word stored as ``(letter, repetitions)`` pairs."""

    runs: Tuple[Tuple[Letter, int], ...]

    def __len__(self) -> int:
        return sum(n for _, n in self.runs)

    def letters(self) -> Iterator[Letter]:
        for a, n in self.runs:
            for _ in range(n):
                yield a

    @classmethod
    def of(cls, word: Iterable[Letter]) -> "RunLengthWord":
        return cls(tuple((a, sum(1 for _ in g)) for a, g in groupby(word)))


def as_runs(word) -> Tuple[Tuple[Letter, int], ...]:
    if isinstance(word, RunLengthWord):
        return word.runs
    return RunLengthWord.of(word).runs


@dataclass(frozen=True)
class _Summary:
    target: State
    delta: Counters
    low: Counters  # minimum of the running delta, never above 0
    visits: int


def _summarise(vass: Vass, state: State, letter: Letter, count: int) -> Optional[_Summary]:
    """Effect of reading ``letter**count`` from ``state`` on a letter without branching."""
    k = vass.counters
    delta = [0] * k
    low = [0] * k
    visits = 0
    cur = state
    steps = 0
    first_seen: Dict[State, int] = {}
    history: List[Tuple[Tuple[int, ...], int]] = []
    folded = False
    while steps < count:
        history.append((tuple(delta), visits))
        if not folded and cur in first_seen:
            folded = True
            start = first_seen[cur]
            period = steps - start
            full = (count - steps) // period
            if full:
                base, base_visits = history[start]
                net = [delta[i] - base[i] for i in range(k)]
                dip = [min(h[0][i] for h in history[start + 1 : steps + 1]) - base[i] for i in range(k)]
                for i in range(k):
                    # the lowest point over the repeated cycles sits at the first or the last repetition
                    low[i] = min(low[i], delta[i] + dip[i], delta[i] + (full - 1) * net[i] + dip[i])
                    delta[i] += full * net[i]
                visits += full * (visits - base_visits)
                steps += full * period
                continue
        first_seen.setdefault(cur, steps)
        moves = vass.moves(cur, letter)
        if not moves:
            return None
        effect, cur = moves[0]
        for i in range(k):
            delta[i] += effect[i]
            if delta[i] < low[i]:
                low[i] = delta[i]
        visits += cur in vass.accepting
        steps += 1
    return _Summary(cur, tuple(delta), tuple(low), visits)


# A frontier maps each state to an antichain of (counters, acc, trace) triples.
# ``trace`` is a linked list ``(previous, position, target)`` of the choices
# made at positions where the automaton had more than one transition, except
# that an idle self-loop (no effect, not accepting) is never recorded.
_Frontier = Dict[State, List[Tuple[Counters, int, object]]]


@dataclass(frozen=True)
class Exploration:
    visits: Optional[int]  # None: no run reads the whole word
    choices: Tuple[Tuple[int, State], ...] = ()
    frontier: FrozenSet[SearchPoint] = frozenset()


def _unlink(trace) -> Tuple[Tuple[int, State], ...]:
    out = []
    while trace is not None:
        trace, pos, target = trace
        out.append((pos, target))
    return tuple(reversed(out))


def _insert(kept: List[Tuple[Counters, int, object]], item: Tuple[Counters, int, object]) -> None:
    """Add ``item`` to the antichain ``kept`` in place."""
    c, a, _ = item
    for kc, ka, _ in kept:
        if ka >= a and all(map(ge, kc, c)):
            return
    kept[:] = [k for k in kept if not (a >= k[1] and all(map(ge, c, k[0])))]
    kept.append(item)


def _merge(parts: Dict[State, List[Tuple[list, bool]]]) -> _Frontier:
    """Union the groups arriving at each state into one antichain.

    A group flagged clean is already an antichain; the largest clean group
    seeds the result and everything else is inserted point by point.
    """
    merged: _Frontier = {}
    for q, groups in parts.items():
        if len(groups) == 1 and groups[0][1]:
            merged[q] = groups[0][0]
            continue
        clean = [g for g, ok in groups if ok]
        if clean:
            base = max(clean, key=len)
            kept = list(base)
        else:
            base, kept = None, []
        for g, _ in groups:
            if g is base:
                continue
            for item in g:
                _insert(kept, item)
        merged[q] = kept
    return merged


def _segments(vass: Vass, runs) -> Iterator[Tuple[int, Optional[Letter], Tuple[Tuple[Letter, int], ...]]]:
    """Cut the word into ``(position, branching letter or None, deterministic runs)``.

    Each segment starts at an occurrence of a letter on which some state has
    a choice, and swallows the deterministic runs that follow it.
    """
    head, head_pos, stretch = None, 0, []
    pos = 0
    for letter, count in runs:
        if letter not in vass.alphabet:
            raise ValueError(f"letter {letter!r} at position {pos} not in the alphabet")
        if vass.deterministic_on(letter):
            stretch.append((letter, count))
        else:
            for i in range(count):
                if head is not None or stretch:
                    yield head_pos, head, tuple(stretch)
                head, head_pos, stretch = letter, pos + i, []
        pos += count
    if head is not None or stretch:
        yield head_pos, head, tuple(stretch)


def _run_summary(vass: Vass, state: State, letter: Letter, count: int) -> Optional[_Summary]:
    key = (state, letter, count)
    cache = vass._summaries
    if key not in cache:
        cache[key] = _summarise(vass, state, letter, count)
    return cache[key]


def _stretch_summary(vass: Vass, state: State, stretch) -> Optional[_Summary]:
    key = (state, stretch)
    cache = vass._stretches
    if key in cache:
        return cache[key]
    delta = [0] * vass.counters
    low = [0] * vass.counters
    visits = 0
    cur = state
    out: Optional[_Summary] = None
    for letter, count in stretch:
        s = _run_summary(vass, cur, letter, count)
        if s is None:
            break
        for i in range(vass.counters):
            low[i] = min(low[i], delta[i] + s.low[i])
            delta[i] += s.delta[i]
        visits += s.visits
        cur = s.target
    else:
        out = _Summary(cur, tuple(delta), tuple(low), visits)
    cache[key] = out
    return out


def _segment_moves(vass: Vass, state: State, head, stretch) -> List[Tuple[_Summary, Optional[State]]]:
    """Net effect of each way to read one segment from ``state``.

    Pairs each surviving path summary with the head target to record in the
    trace, or ``None`` when the head move is not a real choice.
    """
    key = (state, head, stretch)
    cache = vass._segments
    if key in cache:
        return cache[key]
    zero = (0,) * vass.counters
    if head is None:
        moves = ((zero, state),)
    else:
        moves = vass.moves(state, head)
    out = []
    for effect, target in moves:
        hit = head is not None and target in vass.accepting
        rest = _stretch_summary(vass, target, stretch)
        if rest is None:
            continue
        combined = _Summary(
            rest.target,
            tuple(map(add, effect, rest.delta)),
            tuple(min(0, e + lo) for e, lo in zip(effect, rest.low)),
            int(hit) + rest.visits,
        )
        idle = target == state and not hit and not any(effect)
        out.append((combined, target if len(moves) > 1 and not idle else None))
    cache[key] = out
    return out


def _advance(vass: Vass, frontier: _Frontier, pos: int, head, stretch, cap: Optional[int]) -> _Frontier:
    parts: Dict[State, List[Tuple[list, bool]]] = {}
    for q, items in frontier.items():
        for s, record in _segment_moves(vass, q, head, stretch):
            if s.target == q and record is None and s.visits == 0 and not any(s.delta) and not any(s.low):
                parts.setdefault(q, []).append((items, True))
                continue
            floor = tuple(-lo for lo in s.low)
            moved = []
            clean = True
            for c, a, trace in items:
                if not all(map(ge, c, floor)):
                    continue
                acc = a + s.visits
                if cap is not None and acc > cap:
                    acc = cap
                    clean = False
                if record is not None:
                    trace = (trace, pos, record)
                moved.append((tuple(map(add, c, s.delta)), acc, trace))
            if moved:
                parts.setdefault(s.target, []).append((moved, clean))
    return _merge(parts)


def explore(vass: Vass, word, cap: Optional[int] = None) -> Exploration:
    """Forward search over ``word`` with dominance pruning.

    ``word`` is a string, any sequence of letters, or a :class:`RunLengthWord`.
    The frontier is pruned after every segment (see :func:`_segments`);
    inside a segment every point follows a single path, so pruning there
    could not remove anything that survives to the segment's end.
    """
    init = vass.initial_point(cap)
    frontier: _Frontier = {init.state: [(init.counters, init.acc, None)]}
    for pos, head, stretch in _segments(vass, as_runs(word)):
        frontier = _advance(vass, frontier, pos, head, stretch, cap)
        if not frontier:
            log.debug("no run survives the segment at position %d", pos)
            return Exploration(None)
    best = max(
        ((a, trace) for items in frontier.values() for _, a, trace in items),
        key=lambda at: at[0],
    )
    points = frozenset(SearchPoint(q, c, a) for q, items in frontier.items() for c, a, _ in items)
    return Exploration(best[0], _unlink(best[1]), points)


def max_accepting_visits(vass: Vass, word, cap: Optional[int] = None) -> Optional[int]:
    """Most accepting visits of any run reading all of ``word``, capped at ``cap``.

    Returns ``None`` when no run reads the whole word.
    """
    return explore(vass, word, cap).visits


def brute_force_visits(vass: Vass, word, cap: Optional[int] = None) -> Optional[int]:
    """Same contract as :func:`max_accepting_visits`, by exhaustive run search.

    Depth-first over every transition choice, no dominance pruning.  Results
    are memoised on the exact ``(position, state, counters)`` triple, which
    only merges identical sub-searches.
    """
    letters: Sequence[Letter] = list(word.letters()) if isinstance(word, RunLengthWord) else list(word)
    for i, a in enumerate(letters):
        if a not in vass.alphabet:
            raise ValueError(f"letter {a!r} at position {i} not in the alphabet")
    n = len(letters)
    memo: Dict[Tuple[int, State, Counters], Optional[int]] = {}
    root = (0, vass.initial, (0,) * vass.counters)
    stack = [(root, False)]
    while stack:
        key, expanded = stack.pop()
        if key in memo:
            continue
        pos, q, c = key
        here = 1 if q in vass.accepting else 0
        if pos == n:
            memo[key] = here
            continue
        children = []
        for effect, target in vass.moves(q, letters[pos]):
            nc = tuple(x + e for x, e in zip(c, effect))
            if min(nc, default=0) >= 0:
                children.append((pos + 1, target, nc))
        if not expanded:
            stack.append((key, True))
            stack.extend((ch, False) for ch in children if ch not in memo)
            continue
        values = [memo[ch] for ch in children if memo[ch] is not None]
        memo[key] = here + max(values) if values else None
    best = memo[root]
    if best is None or cap is None:
        return best
    return min(best, cap)


def enumerate_runs(vass: Vass, word) -> Iterator[List[Tuple[State, Counters]]]:
    """Every run reading all of ``word``, as its list of configurations."""
    letters = list(word.letters()) if isinstance(word, RunLengthWord) else list(word)
    run = [(vass.initial, (0,) * vass.counters)]

    def extend(pos):
        if pos == len(letters):
            yield list(run)
            return
        q, c = run[-1]
        for effect, target in vass.moves(q, letters[pos]):
            nc = tuple(x + e for x, e in zip(c, effect))
            if min(nc, default=0) < 0:
                continue
            run.append((target, nc))
            yield from extend(pos + 1)
            run.pop()

    yield from extend(0)
