import json
import random

import pytest

from blindvass import tree_orders as T
from blindvass.machines import (
    A1,
    A2,
    Block,
    LetterBudgetError,
    MalformedWordError,
    SymbolicWord,
    build,
    build_a1,
    build_a2,
    parse_letters,
    phase_frontiers,
    render_block,
    render_runs,
    render_word,
    symbolic_max_visits,
    symbolic_run,
)
from blindvass.reductions import TreeSet, encode, random_treeset
from blindvass.vass import brute_force_visits, enumerate_runs, explore, max_accepting_visits


def test_a2_shape():
    a2 = build_a2()
    assert len(a2.states) == 6 and a2.accepting == {"qa"} and a2.counters == 2
    assert len(a2.moves("q0", "<")) == 2
    assert a2.moves("q1", "d") == (((-1, 0), "q1"),)
    assert a2.moves("q1", "e") == (((0, -1), "q1"),)
    assert a2.moves("q2", "j") == (((0, 1), "q2"),)
    assert a2.moves("q3", "#") == (((0, 0), "q0"),)
    assert a2.moves("q0", "#") == ()


def test_a1_shape():
    a1 = build_a1()
    assert a1.counters == 1 and len(a1.alphabet) == 8
    assert "e" not in a1.alphabet and "j" not in a1.alphabet
    assert a1.deterministic_on("d") and not a1.deterministic_on("<")


def test_render_block():
    assert render_block(Block("+", (1,), (2,))) == "<d|ii+>"
    assert render_block(Block("-", (0,), (0,))) == "<|->"
    assert render_block(Block("+", (0, 1), (1, 0))) == "<e|i+>"
    with pytest.raises(LetterBudgetError):
        render_block(Block("+", (10,), (0,)), budget=5)


def test_render_word():
    w = SymbolicWord(1, ((Block("+", (0,), (0,)), Block("-", (0,), (1,))),))
    assert render_word(w) == "<|+><|i->#"
    assert render_word(w, 0) == ""
    assert render_word(encode(A2, TreeSet.of(0, [""]), 1)) == "<|j+><|i+>#"
    with pytest.raises(LetterBudgetError):
        render_word(encode(A1, TreeSet.of(4), 5), budget=100)


def test_render_runs_matches_render_word():
    X = TreeSet.of(3, ["", "R", "LR", "RRL"])
    for kind in (A1, A2):
        w = encode(kind, X, 4)
        assert "".join(render_runs(w).letters()) == render_word(w)


def test_block_validation():
    with pytest.raises(MalformedWordError):
        Block("*", (0,), (0,))
    with pytest.raises(MalformedWordError):
        Block("+", (0,), (0, 1))
    with pytest.raises(MalformedWordError):
        Block("+", (-1,), (0,))
    with pytest.raises(MalformedWordError):
        SymbolicWord(1, ((),))
    with pytest.raises(MalformedWordError):
        SymbolicWord(2, ((Block("+", (0,), (0,)),),))


def test_symbolic_examples():
    w = SymbolicWord(1, ((Block("+", (0,), (0,)), Block("-", (0,), (1,))),))
    assert symbolic_max_visits(A1, w, 1) == 1
    assert symbolic_max_visits(A1, encode(A1, TreeSet.of(3), 4), 4) == 0
    assert symbolic_max_visits(A1, encode(A1, TreeSet.of(2, ["", "L", "LL"]), 3), 3) == 3
    assert symbolic_max_visits(A1, SymbolicWord(1, ()), None) == 0


def test_symbolic_blocked():
    w = SymbolicWord(1, ((Block("+", (1,), (0,)),),))
    assert symbolic_run(A1, w).visits is None
    assert max_accepting_visits(build_a1(), render_word(w)) is None


def test_symbolic_word_json_round_trip():
    w = encode(A1, TreeSet.of(6, ["", "L", "RL"]), 7)
    data = json.loads(w.dumps())
    assert all(isinstance(x, str) for p in data["phases"] for b in p for x in b["dec"] + b["inc"])
    assert SymbolicWord.from_json(data) == w
    with pytest.raises(MalformedWordError):
        SymbolicWord.from_json({"counters": 3, "phases": []})
    with pytest.raises(MalformedWordError):
        SymbolicWord.from_json({"phases": []})


def test_parse_letters_round_trip():
    rng = random.Random(3)
    for _ in range(20):
        X = random_treeset(rng, 3)
        for kind, k in ((A1, 1), (A2, 2)):
            w = encode(kind, X, 4)
            assert parse_letters(render_word(w), k) == w
    assert parse_letters("", 1) == SymbolicWord(1, ())
    for bad in ("<d|+>", "#", "<|+>>#", "<|x>#", "<e|+>#"):
        with pytest.raises(MalformedWordError):
            parse_letters(bad, 1)


def test_block_order_irrelevance():
    rng = random.Random(11)
    for trial in range(120):
        kind = (A1, A2)[trial % 2]
        X = random_treeset(rng, 3 if kind == A1 else 4)
        n = X.depth + 1
        w = encode(kind, X, n)
        shuffled = SymbolicWord(w.counters, tuple(tuple(rng.sample(p, len(p))) for p in w.phases))
        for k in range(n + 1):
            assert symbolic_max_visits(kind, shuffled, n, k) == symbolic_max_visits(kind, w, n, k)


@pytest.mark.parametrize("kind", [A1, A2])
def test_exactly_one_block_per_phase(kind):
    rng = random.Random(5)
    vass = build(kind)
    for _ in range(6):
        X = random_treeset(rng, 1)
        word = render_word(encode(kind, X, 2))
        runs = list(enumerate_runs(vass, word))
        assert runs
        for run in runs:
            entries = [i for i in range(1, len(run)) if run[i][0] == "q1" and run[i - 1][0] != "q1"]
            sharps = [i for i, a in enumerate(word) if a == "#"]
            # run[i] is the configuration after reading word[i - 1]
            phase_of = [sum(1 for s in sharps if s < i - 1) for i in entries]
            assert phase_of == [0, 1]
        best = max(sum(q == "qa" for q, _ in run) for run in runs)
        assert best == brute_force_visits(vass, word) == max_accepting_visits(vass, word)


def test_a2_configuration_law():
    rng = random.Random(2)
    for _ in range(20):
        X = random_treeset(rng, 5)
        for n, frontier in enumerate(phase_frontiers(A2, encode(A2, X, 6), 6, 6)):
            got = {c for c, _ in frontier}
            assert got == {(T.binary_value(v), T.co_value(v)) for v in T.level(n)}


def test_a1_antichain_one_point_per_state_and_visits():
    rng = random.Random(9)
    a1 = build_a1()
    for _ in range(15):
        X = random_treeset(rng, 3)
        word = render_word(encode(A1, X, 4))
        for cut in sorted(rng.sample(range(len(word) + 1), 10)):
            pts = explore(a1, word[:cut], 4).frontier
            keys = [(p.state, p.acc) for p in pts]
            assert len(keys) == len(set(keys))
