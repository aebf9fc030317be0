import random

import pytest
from hypothesis import given, settings, strategies as st

from blindvass.machines import build_a1
from blindvass.vass import (
    RunLengthWord,
    SearchPoint,
    Vass,
    brute_force_visits,
    dominates,
    enumerate_runs,
    explore,
    max_accepting_visits,
    prune,
    successors,
)


def counter_loop(accepting=True, effect=(1,)):
    return Vass.build("a", ["q"], "q", {"q"} if accepting else set(), len(effect), [("q", "a", effect, "q")])


def test_successors_examples():
    v = counter_loop(accepting=False)
    assert successors(v, SearchPoint("q", (0,), 0), "a") == {SearchPoint("q", (1,), 0)}
    v = counter_loop(accepting=True)
    assert successors(v, SearchPoint("q", (0,), 0), "a") == {SearchPoint("q", (1,), 1)}
    v = counter_loop(effect=(-1,))
    assert successors(v, SearchPoint("q", (0,), 0), "a") == set()


def test_successors_a1_open():
    a1 = build_a1()
    got = successors(a1, a1.initial_point(), "<")
    assert got == {SearchPoint("q0", (0,), 0), SearchPoint("q1", (0,), 0)}


def test_successors_rejects_unknown_letter():
    with pytest.raises(ValueError):
        successors(counter_loop(), SearchPoint("q", (0,), 0), "z")


def test_prune_examples():
    assert prune({SearchPoint("q", (2,), 1), SearchPoint("q", (1,), 0)}) == {SearchPoint("q", (2,), 1)}
    pts = {SearchPoint("q", (2,), 0), SearchPoint("q", (1,), 1)}
    assert prune(pts) == pts
    pts = {SearchPoint("q", (3, 0), 0), SearchPoint("q", (0, 3), 0)}
    assert prune(pts) == pts
    pts = {SearchPoint("p", (0,), 0), SearchPoint("q", (5,), 5)}
    assert prune(pts) == pts


def test_dominates():
    assert dominates(SearchPoint("q", (2, 2), 1), SearchPoint("q", (1, 2), 1))
    assert not dominates(SearchPoint("p", (2, 2), 1), SearchPoint("q", (1, 2), 1))
    assert not dominates(SearchPoint("q", (2, 2), 0), SearchPoint("q", (1, 2), 1))


def test_a1_small_words():
    a1 = build_a1()
    assert max_accepting_visits(a1, "<|+><|i->#", 5) == 1
    assert max_accepting_visits(a1, "<|-><|i->#", 5) == 0
    assert max_accepting_visits(a1, "", 5) == 0


def test_initial_position_counts():
    v = counter_loop(accepting=True)
    assert max_accepting_visits(v, "") == 1
    assert max_accepting_visits(v, "aaa") == 4
    assert max_accepting_visits(v, "aaa", 2) == 2


def test_no_full_run():
    v = counter_loop(effect=(-1,))
    assert max_accepting_visits(v, "a") is None
    assert brute_force_visits(v, "a") is None
    assert explore(v, "aa").frontier == frozenset()


def test_deterministic_matches_single_run():
    # counter goes up on 'a', down on 'b'; accepting after each 'b'
    v = Vass.build("ab", ["p", "q"], "p", {"q"}, 1, [("p", "a", (1,), "p"), ("q", "a", (1,), "p"),
                                                     ("p", "b", (-1,), "q"), ("q", "b", (-1,), "q")])
    word = "aaabbab" + "a" * 50 + "b" * 40
    (run,) = list(enumerate_runs(v, word))
    expected = sum(1 for q, _ in run if q in v.accepting)
    assert max_accepting_visits(v, word) == brute_force_visits(v, word) == expected
    assert max_accepting_visits(v, word + "b" * 20) is None


def test_run_length_word_round_trip():
    w = RunLengthWord.of("aaabca")
    assert w.runs == (("a", 3), ("b", 1), ("c", 1), ("a", 1))
    assert "".join(w.letters()) == "aaabca" and len(w) == 6
    v = Vass.build("abc", ["q"], "q", {"q"}, 0, [("q", a, (), "q") for a in "abc"])
    assert max_accepting_visits(v, w) == max_accepting_visits(v, "aaabca") == 7


def test_long_cycle_folding():
    # a 3-cycle on 'a' with net +1 and a dip of -2 inside
    v = Vass.build("ab", ["x", "y", "z"], "x", {"z"}, 1,
                   [("x", "a", (2,), "y"), ("y", "a", (-2,), "z"), ("z", "a", (1,), "x"), ("x", "b", (-1,), "x")])
    for n in (0, 1, 2, 3, 7, 100, 301):
        for word in ("a" * n, "b" + "a" * n, "a" * n + "b"):
            assert max_accepting_visits(v, RunLengthWord.of(word)) == brute_force_visits(v, word), word


def test_rejects_unknown_letters():
    with pytest.raises(ValueError):
        max_accepting_visits(counter_loop(), "ab")
    with pytest.raises(ValueError):
        brute_force_visits(counter_loop(), "ab")


def test_vass_validation():
    with pytest.raises(ValueError):
        Vass.build("a", ["q"], "p", set(), 1, [])
    with pytest.raises(ValueError):
        Vass.build("a", ["q"], "q", set(), 1, [("q", "a", (1, 1), "q")])
    with pytest.raises(ValueError):
        Vass.build("a", ["q"], "q", set(), 1, [("q", "b", (1,), "q")])


@st.composite
def vass_and_word(draw, max_states=4, max_counters=2, max_len=25, letters="ab"):
    n = draw(st.integers(1, max_states))
    k = draw(st.integers(0, max_counters))
    states = [f"s{i}" for i in range(n)]
    trans = draw(st.lists(
        st.tuples(st.sampled_from(states), st.sampled_from(letters),
                  st.tuples(*[st.integers(-2, 2)] * k), st.sampled_from(states)),
        max_size=4 * n))
    accepting = draw(st.sets(st.sampled_from(states)))
    v = Vass.build(letters, states, states[0], accepting, k, trans)
    # favour long runs of one letter so the cycle folding gets exercised
    runs = draw(st.lists(st.tuples(st.sampled_from(letters), st.integers(1, 8)), max_size=8))
    word = "".join(a * m for a, m in runs)[:max_len]
    cap = draw(st.none() | st.integers(0, 6))
    return v, word, cap


@settings(max_examples=600)
@given(vass_and_word())
def test_pruning_soundness(case):
    v, word, cap = case
    assert max_accepting_visits(v, word, cap) == brute_force_visits(v, word, cap)


@settings(max_examples=200)
@given(vass_and_word(), st.data())
def test_adding_a_transition_never_hurts(case, data):
    v, word, _ = case
    src, tgt = data.draw(st.sampled_from(v.states)), data.draw(st.sampled_from(v.states))
    effect = data.draw(st.tuples(*[st.integers(-2, 2)] * v.counters))
    bigger = v.with_transition(src, data.draw(st.sampled_from("ab")), effect, tgt)
    before, after = max_accepting_visits(v, word), max_accepting_visits(bigger, word)
    if before is not None:
        assert after is not None and after >= before


@settings(max_examples=200)
@given(vass_and_word())
def test_frontier_is_a_nonnegative_antichain(case):
    v, word, cap = case
    found = explore(v, word, cap)
    pts = list(found.frontier)
    assert all(min(p.counters, default=0) >= 0 for p in pts)
    assert all(not dominates(p, q) for p in pts for q in pts if p != q)
    if found.visits is not None:
        assert found.visits == max(p.acc for p in pts)


def test_random_words_on_three_state_vass():
    rng = random.Random(7)
    states = ["p", "q", "r"]
    trans = []
    for s in states:
        for a in "abc":
            for _ in range(rng.randint(0, 2)):
                trans.append((s, a, (rng.randint(-1, 1),), rng.choice(states)))
    v = Vass.build("abc", states, "p", {"q"}, 1, trans)
    for _ in range(1000):
        word = "".join(rng.choice("abc") for _ in range(rng.randint(0, 40)))
        cap = rng.choice([None, 3])
        assert max_accepting_visits(v, word, cap) == brute_force_visits(v, word, cap), word


def test_choices_replay_to_the_best_visit_count():
    a1 = build_a1()
    word = "<|+><|i->#<d|ii+><d|iii->#"
    found = explore(a1, word)
    assert found.visits == brute_force_visits(a1, word) == 1
    # every recorded choice is a real branching position
    for pos, target in found.choices:
        assert len(a1.moves("q0", word[pos])) > 1 or len(a1.moves("q3", word[pos])) > 1
