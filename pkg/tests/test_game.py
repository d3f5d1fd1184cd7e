import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import literal_win_table, explicit_ns_box, make_game
from rendezvous_bell.game import (Box, DeterministicStrategy, GameError, Scenario, compile_game,
                                  deterministic_box, game_value, load_game, moves_to_outcome,
                                  outcome_to_moves, quantum_box)
from rendezvous_bell.graph import CUBIC, build_cycle, from_adjacency_list, from_catalog
from rendezvous_bell.quantum import QuantumStrategy, classical_embedding, maximally_entangled


def path_strategy(g, paths):
    """Deterministic strategy from the node sequence visited from each start (1..n)."""
    outs = []
    for v, path in enumerate(paths, 1):
        moves, cur = [], v
        for nxt in path:
            moves.append(g.out_edges[cur - 1].index(nxt) + 1)
            cur = nxt
        outs.append(moves_to_outcome(moves, g.degree))
    return DeterministicStrategy(tuple(outs))


def test_outcome_examples():
    assert outcome_to_moves(2, 3, 1) == [2]
    assert outcome_to_moves(3, 2, 2) == [1, 2]
    with pytest.raises(GameError):
        outcome_to_moves(10, 3, 2)
    with pytest.raises(GameError):
        outcome_to_moves(0, 3, 2)


@pytest.mark.parametrize("r, t", [(2, 1), (2, 2), (3, 2), (4, 2), (3, 3)])
def test_outcome_bijection(r, t):
    seqs = [tuple(outcome_to_moves(a, r, t)) for a in range(1, r ** t + 1)]
    assert sorted(seqs) == sorted(itertools.product(range(1, r + 1), repeat=t))
    assert all(moves_to_outcome(s, r) == a for a, s in enumerate(seqs, 1))


def test_weights():
    assert make_game("cycle-4", True).p == Fraction(1, 12)
    assert make_game("cubic-4", False, 1, True, False).p == Fraction(1, 56)
    assert make_game("cycle-5", False, 1, False, True).p == Fraction(1, 25)


def test_three_cycle_same_start():
    g = make_game("cycle-3", False, 1, False, True)
    for x in range(3):
        assert np.array_equal(g.win[:, :, x, x], np.eye(2, dtype=np.int8))
    # nodes 1 and 2: the common neighbor is 3, reached by label 2 from 1 and label 2 from 2
    w = g.win[:, :, 0, 1]
    assert w.sum() == 1 and w[1, 1] == 1


def test_transposition_clause():
    g = make_game("cycle-4", False, 1, True, False)
    # x=1, y=2: Alice -> 2 (label 1 of [2,4]), Bob -> 1 (label 1 of [1,3])
    assert g.coeff[0, 0, 0, 1] == pytest.approx(1 / 12)
    g0 = make_game("cycle-4", False, 1, False, False)
    assert g0.coeff[0, 0, 0, 1] == 0


def test_non_regular_rejected():
    g = from_adjacency_list([[2, 3], [1], [1]])
    with pytest.raises(GameError):
        compile_game(Scenario(g, 1))
    with pytest.raises(GameError):
        Scenario(build_cycle(4), 0)


GAMES = ([(n, r, t, e, s) for n in CUBIC for r in (0, 1) for t in (1,) for e in (0, 1) for s in (0, 1)]
         + [(f"cycle-{k}", r, t, e, s) for k in range(3, 9) for r in (0, 1) for t in (1, 2)
            for e in (0, 1) for s in (0, 1)]
         + [(f"dircycle-{k}", 1, 2, 0, s) for k in range(4, 10) for s in (0, 1)])


@pytest.mark.parametrize("name, r, t, e, s", GAMES[::5])
def test_game_invariants(name, r, t, e, s):
    g = make_game(name, bool(r), t, bool(e), bool(s))
    assert set(np.unique(g.win)) <= {0, 1}
    N = g.n_settings
    if not s:
        assert not g.win[:, :, np.arange(N), np.arange(N)].any()
    assert np.array_equal(g.win, g.win.transpose(1, 0, 3, 2))


def test_move_to_smallest(cycle4_refl):
    g = from_catalog("cycle-4", True)
    s = path_strategy(g, [[1], [1], [2], [1]])
    assert s.outcomes == (1, 1, 1, 1)
    assert game_value(cycle4_refl, deterministic_box(s, s, 3)) == pytest.approx(0.5, abs=1e-15)


def test_six_rule_directed_cycle():
    g = from_catalog("dircycle-6", True)
    game = make_game("dircycle-6", True, 2, False, True)
    s = path_strategy(g, [[1, 1], [3, 4], [3, 4], [4, 4], [6, 1], [1, 1]])
    assert game_value(game, deterministic_box(s, s, 4)) == pytest.approx(0.5, abs=1e-15)


def test_wait_for_mummy():
    g = from_catalog("dircycle-4", True)
    game = make_game("dircycle-4", True, 2, False, True)
    alice = path_strategy(g, [[1, 1], [2, 2], [3, 3], [4, 4]])
    bob = path_strategy(g, [[1, 2], [2, 3], [4, 1], [1, 2]])
    box = deterministic_box(alice, bob, 4)
    # a two-step path covers at most two of the four nodes, so 8/16 is the ceiling
    assert game_value(game, box) == pytest.approx(0.5, abs=1e-15)
    # counting co-location before the first step adds (3,3) and (4,4): 10/16
    step0 = sum(1 for x in range(4) if game.win[alice.outcomes[x] - 1, bob.outcomes[x] - 1, x, x] == 0)
    assert game_value(game, box) + step0 * float(game.p) == pytest.approx(0.625)
    # the classical optimum of the game is nevertheless 0.625
    from rendezvous_bell.bounds import lhv_bound
    assert lhv_bound(game).value == pytest.approx(0.625, abs=1e-15)


def test_explicit_ns_box(cycle4_refl):
    P = explicit_ns_box()
    box = Box(P)
    assert box.normalization_error() < 1e-12
    assert box.signaling_error() < 1e-9
    assert game_value(cycle4_refl, box) == pytest.approx(2 / 3, abs=1e-12)


def test_uniform_box_linearity(cycle4_refl):
    A = cycle4_refl.n_outcomes
    u = Box(np.full(cycle4_refl.shape, 1 / A ** 2))
    assert game_value(cycle4_refl, u) == pytest.approx(cycle4_refl.coeff.sum() / A ** 2)
    with pytest.raises(GameError):
        game_value(cycle4_refl, np.zeros((2, 2, 4, 4)))


def test_deterministic_values_are_multiples():
    game = make_game("cycle-5", True)
    rng = np.random.default_rng(1)
    for _ in range(20):
        sa = DeterministicStrategy(tuple(rng.integers(1, 4, 5).tolist()))
        sb = DeterministicStrategy(tuple(rng.integers(1, 4, 5).tolist()))
        v = game_value(game, deterministic_box(sa, sb, 3)) * 20
        assert abs(v - round(v)) < 1e-12


def test_quantum_box_rules():
    rng = np.random.default_rng(0)
    from rendezvous_bell.bounds.seesaw import random_povms
    Ma, Mb = random_povms(rng, 4, 3, 3), random_povms(rng, 4, 3, 2)
    qs = QuantumStrategy(3, 2, np.eye(6) / 6, Ma, Mb)
    P = quantum_box(qs).table
    tr_a = np.einsum("xaii->ax", Ma).real
    tr_b = np.einsum("ybii->by", Mb).real
    assert np.allclose(P, np.einsum("ax,by->abxy", tr_a, tr_b) / 6, atol=1e-12)
    qs2 = QuantumStrategy(3, 3, maximally_entangled(3), Ma, random_povms(rng, 4, 3, 3))
    assert quantum_box(qs2).signaling_error() < 1e-9
    sa, sb = DeterministicStrategy((1, 2, 3, 1)), DeterministicStrategy((3, 3, 2, 1))
    emb = classical_embedding(sa, sb, 3, 2, 2)
    assert np.allclose(quantum_box(emb).table, deterministic_box(sa, sb, 3).table)


def test_dump_round_trip(tmp_path):
    g = make_game("cubic-4", False, 1, True, False)
    g.dump(tmp_path / "g.json")
    h = load_game(tmp_path / "g.json")
    assert np.array_equal(g.win, h.win) and h.p == g.p == Fraction(1, 56)


@pytest.mark.parametrize("name", ["cycle-3", "cycle-4", "cycle-5", "dircycle-4", "dircycle-5"])
@pytest.mark.parametrize("t", [1, 2])
def test_matches_literal_loop(name, t):
    for r, e, s in itertools.product((False, True), repeat=3):
        if name.startswith("dircycle") and not r:
            continue
        game = make_game(name, r, t, e, s)
        lit = literal_win_table([list(x) for x in game.scenario.graph.out_edges], t, e, s)
        got = {tuple(q): game.p for q in game.nonzero()}
        assert got == lit


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 6), st.booleans(), st.integers(1, 2), st.booleans(), st.booleans(),
       st.randoms(use_true_random=False))
def test_linearity_and_range(n, refl, t, e, s, rnd):
    game = make_game(f"cycle-{n}", refl, t, e, s)
    rng = np.random.default_rng(rnd.randint(0, 2 ** 31))
    P1 = rng.random(game.shape)
    P1 /= P1.sum(axis=(0, 1), keepdims=True)
    P2 = rng.random(game.shape)
    P2 /= P2.sum(axis=(0, 1), keepdims=True)
    v1, v2 = game_value(game, P1), game_value(game, P2)
    assert 0 <= v1 <= 1 and 0 <= v2 <= 1
    assert game_value(game, 0.3 * P1 + 0.7 * P2) == pytest.approx(0.3 * v1 + 0.7 * v2, abs=1e-14)
