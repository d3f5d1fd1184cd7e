"""Classical, non-signaling, NPA and see-saw bounds plus the noise model."""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_game
from rendezvous_bell.bounds import lhv_bound, ml_bound, ns_bound, nu_crit, seesaw
from rendezvous_bell.bounds.lhv import ScenarioTooLarge
from rendezvous_bell.bounds.noise import NoAdvantage, noise_value
from rendezvous_bell.game import BellGame, Box, Scenario, compile_game, game_value, quantum_box
from rendezvous_bell.graph import from_catalog


def brute_force_lhv(game):
    """Both parties enumerated; exact rational optimum."""
    A, B, N, M = game.shape
    best = 0
    for fa in itertools.product(range(A), repeat=N):
        for fb in itertools.product(range(B), repeat=M):
            best = max(best, sum(int(game.win[fa[x], fb[y], x, y]) for x in range(N) for y in range(M)))
    return best * game.p


@pytest.mark.parametrize("name,refl,e,s", [
    ("cycle-3", False, False, True), ("cycle-3", False, True, True), ("cycle-4", True, False, False),
    ("cycle-4", False, True, True), ("dircycle-4", True, False, True), ("cycle-5", False, False, True),
])
def test_lhv_matches_two_sided_brute_force(name, refl, e, s):
    game = make_game(name, refl, 1, e, s)
    rep = lhv_bound(game)
    assert rep.exact == brute_force_lhv(game)
    assert rep.diagnostics["certificate_value"] == pytest.approx(rep.value, abs=1e-15)


@pytest.mark.parametrize("name,refl,t,e,s,expected", [
    ("cubic-2", True, 1, False, False, Fraction(14, 30)),
    ("cycle-6", False, 1, False, True, Fraction(10, 36)),
    ("dircycle-9", True, 2, False, False, Fraction(1, 4)),
    ("cycle-5", False, 2, True, True, Fraction(21, 25)),
    ("cycle-4", True, 1, False, False, Fraction(1, 2)),
])
def test_lhv_known_values(name, refl, t, e, s, expected):
    assert lhv_bound(make_game(name, refl, t, e, s)).exact == expected


def test_lhv_cap():
    with pytest.raises(ScenarioTooLarge):
        lhv_bound(make_game("cycle-5", False, 2, False, True), cap=100)


@pytest.mark.parametrize("name,refl,t,e,s,expected", [
    ("cycle-5", False, 2, True, True, 1.0),
    ("cubic-4", False, 1, False, False, 2 / 7),
    ("cycle-4", True, 1, False, False, 2 / 3),
    ("cycle-9", False, 1, False, True, 2 / 9),
])
def test_ns_known_values(name, refl, t, e, s, expected):
    game = make_game(name, refl, t, e, s)
    rep = ns_bound(game)
    assert rep.value == pytest.approx(expected, abs=1e-9)
    box = rep.certificate
    assert isinstance(box, Box)
    assert box.normalization_error() < 1e-9 and box.signaling_error() < 1e-9
    assert game_value(game, box) == pytest.approx(rep.value, abs=1e-9)


@pytest.mark.parametrize("name,refl,t,e,s,expected", [
    ("cycle-7", False, 1, False, True, 0.27864),
    ("cubic-4", False, 1, True, False, 0.33333),
    ("cycle-4", True, 1, False, False, 0.55556),
])
def test_ml_known_values(name, refl, t, e, s, expected):
    rep = ml_bound(make_game(name, refl, t, e, s))
    assert rep.value == pytest.approx(expected, abs=2e-5)
    d = rep.diagnostics
    assert d["min_eig"] > -1e-7
    assert d["structure_residual"] < 1e-7
    assert d["box_value"] <= rep.value + 1e-6


def test_zero_game():
    base = make_game("cycle-4", True)
    game = BellGame(base.scenario, np.zeros_like(base.win), base.p)
    assert lhv_bound(game).value == 0.0
    assert ns_bound(game).value == pytest.approx(0.0, abs=1e-12)
    assert ml_bound(game).value == pytest.approx(0.0, abs=1e-6)
    assert seesaw(game, restarts=2).value == pytest.approx(0.0, abs=1e-12)


def _random_scenarios(k=30, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < k:
        n = int(rng.integers(3, 7))
        refl, e, s = (bool(v) for v in rng.integers(0, 2, 3))
        out.append((f"cycle-{n}", refl, 1, e, s))
    return out


@pytest.mark.parametrize("name,refl,t,e,s", _random_scenarios())
def test_ordering_chain(name, refl, t, e, s):
    game = make_game(name, refl, t, e, s)
    lhv = lhv_bound(game).value
    ml = ml_bound(game).value
    ns = ns_bound(game).value
    assert lhv <= ml + 1e-7
    assert ml <= ns + 1e-6
    assert ns <= 1.0 + 1e-12


@pytest.mark.parametrize("name,refl,e,s", [("cycle-4", True, False, False), ("cycle-5", False, True, True)])
def test_seesaw_between_lhv_and_ml(name, refl, e, s):
    game = make_game(name, refl, 1, e, s)
    q = seesaw(game, restarts=4, seed=1)
    assert lhv_bound(game).value - 1e-12 <= q.value <= ml_bound(game).value + 1e-6


def test_seesaw_certificate_and_traces():
    game = make_game("cycle-4", True)
    rep = seesaw(game, restarts=5, seed=3)
    qs = rep.certificate
    qs.validate()
    assert game_value(game, quantum_box(qs)) == pytest.approx(rep.value, abs=1e-12)
    assert rep.value == pytest.approx(rep.diagnostics["batch_value"], abs=1e-8)
    assert rep.value >= 0.53333 - 5e-3
    for tr in rep.diagnostics["trace"]:
        assert all(b >= a - 1e-12 for a, b in zip(tr, tr[1:]))


def test_seesaw_without_restarts_is_classical():
    game = make_game("cycle-4", True)
    rep = seesaw(game, restarts=0)
    assert rep.value == pytest.approx(lhv_bound(game).value, abs=1e-12)


def test_seesaw_is_deterministic():
    game = make_game("cycle-3", False, 1, True, True)
    a = seesaw(game, restarts=3, seed=7)
    b = seesaw(game, restarts=3, seed=7)
    assert a.value == b.value
    assert a.diagnostics["restart_values"] == b.diagnostics["restart_values"]


@settings(max_examples=10, deadline=None)
@given(st.permutations(range(1, 6)), st.booleans(), st.booleans(), st.booleans())
def test_relabel_invariance(perm, refl, e, s):
    g = from_catalog("cycle-5", refl)
    a = compile_game(Scenario(g, 1, e, s))
    b = compile_game(Scenario(g.relabel(perm), 1, e, s))
    assert lhv_bound(a).exact == lhv_bound(b).exact
    assert ns_bound(a).value == pytest.approx(ns_bound(b).value, abs=1e-9)


# noise

@pytest.fixture(scope="module")
def noisy_setup():
    game = make_game("cycle-4", True)
    rep = seesaw(game, restarts=5, seed=3)
    return game, rep.certificate, lhv_bound(game).value, rep.value


def test_noise_endpoints(noisy_setup):
    game, qs, lhv, q = noisy_setup
    assert noise_value(qs, game, 1.0) == pytest.approx(q, abs=1e-12)
    # at nu = 0 the state is maximally mixed: value of product of reduced POVM traces
    pa = np.einsum("xaii->xa", qs.povms_a).real / qs.d_a
    pb = np.einsum("ybii->yb", qs.povms_b).real / qs.d_b
    v0 = float(np.einsum("abxy,xa,yb->", game.coeff, pa, pb))
    assert noise_value(qs, game, 0.0) == pytest.approx(v0, abs=1e-12)


def test_noise_is_affine(noisy_setup):
    game, qs, lhv, q = noisy_setup
    nus = np.linspace(0, 1, 7)
    vals = np.array([noise_value(qs, game, v) for v in nus])
    v0, v1 = vals[0], vals[-1]
    assert np.max(np.abs(vals - (v0 + nus * (v1 - v0)))) < 1e-12
    assert noise_value(qs, game, 0.5) == pytest.approx((v0 + v1) / 2, abs=1e-12)


def test_nu_crit(noisy_setup):
    game, qs, lhv, q = noisy_setup
    cn = nu_crit(qs, game, lhv)
    assert 0 < cn.nu < 1 and not cn.degenerate
    assert noise_value(qs, game, cn.nu) == pytest.approx(lhv, abs=1e-12)
    assert sum(x * x for x in cn.schmidt) == pytest.approx(1.0, abs=1e-10)


def test_nu_crit_no_advantage(noisy_setup):
    game, qs, lhv, q = noisy_setup
    with pytest.raises(NoAdvantage):
        nu_crit(qs, game, q + 1e-3)
    classical = seesaw(game, restarts=0).certificate
    with pytest.raises(NoAdvantage):
        nu_crit(classical, game, lhv)


def test_nu_crit_degenerate(noisy_setup):
    game, qs, lhv, q = noisy_setup
    v0 = noise_value(qs, game, 0.0)
    cn = nu_crit(qs, game, v0 - 1e-3)
    assert cn.degenerate and cn.nu == 0.0


def test_noise_rejects_out_of_range(noisy_setup):
    game, qs, _, _ = noisy_setup
    with pytest.raises(ValueError):
        noise_value(qs, game, 1.5)
