"""Four-relation path count: endpoint deltas, indicator views, double minors."""

import itertools
import random

from skewivm.oracle import Path4Tracker, brute_force_path4
from skewivm.path4 import Path4Engine

from helpers import path4_stream


def view_fingerprint(eng: Path4Engine):
    out = {}
    for name in eng.VIEW_NAMES:
        view = getattr(eng, name)
        out[name] = dict(view.entries) if hasattr(view, "entries") else dict(view)
    return out


class TestDeltas:
    def test_single_path_in_any_insertion_order(self):
        base = [("R", (1,)), ("S", (1, 2)), ("T", (2, 3)), ("U", (3,))]
        for perm in itertools.permutations(base):
            eng = Path4Engine(0.5)
            for rel, t in perm:
                eng.on_update(rel, t, 1)
            assert eng.answer() == 1, perm

    def test_endpoint_update_with_empty_middle_is_zero(self):
        eng = Path4Engine(0.5)
        assert eng.update_r(1, 5) == 0
        assert eng.answer() == 0

    def test_insert_then_delete_restores_count_and_every_view(self):
        eng = Path4Engine(0.5)
        for rel, t, m in path4_stream(11, 250, 7):
            eng.on_update(rel, t, m)
        before = (eng.answer(), view_fingerprint(eng))
        eng.update_r(3, 2)
        eng.update_r(3, -2)
        assert (eng.answer(), view_fingerprint(eng)) == before
        lab = eng.s.route((3, 4))
        eng.update_s(lab, (3, 4), 1)
        eng.update_s(lab, (3, 4), -1)
        assert (eng.answer(), view_fingerprint(eng)) == before


class TestIndicators:
    def _engine_with_heavy_b(self):
        # push b=2 heavy on the middle variable of S so its indicator flips
        eng = Path4Engine(0.5)
        for k in range(40):
            eng.on_update("T", (300 + k, 400 + k), 1)
        assert eng.N == 64
        for a in range(12):
            eng.on_update("S", (100 + a, 2), 1)
        assert eng.s.pair_degree(1, 2, "lh", "hh") == 12
        return eng

    def test_presence_not_count(self):
        eng = self._engine_with_heavy_b()
        assert eng.s_ind.get(2) == 1
        eng.on_update("S", (1, 2), 1)
        eng.on_update("S", (1, 2), 1)  # same tuple twice: multiplicity 2
        assert eng.s_ind.get(2) == 1
        assert eng.lookup("S", (1, 2)) == 2

    def test_flag_clears_only_when_the_last_support_dies(self):
        eng = self._engine_with_heavy_b()
        support = [t for t in list(eng.s.parts["lh"].entries) if t[1] == 2]
        for t in support[:-1]:
            eng.update_s("lh", t, -eng.s.parts["lh"].entries[t])
            assert eng.s_ind.get(2) == 1
        last = support[-1]
        eng.update_s("lh", last, -eng.s.parts["lh"].entries[last])
        assert 2 not in eng.s_ind

    def test_masked_views_follow_the_flip(self):
        eng = Path4Engine(0.5)
        for k in range(40):
            eng.on_update("R", (500 + k,), 1)
        eng.on_update("R", (1,), 1)
        eng.on_update("U", (9,), 1)
        # make b=2 heavy on T's first variable, flipping its indicator
        for c in range(12):
            eng.on_update("T", (2, 700 + c), 1)
        assert eng.t_ind.get(2) == 1
        eng.on_update("S", (1, 2), 1)
        views = eng.recompute_views()
        assert view_fingerprint(eng)["r_s_hl_t_ind"] == views["r_s_hl_t_ind"]
        assert view_fingerprint(eng)["s_ind_t_lh_u"] == views["s_ind_t_lh_u"]


class TestPartBranches:
    def test_a_heavy_b_light_update_leaves_unrelated_views_alone(self):
        eng = Path4Engine(0.5)
        for rel, t, m in path4_stream(21, 300, 6):
            eng.on_update(rel, t, m)
        before = view_fingerprint(eng)
        eng.update_s("hl", (901, 902), 1)  # fresh values, no joins anywhere
        after = view_fingerprint(eng)
        assert after["s_hh_t_lh"] == before["s_hh_t_lh"]
        assert after["rs_lh"] == before["rs_lh"]
        assert after["s_ind"] == before["s_ind"]
        eng.update_s("hl", (901, 902), -1)
        assert view_fingerprint(eng) == before

    def test_scripted_updates_match_brute_force(self):
        rng = random.Random(31)
        eng = Path4Engine(0.5)
        trk = Path4Tracker()
        script = path4_stream(31, 50, 5)
        for rel, t, m in script:
            eng.on_update(rel, t, m)
            trk.update(rel, t, m)
            assert eng.answer() == trk.count == brute_force_path4(trk.r, trk.s, trk.t, trk.u)


class TestRebalancing:
    def test_two_minor_rebalances_can_fire_on_one_update(self):
        eng = Path4Engine(0.5)
        for k in range(8):
            eng.on_update("T", (50 + k, 60 + k), 1)
        for k in range(4):
            eng.on_update("T", (50 + k, 60 + k), -1)
        assert eng.N == 16 and eng.db_size == 4  # threshold 4, light cap 6
        for b in range(5):
            eng.on_update("S", (1, 100 + b), 1)
        for a in range(5):
            eng.on_update("S", (200 + a, 2), 1)
        assert eng.counters.rebalance_minor == 0
        eng.on_update("S", (1, 2), 1)
        assert eng.counters.rebalance_minor == 2
        assert eng.s.pair_degree(0, 1, "hl", "hh") == 6
        assert eng.s.pair_degree(1, 2, "lh", "hh") == 6
        assert not eng.check_invariants()

    def test_counts_and_views_survive_rebalances(self):
        rng = random.Random(41)
        eng = Path4Engine(0.5)
        trk = Path4Tracker()
        for step in range(1400):
            rel = ("R", "S", "T", "U")[rng.randrange(4)]
            if rel in ("R", "U"):
                t = (rng.randrange(30),)
            else:
                t = (rng.randrange(3), rng.randrange(150))
            m = rng.choice((-1, 1, 1))
            eng.on_update(rel, t, m)
            trk.update(rel, t, m)
            assert eng.answer() == trk.count
        assert eng.counters.rebalance_minor > 0
        assert eng.counters.rebalance_major > 0
        recomputed = eng.recompute_views()
        fp = view_fingerprint(eng)
        for name in eng.VIEW_NAMES:
            view = recomputed[name]
            want = dict(view.entries) if hasattr(view, "entries") else dict(view)
            assert fp[name] == want, name


class TestOracleEquivalence:
    def test_all_eps_all_prefixes(self):
        for seed in range(5):
            stream = path4_stream(600 + seed, 280, 9)
            trk = Path4Tracker()
            expected = []
            for rel, t, m in stream:
                trk.update(rel, t, m)
                expected.append(trk.count)
            assert expected[-1] == brute_force_path4(trk.r, trk.s, trk.t, trk.u)
            for eps in (0.0, 0.25, 0.5, 0.75, 1.0):
                eng = Path4Engine(eps)
                for i, (rel, t, m) in enumerate(stream):
                    eng.on_update(rel, t, m)
                    assert eng.answer() == expected[i]
                assert not eng.check_invariants()


def test_preprocess_matches_streaming():
    rng = random.Random(47)
    db = {
        "R": {(rng.randrange(8),): rng.choice((-1, 1, 2)) for _ in range(10)},
        "S": {(rng.randrange(8), rng.randrange(8)): rng.choice((-1, 1, 2)) for _ in range(30)},
        "T": {(rng.randrange(8), rng.randrange(8)): rng.choice((-1, 1, 2)) for _ in range(30)},
        "U": {(rng.randrange(8),): rng.choice((-1, 1, 2)) for _ in range(10)},
    }
    built = Path4Engine.preprocess(db, 0.5)
    streamed = Path4Engine(0.5)
    for name, rel in db.items():
        for t, m in rel.items():
            streamed.on_update(name, t, m)
    want = brute_force_path4({k[0]: v for k, v in db["R"].items()}, db["S"], db["T"],
                             {k[0]: v for k, v in db["U"].items()})
    assert built.answer() == streamed.answer() == want
    assert not built.check_invariants()
