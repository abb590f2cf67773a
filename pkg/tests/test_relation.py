"""Storage layer: Z-ring entries, indexes, degree-threshold partitioning."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewivm.relation import (HEAVY, LIGHT, Partition, QuadPartition, Relation,
                              SchemaError, UnindexedVariable, bump,
                              quad_partition_strict, strict_partition)


def rel_of(pairs: dict) -> Relation:
    r = Relation(2)
    for t, m in pairs.items():
        r.upsert(t, m)
    return r


class TestUpsert:
    def test_insert_into_empty(self):
        r = Relation(2)
        assert r.upsert((1, 2), 1) == 1
        assert r.size() == 1

    def test_exact_cancellation_clears_entry_and_postings(self):
        r = rel_of({(1, 2): 1})
        assert r.upsert((1, 2), -1) == 0
        assert r.size() == 0
        assert not r.indexes[(0,)] and not r.indexes[(1,)]

    def test_negative_multiplicities_are_legal(self):
        r = rel_of({(1, 2): 1})
        assert r.upsert((1, 2), -3) == -2
        assert r.size() == 1
        assert r.multiplicity((1, 2)) == -2

    def test_arity_mismatch(self):
        with pytest.raises(SchemaError):
            Relation(2).upsert((1, 2, 3), 1)

    def test_zero_delta_rejected(self):
        with pytest.raises(ValueError):
            Relation(2).upsert((1, 2), 0)


class TestMatching:
    def test_selects_exactly_the_matching_entries(self):
        r = rel_of({(1, 2): 1, (1, 3): 2, (4, 5): 1})
        assert dict(r.matching(0, 1)) == {(1, 2): 1, (1, 3): 2}

    def test_absent_key_yields_nothing(self):
        r = rel_of({(1, 2): 1})
        assert list(r.matching(0, 99)) == []

    def test_index_coherent_after_cancellation(self):
        r = rel_of({(1, 2): 1, (1, 3): 2})
        r.upsert((1, 2), -1)
        assert dict(r.matching(0, 1)) == {(1, 3): 2}

    def test_unindexed_variable(self):
        r = Relation(2, index_specs=((0,),))
        r.upsert((1, 2), 1)
        with pytest.raises(UnindexedVariable):
            list(r.matching(1, 2))


class TestStrictPartition:
    def test_degree_at_threshold_goes_heavy(self):
        r = rel_of({(1, b): 1 for b in (1, 2, 3)})
        p = strict_partition(r, 0, 2)
        assert p.heavy.size() == 3 and p.light.size() == 0

    def test_below_threshold_goes_light(self):
        r = rel_of({(1, b): 1 for b in (1, 2, 3)})
        p = strict_partition(r, 0, 5)
        assert p.light.size() == 3 and p.heavy.size() == 0

    def test_mixed_degrees_split(self):
        r = rel_of({(1, 1): 1, (1, 2): 1, (1, 3): 1, (2, 9): 1})
        p = strict_partition(r, 0, 2)
        assert set(p.heavy.keys(0)) == {1}
        assert set(p.light.keys(0)) == {2}
        assert not p.violations(strict=True)

    def test_union_is_preserved(self):
        rng = random.Random(5)
        pairs = {}
        for _ in range(300):
            t = (rng.randrange(12), rng.randrange(12))
            pairs[t] = pairs.get(t, 0) + rng.choice((-2, 1, 3))
        pairs = {t: m for t, m in pairs.items() if m}
        r = rel_of(pairs)
        p = strict_partition(r, 0, 3.5)
        merged = dict(p.heavy.entries)
        for t, m in p.light.entries.items():
            assert t not in merged
            merged[t] = m
        assert merged == pairs


class TestRoute:
    def test_key_in_heavy_routes_heavy(self):
        p = strict_partition(rel_of({(1, b): 1 for b in range(4)}), 0, 2)
        assert p.route(1) == HEAVY

    def test_absent_key_routes_light(self):
        p = Partition(2)
        assert p.route(42) == LIGHT

    def test_force_heavy_overrides(self):
        p = Partition(2)
        assert p.route(42, force_heavy=True) == HEAVY

    def test_idempotent_and_consistent_with_projection(self):
        p = strict_partition(rel_of({(1, 0): 1, (1, 1): 1, (2, 0): 1}), 0, 2)
        for key in (1, 2, 3):
            assert p.route(key) == p.route(key)
        for key in p.heavy.keys(0):
            assert p.route(key) == HEAVY


class TestMoveKey:
    def _make(self):
        p = Partition(2, theta=2)
        for b, m in ((1, 1), (2, -2), (3, 1)):
            p.light.upsert((7, b), m)

        def sink(t, m):
            p.light.upsert(t, -m)
            p.heavy.upsert(t, m)
        return p, sink

    def test_moves_all_and_reports_count(self):
        p, sink = self._make()
        assert p.move_key(7, LIGHT, sink) == 3
        assert p.light.size() == 0
        assert p.heavy.size() == 3

    def test_absent_key_is_noop(self):
        p, sink = self._make()
        assert p.move_key(99, LIGHT, sink) == 0

    def test_multiplicities_survive_tuple_by_tuple(self):
        p, sink = self._make()
        p.move_key(7, LIGHT, sink)
        assert p.heavy.multiplicity((7, 2)) == -2

    def test_round_trip_restores_partition(self):
        p, _ = self._make()
        before = (dict(p.heavy.entries), dict(p.light.entries))

        def to_heavy(t, m):
            p.light.upsert(t, -m)
            p.heavy.upsert(t, m)

        def to_light(t, m):
            p.heavy.upsert(t, -m)
            p.light.upsert(t, m)

        p.move_key(7, LIGHT, to_heavy)
        p.move_key(7, HEAVY, to_light)
        assert (dict(p.heavy.entries), dict(p.light.entries)) == before


def test_random_sequence_keeps_structure_consistent():
    # long mixed run: no zero entries, postings alive, degrees recount
    rng = random.Random(99)
    r = Relation(2)
    shadow = {}
    for step in range(2000):
        t = (rng.randrange(32), rng.randrange(32))
        m = rng.choice((-2, -1, 1, 2))
        r.upsert(t, m)
        nv = shadow.get(t, 0) + m
        if nv:
            shadow[t] = nv
        else:
            del shadow[t]
        if step % 50 == 0:
            r.check_consistency()
            assert dict(r.entries) == shadow
            for x in set(a for a, _ in shadow):
                recount = sum(1 for (a, _b) in shadow if a == x)
                assert r.degree(0, x) == recount
    r.check_consistency()
    assert dict(r.entries) == shadow


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8),
                          st.sampled_from((-2, -1, 1, 2))), max_size=60))
def test_upsert_agrees_with_plain_accumulation(ops):
    r = Relation(2)
    shadow = {}
    for a, b, m in ops:
        r.upsert((a, b), m)
        nv = shadow.get((a, b), 0) + m
        if nv:
            shadow[(a, b)] = nv
        else:
            del shadow[(a, b)]
    assert dict(r.entries) == shadow
    r.check_consistency()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=40),
       st.floats(0.5, 6.0))
def test_strict_partition_conditions_hold(pairs, theta):
    r = Relation(2)
    for t in pairs:
        r.upsert(t, 1)
    p = strict_partition(r, 0, theta)
    assert not p.violations(theta, strict=True)
    assert p.total_size() == r.size()


class TestQuadPartition:
    def test_strict_assignment_on_both_variables(self):
        r = rel_of({(1, 5): 1, (1, 6): 1, (1, 7): 1,
                    (2, 5): 1, (3, 5): 1, (4, 9): 1})
        quad = quad_partition_strict(r, 3)
        # degree(1)=3 heavy on A; degree(5)=3 heavy on B
        assert (1, 5) in quad.parts["hh"].entries
        assert (1, 6) in quad.parts["hl"].entries
        assert (2, 5) in quad.parts["lh"].entries
        assert (4, 9) in quad.parts["ll"].entries
        assert not quad.violations(3)

    def test_route_by_key_status(self):
        r = rel_of({(1, 5): 1, (1, 6): 1, (1, 7): 1, (2, 5): 1, (3, 5): 1})
        quad = quad_partition_strict(r, 3)
        assert quad.route((1, 5)) == "hh"
        assert quad.route((1, 99)) == "hl"
        assert quad.route((99, 5)) == "lh"
        assert quad.route((98, 99)) == "ll"
        assert quad.route((98, 99), force_heavy=True) == "hh"

    def test_restrict_reassigns_everything(self):
        quad = QuadPartition()
        rng = random.Random(3)
        for _ in range(200):
            quad.parts["ll"].upsert((rng.randrange(6), rng.randrange(6)), 1)
        quad.restrict(4)
        assert not quad.violations(4)


def test_bump_drops_cancelled_keys():
    d = {}
    bump(d, "k", 2)
    bump(d, "k", -2)
    assert d == {}
    bump(d, "k", -1)
    assert d == {"k": -1}
