"""Cyclic count queries of configurable degree.

Degree n joins n relations of arity n-1 over variables 0..n-1; relation i
ranges over variables i, i+1, ..., i+n-2 (cyclically) and omits variable
i-1. Degree 3 is exactly the triangle count. Each relation is partitioned
on its leading variable.

An update to relation v fixes every variable except v-1, so all delta work
reduces to enumerating candidates for that one free variable:

  * all parts heavy: candidates from relation v-1's heavy part, whose
    leading variable is the free one, so candidates are capped by the
    number of distinct heavy keys;
  * every non-aggregated relation heavy, relation v-1 light: a
    constant-time lookup in the auxiliary view keyed by the update tuple;
  * some other relation light, relation v-1 heavy: candidates from the
    first light relation (per-key light budget) or from relation v-1's
    heavy part, whichever side the tuning exponent favors;
  * some other relation light, relation v-1 light: candidates from the
    first light relation.

The auxiliary view ``views[v]`` aggregates variable v-1 out of the join of
relation v-1's light part with the heavy parts of all remaining relations
(other than v). That shape makes the constant-time case above work and
stays maintainable: an update to a heavy member scans the light member at
its fixed leading key, an update to the light member scans relation v-2's
heavy part, whose leading variable is again the free one. At degree 3 the
views and all strategies coincide with the triangle engine's.
"""

from __future__ import annotations

from itertools import product

from .metrics import OpCounters
from .relation import HEAVY, LIGHT, Partition, Relation, bump, strict_partition


def lw_schemas(n: int) -> list[tuple[int, ...]]:
    """Global variables carried by each relation, in schema order."""
    if n < 3:
        raise ValueError("degree must be at least 3")
    return [tuple((i + k) % n for k in range(n - 1)) for i in range(n)]


class LWEngine:
    """Cyclic count of degree n under single-tuple updates."""

    def __init__(self, n: int, eps: float = 0.5, counters: OpCounters | None = None):
        if n < 3:
            raise ValueError("degree must be at least 3")
        if not 0.0 <= eps <= 1.0:
            raise ValueError("eps outside [0, 1]")
        self.n = n
        self.arity = n - 1
        self.eps = float(eps)
        self.N = 1
        self.schemas = lw_schemas(n)
        specs = self._index_specs()
        self.parts = [Partition(self.arity, (0,), 1.0, specs) for _ in range(n)]
        self.views: list[dict] = [{} for _ in range(n)]
        self.q = 0
        self.db_size = 0
        self.counters = counters if counters is not None else OpCounters()

    def _index_specs(self):
        arity = self.arity
        specs = {(0,)}
        for p in range(arity):
            specs.add(tuple(q for q in range(arity) if q != p))
        return tuple(sorted(specs))

    def _theta(self) -> float:
        return self.N ** self.eps

    def rel_index(self, rel) -> int:
        if isinstance(rel, int):
            return rel
        # names R1..Rn
        return int(rel[1:]) - 1

    def answer(self) -> int:
        return self.q

    def lookup(self, rel, t: tuple) -> int:
        p = self.parts[self.rel_index(rel)]
        return p.heavy.entries.get(t, 0) + p.light.entries.get(t, 0)

    def space_used(self) -> int:
        return (sum(p.total_size() for p in self.parts)
                + sum(len(v) for v in self.views))

    # -- variable/tuple plumbing ---------------------------------------------

    def _fill(self, v: int, t: tuple) -> list:
        vals = [None] * self.n
        for pos in range(self.arity):
            vals[(v + pos) % self.n] = t[pos]
        return vals

    def _tuple_of(self, j: int, vals) -> tuple:
        n = self.n
        return tuple(vals[(j + k) % n] for k in range(self.arity))

    def _scan(self, src: int, side: str, free_var: int, vals):
        """Posting set of src's part matching ``vals`` with one variable free.

        Returns (postings, position of the free variable) or (None, pos).
        """
        pc = (free_var - src) % self.n
        spec = tuple(q for q in range(self.arity) if q != pc)
        rel = self.parts[src].side(side)
        if len(spec) == 1:
            key = vals[(src + spec[0]) % self.n]
        else:
            key = tuple(vals[(src + q) % self.n] for q in spec)
        return rel.indexes[spec].get(key), pc

    # -- update procedures ----------------------------------------------------

    def _delta_sum(self, v: int, t: tuple) -> int:
        n = self.n
        c = self.counters
        vals = self._fill(v, t)
        free = (v - 1) % n
        others = [(v + d) % n for d in range(1, n)]
        acc = 0
        for combo in product((HEAVY, LIGHT), repeat=n - 1):
            labs = dict(zip(others, combo))
            u_prev = labs[free]  # relation v-1 owns the free variable
            early_lights = [j for j in others if j != free and labs[j] == LIGHT]
            if not early_lights:
                if u_prev == LIGHT:
                    c.lookups += 1
                    acc += self.views[v].get(t, 0)
                    continue
                src, side = free, HEAVY
            elif u_prev == HEAVY and self.eps > 0.5:
                src, side = free, HEAVY
            else:
                src, side = early_lights[0], LIGHT
            posts, pc = self._scan(src, side, free, vals)
            if not posts:
                continue
            c.iterations += len(posts)
            src_entries = self.parts[src].side(side).entries
            rest = [j for j in others if j != src]
            for u in posts:
                vals[free] = u[pc]
                prod = src_entries[u]
                for j in rest:
                    mj = self.parts[j].side(labs[j]).entries.get(self._tuple_of(j, vals))
                    if not mj:
                        prod = 0
                        break
                    prod *= mj
                acc += prod
        vals[free] = None
        return acc

    def _view_key(self, i: int, vals) -> tuple:
        return self._tuple_of(i, vals)

    def _maintain_views(self, v: int, side: str, t: tuple, m: int) -> None:
        n = self.n
        c = self.counters
        vals = self._fill(v, t)
        free = (v - 1) % n
        if side == HEAVY:
            # heavy member of views[i] for every i outside {v, v+1}
            for i in range(n):
                if i == v or i == (v + 1) % n:
                    continue
                light_member = (i - 1) % n
                posts, pc = self._scan(light_member, LIGHT, free, vals)
                if not posts:
                    continue
                c.iterations += len(posts)
                le = self.parts[light_member].light.entries
                rest = [j for j in range(n) if j not in (v, i, light_member)]
                view = self.views[i]
                for u in posts:
                    vals[free] = u[pc]
                    prod = m * le[u]
                    for j in rest:
                        mj = self.parts[j].heavy.entries.get(self._tuple_of(j, vals))
                        if not mj:
                            prod = 0
                            break
                        prod *= mj
                    if prod:
                        bump(view, self._view_key(i, vals), prod)
        else:
            # light member of exactly views[v+1]
            i = (v + 1) % n
            src = (v - 1) % n  # leading variable is the free one
            posts, pc = self._scan(src, HEAVY, free, vals)
            if posts:
                c.iterations += len(posts)
                he = self.parts[src].heavy.entries
                rest = [j for j in range(n) if j not in (v, i, src)]
                view = self.views[i]
                for u in posts:
                    vals[free] = u[pc]
                    prod = m * he[u]
                    for j in rest:
                        mj = self.parts[j].heavy.entries.get(self._tuple_of(j, vals))
                        if not mj:
                            prod = 0
                            break
                        prod *= mj
                    if prod:
                        bump(view, self._view_key(i, vals), prod)
        vals[free] = None

    def apply_update(self, rel, side: str, t: tuple, m: int) -> int:
        v = self.rel_index(rel)
        if len(t) != self.arity:
            raise ValueError(f"arity {self.arity} tuple expected")
        dq = m * self._delta_sum(v, t)
        self.q += dq
        self._maintain_views(v, side, t, m)
        new = self.parts[v].side(side).upsert(t, m)
        self.db_size += (1 if new == m else 0) - (1 if new == 0 else 0)
        return dq

    def on_update(self, rel, t: tuple, m: int) -> None:
        if m == 0:
            raise ValueError("updates must carry a nonzero multiplicity")
        v = self.rel_index(rel)
        part = self.parts[v]
        key = t[0]
        self.counters.lookups += 1
        side = part.route(key, force_heavy=(self.eps == 0.0))
        self.apply_update(v, side, t, m)

        if self.db_size == self.N:
            self.N *= 2
            self.major_rebalance()
        elif self.db_size < self.N // 4:
            self.N = self.N // 2 - 1
            assert self.N >= 1
            self.major_rebalance()
        else:
            theta = self._theta()
            spec = part.part_spec
            l_posts = part.light.indexes[spec].get(key)
            if l_posts is not None and len(l_posts) >= 1.5 * theta:
                self.minor_rebalance(v, key, LIGHT)
            else:
                h_posts = part.heavy.indexes[spec].get(key)
                if h_posts is not None and len(h_posts) < 0.5 * theta:
                    self.minor_rebalance(v, key, HEAVY)

    def minor_rebalance(self, v: int, key, src_label: str) -> int:
        c = self.counters
        c.rebalance_minor += 1
        dst_label = LIGHT if src_label == HEAVY else HEAVY

        def sink(t, m):
            self.apply_update(v, src_label, t, -m)
            self.apply_update(v, dst_label, t, m)
            c.moves += 1

        return self.parts[v].move_key(key, src_label, sink)

    def major_rebalance(self) -> None:
        c = self.counters
        c.rebalance_major += 1
        theta = self._theta()
        for p in self.parts:
            c.moves += p.restrict(theta)
        self.views = [self._build_view(i) for i in range(self.n)]

    def _build_view(self, i: int) -> dict:
        """Aggregated join behind views[i], outer side chosen by cost."""
        n = self.n
        c = self.counters
        light_member = (i - 1) % n
        anchor = (i + 1) % n
        lrel = self.parts[light_member].light
        arel = self.parts[anchor].heavy
        view: dict = {}
        if not lrel.entries or not arel.entries:
            return view
        est_anchor = len(arel.entries) * 1.5 * self._theta()
        est_light = len(lrel.entries) * 2 * (self.N ** (1.0 - self.eps))
        if est_anchor <= est_light:
            outer, outer_side = anchor, HEAVY
            inner, inner_side = light_member, LIGHT
            inner_free = (anchor - 1) % n  # the one variable outer leaves open
        else:
            outer, outer_side = light_member, LIGHT
            inner, inner_side = (light_member - 1) % n, HEAVY
            inner_free = (light_member - 1) % n
        outer_rel = self.parts[outer].side(outer_side)
        members = {j: (LIGHT if j == light_member else HEAVY)
                   for j in range(n) if j != i}
        rest = [j for j in members if j not in (outer, inner)]
        for t, mo in outer_rel.entries.items():
            vals = self._fill(outer, t)
            posts, pc = self._scan(inner, members[inner], inner_free, vals)
            if not posts:
                continue
            c.iterations += len(posts)
            ie = self.parts[inner].side(members[inner]).entries
            for u in posts:
                vals[inner_free] = u[pc]
                prod = mo * ie[u]
                for j in rest:
                    mj = self.parts[j].side(members[j]).entries.get(self._tuple_of(j, vals))
                    if not mj:
                        prod = 0
                        break
                    prod *= mj
                if prod:
                    bump(view, self._view_key(i, vals), prod)
        return view

    @classmethod
    def preprocess(cls, db, n: int, eps: float = 0.5,
                   counters: OpCounters | None = None) -> "LWEngine":
        """Ready state from full relations, count via the delta strategies.

        The count is linear in relation 0, so it is the one-hop delta sum
        over relation 0's entries against the finished parts and views.
        """
        eng = cls(n, eps, counters)
        rels = []
        total = 0
        source = db if isinstance(db, (list, tuple)) else [db[f"R{i+1}"] for i in range(n)]
        for i in range(n):
            r = Relation(eng.arity, eng._index_specs())
            for t, m in dict(source[i]).items():
                if m:
                    r.upsert(tuple(t), m)
            rels.append(r)
            total += len(r.entries)
        eng.N = 2 * total + 1
        eng.db_size = total
        theta = eng._theta()
        eng.parts = [strict_partition(r, (0,), theta, eng._index_specs()) for r in rels]
        eng.views = [eng._build_view(i) for i in range(n)]
        q = 0
        for side in (eng.parts[0].heavy, eng.parts[0].light):
            for t, m in side.entries.items():
                q += m * eng._delta_sum(0, t)
        eng.q = q
        return eng

    def recompute_view(self, i: int) -> dict:
        saved = self.counters
        self.counters = OpCounters()
        try:
            return self._build_view(i)
        finally:
            self.counters = saved

    def check_invariants(self) -> list[str]:
        out = []
        if not (self.N // 4 <= self.db_size < self.N):
            out.append(f"size invariant broken: N={self.N} db={self.db_size}")
        theta = self._theta()
        for i in range(self.n):
            for v in self.parts[i].violations(theta):
                out.append(f"R{i+1}: {v}")
        return out
