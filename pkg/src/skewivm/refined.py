"""Triangle counting with two-variable relation partitions.

Same query and same update-time budget as the base engine, but every
relation is split on the degrees of both of its variables, giving four
parts (hh, hl, lh, ll). The payoff is space: each wedge view now joins a
part that is heavy on the exported variable with one that is heavy on the
other exported variable, so its size is capped both by "entries times
light budget" and by "heavy keys squared", which is linear at the balanced
exponent 1/2.

Update deltas split into sixteen part combinations per neighbor pair;
blocks sharing a scan are evaluated together:

  * next heavy on the join variable and second heavy on its own key:
    scan the second neighbor's heavy-keyed parts at the update's shared
    value, probing both next-relation candidates;
  * next heavy-heavy against second light: scan the next relation's
    heavy-heavy part (few distinct second values), probing the light part;
  * next heavy-light against second light-light: scan the second's
    light-light entries at the shared value;
  * next heavy-light against second light-heavy: the wedge lookup;
  * next light against second heavy: smaller side by the tuning exponent;
  * next light against second light: scan the next side.

Wedge maintenance only fires for updates landing in an hl part (own wedge)
or an lh part (preceding wedge). Minor rebalancing checks both variables
of the updated tuple, each against the aggregate degree of the two parts
sharing that variable's status, and can fire twice for one update; the
second check runs against the already-moved state.
"""

from __future__ import annotations

from .metrics import OpCounters
from .relation import (HEAVY, IDX0, IDX1, LIGHT, QuadPartition, Relation,
                       bump, quad_partition_strict)

REL_NAMES = ("R", "S", "T")


class RefinedTriangleEngine:
    """Triangle count over four-way partitioned relations."""

    REL = REL_NAMES

    def __init__(self, eps: float = 0.5, counters: OpCounters | None = None):
        if not 0.0 <= eps <= 1.0:
            raise ValueError("eps outside [0, 1]")
        self.eps = float(eps)
        self.N = 1
        self.quads = [QuadPartition() for _ in range(3)]
        # wedges[i][(x, z)] = sum_y hl_i(x, y) * lh_{i+1}(y, z)
        self.wedges: list[dict] = [{}, {}, {}]
        self.q = 0
        self.db_size = 0
        self.counters = counters if counters is not None else OpCounters()

    def _theta(self) -> float:
        return self.N ** self.eps

    def rel_index(self, rel) -> int:
        return rel if isinstance(rel, int) else REL_NAMES.index(rel)

    def answer(self) -> int:
        return self.q

    def lookup(self, rel, t: tuple) -> int:
        quad = self.quads[self.rel_index(rel)]
        return sum(p.entries.get(t, 0) for p in quad.parts.values())

    def space_used(self) -> int:
        return (sum(q.total_size() for q in self.quads)
                + sum(len(w) for w in self.wedges))

    # -- update procedures --------------------------------------------------

    def _delta_sum(self, i: int, x, y) -> int:
        c = self.counters
        i1 = i - 2 if i >= 2 else i + 1
        i2 = i - 1 if i >= 1 else i + 2
        nxt = self.quads[i1].parts
        snd = self.quads[i2].parts
        acc = 0

        n_hh, n_hl, n_lh, n_ll = (nxt["hh"].entries, nxt["hl"].entries,
                                  nxt["lh"].entries, nxt["ll"].entries)
        s_hh, s_hl, s_lh, s_ll = (snd["hh"].entries, snd["hl"].entries,
                                  snd["lh"].entries, snd["ll"].entries)

        # next heavy on join var, second heavy on own key
        for second in (snd["hh"], snd["hl"]):
            posts = second.indexes[IDX1].get(x)
            if posts:
                c.iterations += len(posts)
                se = second.entries
                for u in posts:
                    z = u[0]
                    ms = n_hh.get((y, z), 0) + n_hl.get((y, z), 0)
                    if ms:
                        acc += ms * se[u]

        # next heavy-heavy, second light on own key
        posts = nxt["hh"].indexes[IDX0].get(y)
        if posts:
            c.iterations += len(posts)
            for u in posts:
                z = u[1]
                mt = s_ll.get((z, x), 0) + s_lh.get((z, x), 0)
                if mt:
                    acc += n_hh[u] * mt

        # next heavy-light, second light-light
        posts = snd["ll"].indexes[IDX1].get(x)
        if posts:
            c.iterations += len(posts)
            for u in posts:
                ms = n_hl.get((y, u[0]))
                if ms:
                    acc += ms * s_ll[u]

        # next heavy-light, second light-heavy: the wedge
        c.lookups += 1
        acc += self.wedges[i1].get((y, x), 0)

        # next light, second heavy: smaller side
        if self.eps <= 0.5:
            for nxt_rel in (nxt["lh"], nxt["ll"]):
                posts = nxt_rel.indexes[IDX0].get(y)
                if posts:
                    c.iterations += len(posts)
                    ne = nxt_rel.entries
                    for u in posts:
                        z = u[1]
                        mt = s_hh.get((z, x), 0) + s_hl.get((z, x), 0)
                        if mt:
                            acc += ne[u] * mt
        else:
            for second in (snd["hh"], snd["hl"]):
                posts = second.indexes[IDX1].get(x)
                if posts:
                    c.iterations += len(posts)
                    se = second.entries
                    for u in posts:
                        z = u[0]
                        ms = n_lh.get((y, z), 0) + n_ll.get((y, z), 0)
                        if ms:
                            acc += ms * se[u]

        # next light, second light
        for nxt_rel in (nxt["lh"], nxt["ll"]):
            posts = nxt_rel.indexes[IDX0].get(y)
            if posts:
                c.iterations += len(posts)
                ne = nxt_rel.entries
                for u in posts:
                    z = u[1]
                    mt = s_ll.get((z, x), 0) + s_lh.get((z, x), 0)
                    if mt:
                        acc += ne[u] * mt
        return acc

    def apply_update(self, rel, lab: str, t: tuple, m: int) -> int:
        """Apply a delta routed to part ``lab``; returns the count change."""
        i = self.rel_index(rel)
        x, y = t
        c = self.counters
        dq = m * self._delta_sum(i, x, y)
        self.q += dq

        i1 = i - 2 if i >= 2 else i + 1
        i2 = i - 1 if i >= 1 else i + 2
        if lab == "hl":
            w = self.wedges[i]
            src = self.quads[i1].parts["lh"]
            posts = src.indexes[IDX0].get(y)
            if posts:
                c.iterations += len(posts)
                se = src.entries
                for u in posts:
                    bump(w, (x, u[1]), m * se[u])
        elif lab == "lh":
            w = self.wedges[i2]
            src = self.quads[i2].parts["hl"]
            posts = src.indexes[IDX1].get(x)
            if posts:
                c.iterations += len(posts)
                se = src.entries
                for u in posts:
                    bump(w, (u[0], y), m * se[u])

        new = self.quads[i].parts[lab].upsert(t, m)
        self.db_size += (1 if new == m else 0) - (1 if new == 0 else 0)
        return dq

    def on_update(self, rel, t: tuple, m: int) -> None:
        if m == 0:
            raise ValueError("updates must carry a nonzero multiplicity")
        i = self.rel_index(rel)
        quad = self.quads[i]
        self.counters.lookups += 1
        lab = quad.route(t, force_heavy=(self.eps == 0.0))
        self.apply_update(i, lab, t, m)

        if self.db_size == self.N:
            self.N *= 2
            self.major_rebalance()
        elif self.db_size < self.N // 4:
            self.N = self.N // 2 - 1
            assert self.N >= 1
            self.major_rebalance()
        else:
            theta = self._theta()
            # first variable, then second, against the live state
            self._minor_check(i, 0, t[0], theta)
            self._minor_check(i, 1, t[1], theta)

    def _minor_check(self, i: int, var: int, key, theta: float) -> None:
        quad = self.quads[i]
        if var == 0:
            light_pair, heavy_pair = ("ll", "lh"), ("hl", "hh")
            moves_up = (("ll", "hl"), ("lh", "hh"))
            moves_down = (("hl", "ll"), ("hh", "lh"))
        else:
            light_pair, heavy_pair = ("ll", "hl"), ("lh", "hh")
            moves_up = (("ll", "lh"), ("hl", "hh"))
            moves_down = (("lh", "ll"), ("hh", "hl"))
        if (quad.pair_has_key(var, key, *light_pair)
                and quad.pair_degree(var, key, *light_pair) >= 1.5 * theta):
            self.minor_rebalance(i, var, key, moves_up)
        elif (quad.pair_has_key(var, key, *heavy_pair)
              and quad.pair_degree(var, key, *heavy_pair) < 0.5 * theta):
            self.minor_rebalance(i, var, key, moves_down)

    def minor_rebalance(self, i: int, var: int, key, pairs) -> int:
        """Move one key's tuples across both affected part pairs."""
        c = self.counters
        c.rebalance_minor += 1
        quad = self.quads[i]
        moved = 0
        for src_lab, dst_lab in pairs:
            src = quad.parts[src_lab]
            posts = src.indexes[(var,)].get(key)
            if not posts:
                continue
            for t in list(posts):
                m = src.entries[t]
                self.apply_update(i, src_lab, t, -m)
                self.apply_update(i, dst_lab, t, m)
                c.moves += 1
                moved += 1
        return moved

    def major_rebalance(self) -> None:
        c = self.counters
        c.rebalance_major += 1
        theta = self._theta()
        for quad in self.quads:
            c.moves += quad.restrict(theta)
        self.wedges = [self._build_wedge(i) for i in range(3)]

    def _build_wedge(self, i: int) -> dict:
        # the hl side's scan per entry is already capped by both exponents
        c = self.counters
        i1 = i - 2 if i >= 2 else i + 1
        h = self.quads[i].parts["hl"]
        l = self.quads[i1].parts["lh"]
        w: dict = {}
        if not h.entries or not l.entries:
            return w
        l_idx = l.indexes[IDX0]
        le = l.entries
        for t, mh in h.entries.items():
            posts = l_idx.get(t[1])
            if posts:
                c.iterations += len(posts)
                x = t[0]
                for u in posts:
                    bump(w, (x, u[1]), mh * le[u])
        return w

    @classmethod
    def preprocess(cls, db: dict, eps: float = 0.5,
                   counters: OpCounters | None = None) -> "RefinedTriangleEngine":
        eng = cls(eps, counters)
        rels = []
        total = 0
        for name in REL_NAMES:
            r = Relation(2)
            for t, m in dict(db.get(name, {})).items():
                if m:
                    r.upsert(tuple(t), m)
            rels.append(r)
            total += len(r.entries)
        eng.N = 2 * total + 1
        eng.db_size = total
        theta = eng._theta()
        eng.quads = [quad_partition_strict(r, theta) for r in rels]
        eng.wedges = [eng._build_wedge(i) for i in range(3)]
        q = 0
        for part in eng.quads[0].parts.values():
            for t, m in part.entries.items():
                q += m * eng._delta_sum(0, t[0], t[1])
        eng.q = q
        return eng

    def recompute_wedge(self, i: int) -> dict:
        saved = self.counters
        self.counters = OpCounters()
        try:
            return self._build_wedge(i)
        finally:
            self.counters = saved

    def check_invariants(self) -> list[str]:
        out = []
        if not (self.N // 4 <= self.db_size < self.N):
            out.append(f"size invariant broken: N={self.N} db={self.db_size}")
        theta = self._theta()
        for i in range(3):
            for v in self.quads[i].violations(theta):
                out.append(f"{REL_NAMES[i]}: {v}")
        return out
