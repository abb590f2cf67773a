"""The same machinery behind other query shapes.

Two generalizations ship alongside the triangle engines: an
endpoint-weighted two-hop path over four relations (the middle relations
partitioned on both variables, a family of chained views absorbing every
part combination) and cyclic counts of any degree n, where each of the n
relations misses exactly one variable and degree 3 is the triangle again.
"""

import random

from skewivm import LWEngine, Path4Engine
from skewivm.oracle import (LWTracker, Path4Tracker, brute_force_lw,
                            brute_force_path4)

print("path count: R(a) * S(a,b) * T(b,c) * U(c)")
eng = Path4Engine(0.5)
for rel, t in (("R", (1,)), ("S", (1, 2)), ("T", (2, 3)), ("U", (3,))):
    eng.on_update(rel, t, 1)
print(f"  one full path: count={eng.answer()}")
eng.on_update("U", (3,), 2)
print(f"  tripling the far endpoint weight: count={eng.answer()}")

rng = random.Random(8)
eng = Path4Engine(0.5)
trk = Path4Tracker()
for _ in range(2500):
    rel = "RSTU"[rng.randrange(4)]
    t = ((rng.randrange(10),) if rel in "RU"
         else (rng.randrange(10), rng.randrange(10)))
    m = rng.choice((-1, 1, 1))
    eng.on_update(rel, t, m)
    trk.update(rel, t, m)
assert eng.answer() == trk.count == brute_force_path4(trk.r, trk.s, trk.t, trk.u)
print(f"  2500 random updates later: count={eng.answer()}, oracle agrees")

print("\ncyclic count of degree 4 over arity-3 relations:")
eng = LWEngine(4, 0.5)
for i, t in ((0, (1, 2, 3)), (1, (2, 3, 4)), (2, (3, 4, 1)), (3, (4, 1, 2))):
    eng.on_update(i, t, 1)
print(f"  one full cycle: count={eng.answer()}")

trk = LWTracker(4)
eng = LWEngine(4, 0.5)
for _ in range(1200):
    i = rng.randrange(4)
    t = tuple(rng.randrange(6) for _ in range(3))
    m = rng.choice((-1, 1, 1))
    eng.on_update(i, t, m)
    trk.update(i, t, m)
assert eng.answer() == trk.count == brute_force_lw([dict(r) for r in trk.rels], 4)
print(f"  1200 random updates later: count={eng.answer()}, oracle agrees")
