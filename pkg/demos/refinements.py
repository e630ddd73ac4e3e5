"""The projection refinement and the three worked refinements, verified axiom by axiom.

    python3 demos/refinements.py
"""
import time

from refinery import StatisticalModel, holevo_refinement, pentagon, verify_refinement
from refinery.refinement import example_parallelogram, example_pentagon_edges, example_pentagon_midpoint

M = StatisticalModel.of(pentagon())
R = holevo_refinement(M)
rep = verify_refinement(R, M)
print(f"projection of the 4-simplex onto the pentagon: {rep.summary()} ({rep.pairs_checked} vertex pairs)")
print(f"  g is defined on a {R.g.domain.dim}-dimensional polytope with {len(R.g.domain.vertices)} vertices")

for build in (example_parallelogram, example_pentagon_edges, example_pentagon_midpoint):
    t = time.perf_counter()
    b = build()
    print(f"{build.__name__}: {b.report.summary()} [{time.perf_counter() - t:.1f}s]")
    for name, value in b.features.items():
        print(f"    {name}: {value}")
