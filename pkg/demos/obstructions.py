"""Why an injective f cannot work, and what a bounded search finds.

    python3 demos/obstructions.py
"""
from refinery import StatisticalModel, pentagon, square
from refinery.conjectures import SearchSpec, search_refinement
from refinery.exactfield import format_scalar
from refinery.refinement import counterexample_section

s = counterexample_section()
print("the square as a slice of the tetrahedron:")
for r in s.results:
    form = " ".join(format_scalar(x) for x in r.form)
    if r.extendable:
        print(f"  form ({form}) extends")
    else:
        print(f"  form ({form}) has no extension; certificate verified: {r.certificate_verified}")

for name, C in (("square", square()), ("pentagon", pentagon())):
    M = StatisticalModel.of(C)
    for q in (1, 2):
        res = search_refinement(SearchSpec(M, 4, grid=q))
        print(f"{name}, 4 simplex vertices, grid 1/{q}: {res.verdict} "
              f"({res.stats['candidates']} candidates, rational dependency dim "
              f"{res.stats['rational_dependency_dim']})")
        if res.verdict == "found":
            break
