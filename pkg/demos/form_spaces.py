"""Form spaces of a few small polytopes, with OFF files for a 3-D viewer.

    python3 demos/form_spaces.py [outdir]
"""
import sys
from pathlib import Path

from refinery import build_form_space, pentagon, simplex, square
from refinery.cli import form_matrix
from refinery.exactfield import format_scalar
from refinery.fileio import export_off

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
out.mkdir(parents=True, exist_ok=True)

for n in range(1, 5):
    F = build_form_space(simplex(n))
    print(f"simplex({n}): {len(F.space.vertices)} extreme forms, a {F.dim}-cube")

sq = build_form_space(square())
print(f"square: {len(sq.space.vertices)} extreme forms, {len(sq.space.inequalities)} facets (octahedron)")

pent = build_form_space(pentagon())
print(f"pentagon: {len(pent.space.vertices)} extreme forms, {len(pent.space.inequalities)} facets")
print("values of the non-constant extreme forms on the pentagon's vertices (one per complement pair):")
for row in form_matrix(pent):
    print("   ", "  ".join(f"{format_scalar(x):>18}" for x in row))

export_off(sq.space, out / "octahedron.off")
export_off(pent.space, out / "trapezohedron.off")
export_off(build_form_space(simplex(3)).space, out / "hypercube_projected.off", project=True)
print(f"wrote OFF files to {out.resolve()}")
