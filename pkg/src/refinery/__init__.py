"""Exact computations with convex state spaces, their form spaces and simplicial refinements."""
from .exactfield import QuadScalar, format_scalar, parse_scalar, scalar, sqrt
from .polytope import (
    HRep,
    InfeasibleError,
    Polytope,
    UnboundedError,
    faces_meet,
    minimal_face,
    parallelotope,
    pentagon,
    simplex,
)
from .lp import LinearProgram, solve, verify_farkas
from .formspace import AffineForm, FormSpace, bounding_direction_count, build_form_space, extreme_forms
from .affmap import PartialAffineMap, compose, image, is_injective_on_domain, is_onto, preimage
from .refinement import (
    Refinement,
    StatisticalModel,
    counterexample_section,
    example_parallelogram,
    example_pentagon_edges,
    example_pentagon_midpoint,
    holevo_refinement,
    linusson_check,
    maximal_g,
    section_embedding,
    square,
    verify_refinement,
)
from .conjectures import (
    SearchSpec,
    conjecture3_check,
    factor_through_projection,
    g_exists_for_f,
    search_refinement,
)

__version__ = "0.1.0"
