"""Flat affine structures on the two-torus.

Affine maps and the universal cover of GL+(2,R), the cone of commutative
associative products on R^2 and its GL(2,R)-orbits, étale development maps,
quadrilateral gluing, the classification of tori, conjugacy on Hom(Z^2, G)
and SVG rendering.
"""

from .affine import AffineMap2, EigenClass2, eig2, exp_affine, expm2, logm2, phi, rotation_ccw, rotation_k
from .algebra import (
    A,
    B,
    C1,
    C2,
    D,
    STRATA,
    T,
    AlgebraProduct,
    Divergent,
    OneParamSubgroup,
    act,
    associativity_residual,
    classify_algebra,
    degenerate,
    degeneration_library,
    in_cone,
    invariants,
    is_complete,
    model_product,
    parse_subgroup,
)
from .charvariety import (
    HomPoint,
    branched_witness,
    hom_conjugate_in,
    local_injectivity_probe,
    nonclosed_witness,
)
from .errors import AffineTorusError, NumericDegeneracy, ValidationError
from .etale import HolonomyPair, develop, holonomy_of, model_group_element, rho
from .gl2cover import (
    GLPLUS,
    GLTILDE,
    PGL,
    TAU,
    GLTildeElement,
    conj,
    conjugate_in,
    expansion_class,
    has_nonzero_rotation,
    inv,
    iwasawa,
    level,
    lift,
    mul,
)
from .gluing import GluingDatum, Tiling, polygon_from_holonomy, solve_gluing, tile, verify_gluing
from .render import RenderOptions, degeneration_frames, render_structure, render_tiling
from .theta_suite import path_lift_theta, theta_lemma_suite
from .tori import (
    Hopf,
    TABk,
    TransInvariant,
    brick_decomposition,
    classify_structure,
    dilation_path,
    make_hopf,
    make_TABk,
    make_trans,
)

__version__ = "0.1.0"
