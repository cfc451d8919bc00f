"""Semicharacter duals, spine compactifications and spectrum numerics for
semigroup compactifications of groups."""

from .axb import AxbElement, GridRep, TildeAxb, build_operator, tilde_mul, tilde_polar, tilde_star, walter_residual_axb
from .cone import ConeSemicharacter, ProductCone, eval_cone, transport_character
from .errors import (DomainError, EberleinError, FitFailure, InvalidInput, InvalidSpec, InvalidSpine,
                     ResourceLimit, Underdetermined, UnsupportedFamily)
from .opcompact import (GeneratedMatrixGroup, convex_unitary_split, polar_decompose, sample_closure,
                        spectrum_membership, walter_residual_diagonal)
from .semigroup import (DiscSemicharacter, NumericalSemigroup, classify_dual, conductor, eval_disc,
                        fit_semicharacter, gcd_of, member)
from .spine import ZERO, SpinePoint, SpineSystem, complement_is_ideal, meet, spine_product
from .xform import (ExpPolyFunction, cayley, gn_pullback, laplace, laplace_basis, shifted_cone_transform,
                    silov_max_modulus, span_equality_rank)

__version__ = "0.1.0"
