"""Exact finite-field toolkit for isolated classes in SL_3(q) and SU_3(q),
the G_2(q) chirality criterion, and word maps on small groups."""

__version__ = "0.1.0"

from .conjugacy import (ConjugacyDecision, DetNormSubgroup, brute_force_conjugator, centralizer_basis,  # noqa: E402
                        decide_sl3, decide_su3, det_norm_group, gl_conjugator, is_real, splitting_count,
                        unitary_conjugator)
from .ffield import (FieldElem, FieldSpec, NormOneGroup, cube_root_solvable, frobenius_bar, make_field,  # noqa: E402
                     norm_one_subgroup, primitive_root_of_unity)
from .g2 import ChiralityVerdict, ZornElement, chirality_verdict, sl3_automorphism, zorn_multiply  # noqa: E402
from .isolated import (IsolatedReport, canonical_reps_sl3, canonical_reps_su3, enumerate_isolated,  # noqa: E402
                       is_isolated, theorem_verdict)
from .matrix import SquareMatrix, format_matrix, group_membership, parse_matrix, poly_invariants  # noqa: E402
from .wordmap import (GroupTable, InversionCertificate, Word, automorphism_invariance_check,  # noqa: E402
                      chirality_search, evaluate, inversion_certificate, parse_word, word_image)
