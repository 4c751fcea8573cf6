"""Numerical companion to the sqrt(2) von Neumann inequality on the annulus ``{r < |z| < 1}``."""

from ._linalg import DomainError, IllConditionedError
from .annulus import Annulus, KernelKind, embed_b, gram, kernel_eval, verify_kernel_identities
from .calculus import (HereditarySeries, apply_function, apply_hereditary, factor_psd,
                       hereditary_from_samples, involution, model_kernel_check)
from .laurent import LaurentPoly, coeffs_from_samples, g_family, norms, sup_norm
from .multspace import (rescaling_inequalities, shift_kernel_identity, mult_matrix, mult_norm,
                        pick_lower_bound, shift_report, vn_experiment)
from .operators import (check_membership, counterexample, defect, op_norm, sample_member,
                        spectrum)
from .pickext import (PickProblem, min_extension_norm, min_norm_interpolant, pullback_checks,
                      extension_check)

__version__ = "0.1.0"
