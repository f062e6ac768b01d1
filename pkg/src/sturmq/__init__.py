"""Sturm-Liouville eigenpairs and quantitative oscillation checks."""

from .coefficients import (INFINITY, BoundaryCondition, CoefficientSet, Polynomial, ProblemSpec,
                           preset_airy, preset_dirichlet_laplacian, problem_from_json)
from .domlemma import LemmaInstance, LemmaWitness, find_witness, lemma_bound
from .eigensolver import (Basis, EigenPair, SpectrumMeta, airy_determinant, compute_basis,
                          prufer_phase, solve_eigenpair, spectrum_meta, weyl_constant)
from .errors import SturmError
from .grid import (Grid, GridFunction, count_sign_changes, derivative, h1_seminorm,
                   inner_product, integrate, l2_norm, sample)
from .special import airy_ai, airy_bi, gamma_function
from .spectral import (Expansion, expand, heat_flow, iterate_inverse, root_monotonicity_check,
                       sobolev_ratio, synthesize)
from .verifier import (VerificationReport, bound_value, kappa, localized_dipole,
                       sharpness_probe, strong_oscillation_check, verify_theorem)

__version__ = "0.1.0"
