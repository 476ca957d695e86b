"""Classical affine W-algebras as joint kernels of screening derivations.

The package works over the field Q(k) of rational functions in the level and
covers Lie algebra data and good gradings, differential polynomials,
lambda-brackets, concrete Poisson vertex algebras, screening kernels, and the
loop-group vector fields that realize them geometrically.
"""
from .coeffs import K, ONE, ZERO, RatFunc, as_coeff, parse_ratfunc
from .diffpoly import Atom, DiffPoly, Variable, d, parse, partial, variational
from .lambdas import BracketTable, LambdaPoly, check_jacobi, check_skew, master_bracket
from .liealg import (AdxGrading, FReport, LieAlgebra, Sl2Triple, build_algebra, build_gl,
                     build_simple, check_condition_F, default_y, grade, parse_element,
                     partition_triple, principal_triple, render_element, scan_y)
from .pva import (Derivation, LocalFunctional, PvaSpec, affine_pva, bg_system, center_functionals,
                  eta, eta_kernel, functional, local_bracket, local_bracket_variational, tensor)
from .screening import (KernelBasis, ResourceLimitError, ScreeningSystem, build_system,
                        check_subalgebra, generators, hamiltonians, joint_kernel)
from .loopgeo import LoopContext, LoopElt, verify_left_right_commutator, verify_dual_frame_derivative, verify_screening_realization

__version__ = "0.1.0"

__all__ = [
    "K", "ONE", "ZERO", "RatFunc", "as_coeff", "parse_ratfunc",
    "Atom", "DiffPoly", "Variable", "d", "parse", "partial", "variational",
    "BracketTable", "LambdaPoly", "check_jacobi", "check_skew", "master_bracket",
    "AdxGrading", "FReport", "LieAlgebra", "Sl2Triple", "build_algebra", "build_gl",
    "build_simple", "check_condition_F", "default_y", "grade", "parse_element",
    "partition_triple", "principal_triple", "render_element", "scan_y",
    "Derivation", "LocalFunctional", "PvaSpec", "affine_pva", "bg_system",
    "center_functionals", "eta", "eta_kernel", "functional", "local_bracket",
    "local_bracket_variational", "tensor",
    "KernelBasis", "ResourceLimitError", "ScreeningSystem", "build_system",
    "check_subalgebra", "generators", "hamiltonians", "joint_kernel",
    "LoopContext", "LoopElt", "verify_left_right_commutator", "verify_dual_frame_derivative", "verify_screening_realization",
]
