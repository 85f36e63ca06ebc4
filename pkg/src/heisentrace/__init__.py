"""Numerical trace identities for principal symbols on the Heisenberg group."""

from .errors import (
    AccuracyError,
    CapabilityError,
    DomainError,
    HeisentraceError,
    InputError,
    ParseError,
    SingularityError,
    UnboundVariableError,
    UnknownIdentifierError,
    ValidationError,
)
from .hgroup import GroupDims, GroupElement, dilate, group_multiply, inverse, symplectic_form
from .quad import QuadratureSpec, extrapolate_limit, integrate_plane, integrate_sphere, pv_integral_real_line
from .symbols import (
    PrincipalSymbol,
    SymbolEvaluator,
    TailDescriptor,
    eval_w,
    r_function,
    tail_consistency_check,
    tilde_sigma,
)
from .traces import (
    TraceConstants,
    TraceReport,
    check_I_l_vanishing,
    check_I_n_pv,
    check_main_theorem,
    check_proposition,
    regularized_center_ft,
    res,
    tau,
    tau_z,
)
from .weyl import GaussianSymbol, commutator_integral, gaussian_sharp_oracle, sharp

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CapabilityError",
    "DomainError",
    "GaussianSymbol",
    "GroupDims",
    "GroupElement",
    "HeisentraceError",
    "InputError",
    "ParseError",
    "PrincipalSymbol",
    "QuadratureSpec",
    "SingularityError",
    "SymbolEvaluator",
    "TailDescriptor",
    "TraceConstants",
    "TraceReport",
    "UnboundVariableError",
    "UnknownIdentifierError",
    "ValidationError",
    "check_I_l_vanishing",
    "check_I_n_pv",
    "check_main_theorem",
    "check_proposition",
    "commutator_integral",
    "dilate",
    "eval_w",
    "extrapolate_limit",
    "gaussian_sharp_oracle",
    "group_multiply",
    "integrate_plane",
    "integrate_sphere",
    "inverse",
    "pv_integral_real_line",
    "r_function",
    "regularized_center_ft",
    "res",
    "sharp",
    "symplectic_form",
    "tail_consistency_check",
    "tau",
    "tau_z",
    "tilde_sigma",
]
