"""Fidelity of communicating a spatial direction with N spin-1/2 particles."""
from .encoding import (
    EffectiveState,
    StrategyTag,
    general_encoding_dim,
    minimal_m,
    optimal_state,
    parallel_state,
    product_state,
)
from .fidelity import (
    FidelityKernel,
    StrategyReport,
    asymptote,
    average_fidelity,
    build_kernel,
    closed_form,
    f_antiparallel,
    f_antiparallel_even,
    f_dim,
    f_general,
    f_optimal,
    f_parallel,
)
from .simulate import McReport, estimate_fidelity
from .specfun import HalfInteger

__version__ = "0.1.0"
