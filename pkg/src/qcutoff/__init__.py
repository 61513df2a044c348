"""Cut-off profiles of central random walks on free quantum groups."""
from .kernel import (
    GroupFamily,
    NumericContext,
    cap_C,
    cheb_u,
    cheb_v,
    dim,
    encadrement_bounds,
    log_cheb_u,
    q_param,
    threshold_k0,
    threshold_k1,
)

__version__ = "0.1.0"
