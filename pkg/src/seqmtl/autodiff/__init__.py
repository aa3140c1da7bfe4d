"""Define-by-run tensors with reverse-mode differentiation."""

from . import ops
from .gradcheck import GradCheckReport, gradient_check
from .graph import (Node, backward, check_numerics, check_numerics_enabled,
                    constant, set_check_numerics)
from .ops import OP_KINDS, forward_op
from .params import ParameterStore, glorot_uniform
from .scope import Scope

__all__ = [
    "GradCheckReport",
    "Node",
    "OP_KINDS",
    "ParameterStore",
    "Scope",
    "backward",
    "check_numerics",
    "check_numerics_enabled",
    "constant",
    "forward_op",
    "glorot_uniform",
    "gradient_check",
    "ops",
    "set_check_numerics",
]
