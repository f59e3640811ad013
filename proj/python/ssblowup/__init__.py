"""Self-similar blow-up profiles of the slightly mass-supercritical NLS."""

from ._core import (
    GroundState,
    NumericalError,
    airy,
    b_sigma,
    closed_form_soliton_1d,
    coupled_exponent,
    ground_state,
    solve,
    sweep,
    turning_point_phase,
    verify,
)

__all__ = [
    "GroundState",
    "NumericalError",
    "airy",
    "b_sigma",
    "closed_form_soliton_1d",
    "coupled_exponent",
    "ground_state",
    "solve",
    "sweep",
    "turning_point_phase",
    "verify",
]
