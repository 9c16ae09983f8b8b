"""Exact simulation and closed-form analytics for echo-squeezing spin sensors."""

from .dicke import (
    DickeState,
    HusimiGrid,
    SpinMagnitude,
    apply_oats,
    apply_rotation,
    expectation,
    husimi_grid,
    make_css,
    variance,
)
from .protocols import (
    Form,
    Kind,
    ProtocolSpec,
    build_protocol,
    cat_orientation,
    numeric_sensitivity,
    run,
    verify_reduction,
)
from .analytics import (
    CoefficientSet,
    coefficient_set,
    cesp_sensitivity,
    gesp_sensitivity,
    plateau,
    pmf_naf,
    qcr_bound,
)
from .decoherence import (
    CollisionScenario,
    DecoherenceParams,
    collision_oracle,
    collision_signal,
    max_tolerable_collisions,
)

__all__ = [
    "DickeState", "HusimiGrid", "SpinMagnitude", "apply_oats", "apply_rotation",
    "expectation", "husimi_grid", "make_css", "variance",
    "Form", "Kind", "ProtocolSpec", "build_protocol", "cat_orientation",
    "numeric_sensitivity", "run", "verify_reduction",
    "CoefficientSet", "coefficient_set", "cesp_sensitivity", "gesp_sensitivity",
    "plateau", "pmf_naf", "qcr_bound",
    "CollisionScenario", "DecoherenceParams", "collision_oracle", "collision_signal",
    "max_tolerable_collisions",
]
