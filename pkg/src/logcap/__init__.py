"""Numerical logarithmic potential theory for compact plane sets."""
from .sets import (
    ArcFamily,
    CantorStage,
    CircularArc,
    DiscreteSet,
    FullCircle,
    MaterializeError,
    PointCloud,
    Segment,
    SpecError,
    UPEstimate,
    arc_alpha_lower,
    cantor_alpha,
    cantor_hausdorff_bound,
    diameter,
    estimate_alpha,
    hausdorff_distance,
    materialize,
    resolution_for,
)
from .potential import (
    CapacityResult,
    Measure,
    NumericalError,
    capacity_leja,
    closed_form_capacity,
    energy_matrix,
    equilibrium_measure,
    potential_eval,
)

__version__ = "0.1.0"
