"""Random walks in random scenery: record measures, scenery reconstruction
and distinguishing periodic sceneries."""

from .distinguish import PeriodicScenery, Verdict, distinguish, is_equivalent, is_translate, orbit_measure
from .estimators import CylinderEstimator, SceneryReconstructor
from .exceptions import (
    ContractError,
    DepthExceededError,
    InconclusiveDepthError,
    InsufficientDataError,
    InvalidDepthError,
    NotSampleableError,
    SceneryError,
    SingularSystemError,
    UnsupportedRegimeError,
)
from .measures import (
    IIDScenery,
    IIDSteps,
    MarkovSteps,
    PeriodicOrbitMeasure,
    TableScenery,
    TableSteps,
    is_straightforward,
    is_strongly_asymmetric,
    is_symmetric,
    scenery_prob,
    step_prob,
    validate,
)
from .reconstruct import (
    ReconMatrix,
    SymmetrizedVector,
    build_matrix,
    solve_asymmetric,
    solve_symmetric,
    symmetrize,
    verify_structure,
)
from .record import (
    CylinderVector,
    PathPattern,
    RecordSequence,
    check_equivariance,
    cylinder_vector,
    empirical_cylinders,
    exact_record_vector,
    record_vector_for_scenery,
    simulate_record,
    walk_pattern,
)
from .words import BINARY, ColourAlphabet, WordOrder, canonical_order, is_palindrome, mirror, reverse

__version__ = "0.1.0"
