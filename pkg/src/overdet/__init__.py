"""Numerical laboratory for overdetermined free-boundary problems on perturbed annuli."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DegenerateDenominatorError,
    GeometryError,
    IllConditionedError,
    InvalidInputError,
    ResonanceError,
)
from .formulas import MultiplierTable, ProblemKind, ProblemSpec, first_order_g  # noqa: E402
from .geometry import TentNotch  # noqa: E402
from .newton import SolveParams, SolveReport, solve_free_boundary  # noqa: E402
from .pde import BoundaryField, DomainPair, solve_bernoulli_state, solve_two_phase_state  # noqa: E402
from .spectral import BoundaryFunction, Discretization, analyze, project_zero_mean  # noqa: E402
