# Core module exports
from stochreach.core.config import Settings as Settings
from stochreach.core.config import load_settings as load_settings
from stochreach.core.models import (
    BoundMatrices as BoundMatrices,
)
from stochreach.core.models import (
    Digraph as Digraph,
)
from stochreach.core.models import (
    SirConfig as SirConfig,
)
from stochreach.core.models import (
    SirState as SirState,
)
from stochreach.core.models import (
    StochasticDigraph as StochasticDigraph,
)
from stochreach.core.models import (
    TransitionDistribution as TransitionDistribution,
)
from stochreach.core.models import (
    ValueTable as ValueTable,
)
from stochreach.core.utils import (
    format_probability as format_probability,
)
from stochreach.core.utils import (
    parse_probability as parse_probability,
)
from stochreach.core.validation import (
    CapacityError as CapacityError,
)
from stochreach.core.validation import (
    ConvergenceError as ConvergenceError,
)
from stochreach.core.validation import (
    InputFormatError as InputFormatError,
)
from stochreach.core.validation import (
    PreconditionError as PreconditionError,
)
from stochreach.core.validation import (
    ValidationError as ValidationError,
)

__all__ = [
    "BoundMatrices",
    "CapacityError",
    "ConvergenceError",
    "Digraph",
    "InputFormatError",
    "PreconditionError",
    "Settings",
    "SirConfig",
    "SirState",
    "StochasticDigraph",
    "TransitionDistribution",
    "ValidationError",
    "ValueTable",
    "format_probability",
    "load_settings",
    "parse_probability",
]
