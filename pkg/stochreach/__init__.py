# Public API exports
from stochreach.core.config import VERSION
from stochreach.core.models import SirConfig as SirConfig
from stochreach.core.models import SirState as SirState
from stochreach.core.models import StochasticDigraph as StochasticDigraph
from stochreach.managers import ReachabilityManager as ReachabilityManager

__version__ = VERSION

__all__ = [
    "ReachabilityManager",
    "SirConfig",
    "SirState",
    "StochasticDigraph",
    "__version__",
]
