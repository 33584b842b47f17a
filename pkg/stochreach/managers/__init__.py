# Manager implementation
from stochreach.managers.manager import ReachabilityManager as ReachabilityManager

__all__ = [
    "ReachabilityManager",
]
