# Service layer exports
from stochreach.services.display_service import DisplayService as DisplayService
from stochreach.services.mdp_service import GlobalMdp as GlobalMdp
from stochreach.services.mdp_service import LocalMdp as LocalMdp
from stochreach.services.mdp_service import RewardedMdp as RewardedMdp
from stochreach.services.report_service import ReportService as ReportService
from stochreach.services.rl_service import EpisodeSampler as EpisodeSampler

__all__ = [
    "DisplayService",
    "EpisodeSampler",
    "GlobalMdp",
    "LocalMdp",
    "ReportService",
    "RewardedMdp",
]
