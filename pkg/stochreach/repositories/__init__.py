# Local imports
from stochreach.repositories.graph_repository import GraphRepository
from stochreach.repositories.output_repository import OutputRepository

__all__ = ["GraphRepository", "OutputRepository"]
