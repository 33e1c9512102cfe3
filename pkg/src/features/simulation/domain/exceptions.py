"""
Exceptions specific to the simulation feature.
"""

from src.shared.exceptions import AppError


class SimulationError(AppError):
    """Base exception for engine errors."""

    def __init__(self, message: str, code: str = "SIMULATION_ERROR"):
        super().__init__(message, code=code)


class ConfigError(SimulationError):
    """Raised when a scenario or run configuration is invalid."""

    def __init__(self, message: str):
        super().__init__(message, code="CONFIG_ERROR")


class AdversaryAccessDenied(SimulationError):
    """Raised when adversary code asks for a handle of an honest node."""

    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__(f"Node {node_id} is not corrupt.", code="ADVERSARY_ACCESS_DENIED")
