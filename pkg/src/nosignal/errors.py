"""Exception hierarchy shared across the package."""


class SimulationError(Exception):
    """Base class for every error this package raises on bad input."""


class UnknownLocation(SimulationError):
    """A location id is not part of the spacetime configuration."""


class SameLocation(SimulationError):
    """A signal endpoint pair collapsed to a single location."""


class InvalidScenario(SimulationError):
    """A request set violates the scenario invariants for this configuration."""


class UnachievableTask(SimulationError):
    """A task's delivery cannot be scheduled inside the horizon."""


class DuplicateTask(SimulationError):
    """Two task arguments that must be distinct share an id."""


class SpaceTooLarge(SimulationError):
    """A brute-force enumeration would exceed its configured budget."""


class ParseError(SimulationError):
    """A document is not well-formed JSON."""


class ValidationError(SimulationError):
    """A parsed document or value violates a structural invariant."""
