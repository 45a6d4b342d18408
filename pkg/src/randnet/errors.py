"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid model, kernel or file configuration."""


class SimulationDiverged(RuntimeError):
    """A state became non-finite during time stepping."""

    def __init__(self, particle, step):
        super().__init__(f"non-finite state for particle {particle} at step {step}")
        self.particle = particle
        self.step = step


class NumericalDegeneracy(ArithmeticError):
    """Factorization breakdown in the Gaussian tilting engine."""


class InadmissibleHorizon(ValueError):
    """Time horizon violates 2 sigma^2 |b|^2 T / lambda^2 < 1."""


class DivergentMoment(ValueError):
    """Requested Gaussian exponential moment is infinite."""
