"""Exception types raised by the solvers and the CLI."""


class OverdetError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OverdetError, ValueError):
    pass


class GeometryError(OverdetError):
    """Curves intersect, leave the admissible region, or degenerate."""


class IllConditionedError(OverdetError):
    pass


class DegenerateDenominatorError(OverdetError, ZeroDivisionError):
    pass


class ResonanceError(OverdetError):
    """Conductivity sits on (or too close to) a resonance s(k)."""

    def __init__(self, k, sigma_c, s_k, distance):
        self.k = k
        self.sigma_c = sigma_c
        self.s_k = s_k
        self.distance = distance
        super().__init__(
            f"sigma_c={sigma_c!r} is within {distance:.3g} of s({k})={s_k!r}; "
            f"the linearized outer operator degenerates at mode k={k}"
        )


class ConvergenceError(OverdetError):
    pass


class ConfigError(OverdetError):
    pass
