"""Exception types shared across the package."""


class CapWhithamError(Exception):
    """Base class for all package-specific failures."""


class NonPositiveInputError(CapWhithamError):
    """A physical input that must be strictly positive was not."""


class WrongRegimeError(CapWhithamError):
    """Operation invoked with a Bond number outside its surface-tension regime."""


class NoRootError(CapWhithamError):
    """No wavenumber solves the phase-speed equation at the requested speed."""


class SizeMismatchError(CapWhithamError):
    """Array length does not match the grid it is paired with."""


class NonFiniteSymbolError(CapWhithamError):
    """A Fourier multiplier returned NaN or infinity at a grid frequency."""


class BoundaryNotDecayedError(CapWhithamError):
    """A profile that must vanish at the domain ends does not."""


class OverflowGuardError(CapWhithamError):
    """Requested exponential weight would overflow on this domain."""


class SolverDivergenceError(CapWhithamError):
    """An iterative linear solve failed to reach its tolerance."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NewtonDivergenceError(CapWhithamError):
    """A Newton iteration exhausted its damping/iteration budget."""


class AliasingTailError(CapWhithamError):
    """The last retained harmonic is not negligible; increase the truncation."""


class OffGridFrequencyError(CapWhithamError):
    """Exact on-grid sampling was requested for an off-grid frequency."""


class GridTooCoarseError(CapWhithamError):
    """The grid cannot resolve the requested ripple wavelength."""


class KernelResidueError(CapWhithamError):
    """Input to the kernel-aware inverse still carries the resonant mode."""


class NoContractionError(CapWhithamError):
    """Fixed-point steps stopped decreasing; the iteration is not contracting."""


class MaxIterationsError(CapWhithamError):
    """Fixed-point iteration hit its iteration cap before converging."""


class ResonantDenominatorError(CapWhithamError):
    """The fundamental and second harmonic phase speeds coincide."""


class SymbolNotCoerciveError(CapWhithamError):
    """The shifted symbol is not bounded away from zero on the grid."""
