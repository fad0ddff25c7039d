"""Exception types shared across the toolkit.

Exit-code mapping for the CLI lives in :mod:`loewner.cli`; library code only
raises these.
"""


class LoewnerError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LoewnerError):
    """Point lies outside the domain of the requested map (on a slit, below R,
    or at a slit base without a side tag)."""


class BranchError(LoewnerError):
    """A square-root/power branch selection produced a point below R."""


class StepError(LoewnerError):
    """Trace refinement diverged, or a discretized step is degenerate."""


class CollisionError(LoewnerError):
    """Two singularity images came within the separation floor."""


class GeometryError(LoewnerError):
    """Peeled image left the upper half-plane (non-simple or tangent input)."""


class ResolutionError(LoewnerError):
    """Peeling resolution request is incompatible with the input slit."""


class DisjointnessError(LoewnerError):
    """Slit closures intersect or come closer than the disjointness margin."""


class ExhaustedError(LoewnerError):
    """A growth schedule demands more capacity than a slit possesses."""


class ConvergenceError(LoewnerError):
    """An iterative solve stalled above its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PairingError(LoewnerError):
    """Hitting-time monotonicity failed while pairing welded prime ends."""


class InsufficientData(LoewnerError):
    """Not enough samples to run the requested estimate."""
