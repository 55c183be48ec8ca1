"""Exception types shared across the package."""


class ProbeError(Exception):
    """Base class for all afmprobe domain errors."""


class InstabilityError(ProbeError):
    """Magnon spectrum unstable (spin-flop regime): a mode frequency is
    driven nonpositive or the pair coupling reaches |Gamma| >= 1."""


class ResonanceError(ProbeError):
    """A Schrieffer-Wolff denominator vanishes (mode resonant with the
    cavity); the dispersive reduction is undefined."""


class TruncationError(ProbeError):
    """A truncated expansion (Fock space or Schmidt series) cannot reach
    the requested tolerance within the allowed size."""


class NormalizationError(ProbeError):
    """A state or Schmidt spectrum is too far from unit norm for the
    requested operation."""


class BranchError(ProbeError):
    """Measured EPR value lies on the wrong side of 1 for the declared
    squeezing-phase branch."""


class ConfigError(ProbeError):
    """Invalid or inconsistent run configuration."""
