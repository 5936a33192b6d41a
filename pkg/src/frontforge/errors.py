"""Exception hierarchy shared by all frontforge modules."""


class FrontForgeError(Exception):
    """Base class for every error raised by frontforge."""


class BadParams(FrontForgeError, ValueError):
    pass


class NonHyperbolic(FrontForgeError, ValueError):
    """Jump data with [[Phi']] * [[r]] <= 0 (no real wave speed)."""


class DegenerateJump(FrontForgeError, ValueError):
    pass


class OutOfDomain(FrontForgeError, ValueError):
    pass


class ComplexSoundSpeed(FrontForgeError, ValueError):
    pass


class CorrectorDiverged(FrontForgeError, RuntimeError):
    pass


class NoCrossing(FrontForgeError, ValueError):
    pass


class PotentialDomain(FrontForgeError, ValueError):
    """Profile values left the band on which the normalized potential is used."""


class Indeterminate(FrontForgeError, RuntimeError):
    pass


class InsufficientPoints(FrontForgeError, ValueError):
    pass


class Sonic(FrontForgeError, ValueError):
    """Decay rate requested at (or beyond) the sonic limit lambda -> 1."""


class NonPositive(FrontForgeError, ValueError):
    pass


class MismatchedShock(FrontForgeError, ValueError):
    pass


class Instability(FrontForgeError, RuntimeError):
    pass


class MissingArtifact(FrontForgeError, FileNotFoundError):
    pass


class ConfigError(FrontForgeError, ValueError):
    pass
