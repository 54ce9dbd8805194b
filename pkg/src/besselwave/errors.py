"""Exception hierarchy shared by the whole package."""


class BesselWaveError(Exception):
    """Base class for all package errors."""


class DomainError(BesselWaveError, ValueError):
    """A parameter is outside the mathematical domain of the operation."""


class AccuracyError(BesselWaveError):
    """The requested accuracy could not be reached (series or quadrature)."""


class CapabilityError(BesselWaveError):
    """The object cannot provide what was asked (e.g. a Laplacian order
    beyond what the field family supports analytically)."""


class ContractError(BesselWaveError):
    """A caller violated an interface contract (mismatched rule, bad step)."""


class ConfigError(BesselWaveError, ValueError):
    """Invalid run configuration."""
