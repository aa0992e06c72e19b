"""Exception types shared across the package."""


class SmokehouseError(Exception):
    """Base class for all package errors."""


class ConfigError(SmokehouseError):
    """A configuration value violates an invariant.

    Carries an optional dotted path naming the offending field so CLI
    validation can point at the exact location in the config file.
    """

    def __init__(self, message, path=None):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class ControllerFault(SmokehouseError):
    """The controller was fed an unusable measurement (NaN/inf)."""


class PlantDiverged(SmokehouseError):
    """Integration produced a non-finite or out-of-guard-band temperature."""


class NoEquilibrium(SmokehouseError):
    """The steady-state system is singular (no path to ambient for injected heat)."""
