"""Exception hierarchy. CLI exit codes are attached to the top-level classes."""


class QemsimError(Exception):
    exit_code = 1


class ConfigError(QemsimError, ValueError):
    exit_code = 2


class NumericalError(QemsimError, ArithmeticError):
    exit_code = 3


class EigensolverError(NumericalError):
    pass


class DimensionCapError(NumericalError):
    pass


class NoCrossingError(NumericalError):
    pass


class ResonanceDivergenceError(NumericalError):
    pass


class LabelingError(NumericalError):
    pass


class PopulationError(NumericalError):
    """Requested photon number cannot be reached inside the truncated space."""


class FitError(NumericalError):
    pass


class ExportError(QemsimError):
    exit_code = 4


class InputError(QemsimError):
    exit_code = 4
