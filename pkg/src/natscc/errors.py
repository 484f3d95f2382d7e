"""Exception hierarchy. The CLI maps each family onto an exit status."""


class NatSccError(Exception):
    exit_code = 1
    category = "error"


class ConfigError(NatSccError, ValueError):
    exit_code = 2
    category = "config"


class DataError(NatSccError, ValueError):
    exit_code = 3
    category = "data"


class NumericalAbort(NatSccError, ArithmeticError):
    """A run left the domain where the model is defined (e.g. impacts of -100% GDP)."""

    exit_code = 4
    category = "numerical"


class FitError(NatSccError, ValueError):
    exit_code = 3
    category = "data"
