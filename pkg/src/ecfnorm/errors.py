"""Exception hierarchy shared by the library and the command line front end."""


class EcfError(Exception):
    """Base class for every error raised by ecfnorm."""

    exit_code = 1


class DomainError(EcfError, ValueError):
    """An argument lies outside the domain of a function or distribution."""

    exit_code = 2


class ConfigError(EcfError, ValueError):
    """An invalid or inconsistent configuration."""

    exit_code = 2


class ParseError(EcfError, ValueError):
    """A textual specification (alternative string, option value) is malformed."""

    exit_code = 2


class DataError(EcfError, ValueError):
    """Input data is unusable: non-finite entries, unparseable cells, etc."""

    exit_code = 3


class DegenerateDataError(DataError):
    """A column has zero variance and cannot be standardized."""


class InsufficientDataError(DataError):
    """Fewer rows than the computation needs."""


class ShapeError(EcfError, ValueError):
    """Array dimensions do not match what the operation expects."""

    exit_code = 3


class CostGuardError(EcfError, ValueError):
    """The requested computation exceeds a configured size limit."""

    exit_code = 2


class TableLookupError(EcfError, KeyError):
    """A critical value table has no entry for the requested (m, n, alpha)."""

    exit_code = 4

    def __str__(self):
        # KeyError quotes its argument; keep messages readable
        return str(self.args[0]) if self.args else ""


class ProvenanceError(EcfError):
    """Calibration and evaluation were configured differently."""

    exit_code = 4
