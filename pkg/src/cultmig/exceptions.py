"""Exception hierarchy.

Every error raised on purpose by the package derives from ``CultmigError``
so that the command line can map it to an exit status.
"""


class CultmigError(Exception):
    """Base class for package errors."""


class ValidationError(CultmigError, ValueError):
    """Input data violate a documented invariant."""


class InputError(ValidationError):
    """A single value passed to a computation is malformed (NaN, out of range)."""


class ConfigurationError(CultmigError, ValueError):
    """Run configuration or overrides are inconsistent."""


class UnknownCountryError(CultmigError, KeyError):
    """A country code is absent from the registry or corpus."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown country"


class DegenerateSampleError(CultmigError, ValueError):
    """A statistical test received a sample it cannot rank."""


class FetchError(CultmigError, OSError):
    """Remote data could not be retrieved and no cached copy exists."""


class ParseError(CultmigError, ValueError):
    """A remote payload or data file has an unexpected layout."""
