class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidSpecError(ValueError):
    """The characteristics do not define a valid nested coalescent."""


class SpecFormatError(ValueError):
    """A JSON spec or run configuration could not be parsed."""
