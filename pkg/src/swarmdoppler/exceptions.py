"""Exception hierarchy used across the package."""


class SwarmModelError(Exception):
    """Base class for every error raised by swarmdoppler."""


class ValidationError(SwarmModelError):
    """A parameter value violates its constraints; the message names the field."""


class ConfigError(ValidationError):
    """A configuration document failed to parse or does not match the schema."""


class DomainError(SwarmModelError):
    """An operation was invoked outside its supported domain."""


class NumericsError(SwarmModelError):
    """A numerical routine could not reach its accuracy target."""


class FormatError(SwarmModelError):
    """A binary container is corrupt or has an unsupported version."""
