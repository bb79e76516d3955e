"""Error hierarchy for the engine.

Every check raises before any state is touched, so a caught error never
leaves a half-updated network or world behind.
"""


class LsmError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(LsmError, ValueError):
    """Inputs do not fit together: shapes, action ids, symbols, rule names."""


class ParameterError(LsmError, ValueError):
    """A parameter is outside its valid range."""


class EmptyWindowError(LsmError, ValueError):
    """A simulation window of zero ticks was requested."""


class EmptyPopulationError(LsmError, ValueError):
    """A population metric was asked for with no individuals."""


class ChromosomeFormatError(LsmError, ValueError):
    """A matrix text file does not follow the `rows cols` + rows layout."""
