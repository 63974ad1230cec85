"""
Error Types for the Talking Head Pipeline
Every error carries the exit code the CLI returns when it escapes a command
"""


class TalkingHeadError(Exception):
    """Base class for all pipeline errors"""

    exit_code = 1
    label = 'Internal error'


class ConfigError(TalkingHeadError):
    """Invalid or inconsistent configuration"""

    exit_code = 2
    label = 'Configuration error'


class DependencyError(TalkingHeadError):
    """A prerequisite artifact (checkpoint, dataset) is missing"""

    exit_code = 3
    label = 'Missing dependency'

    def __init__(self, message: str, missing: list[str] | None = None):
        super().__init__(message)
        self.missing = list(missing or [])


class DataError(TalkingHeadError):
    """Input data is unusable (empty, too short, corrupt)"""

    exit_code = 4
    label = 'Data error'


class EmptyInputError(DataError):
    """An input clip or dataset contains nothing to process"""


class InsufficientFramesError(DataError):
    """A temporal metric needs more frames than were supplied"""


class ContractViolation(TalkingHeadError, ValueError):
    """Arguments break an operation's documented preconditions"""

    label = 'Contract violation'


class RangeError(TalkingHeadError, IndexError):
    """An index or timestep falls outside its valid range"""

    label = 'Range error'


class DegenerateGeometryError(TalkingHeadError, ValueError):
    """Landmark anchors collapse to a point, no transform is defined"""

    label = 'Degenerate geometry'


class ModelDivergenceError(TalkingHeadError):
    """A trained model produced non-finite or out-of-range predictions"""

    label = 'Model divergence'
