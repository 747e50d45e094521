"""
Exception hierarchy for the activity editor pipeline.
"""


class ActivityEditorError(Exception):
    """Base class for every error raised by the pipeline."""


class ScheduleError(ActivityEditorError, ValueError):
    """Malformed times, empty schedules, or schedules that cannot be discretized."""


class ProfileError(ActivityEditorError, ValueError):
    """A profile document that cannot be turned into a UserProfile."""


class EditError(ScheduleError):
    """An edit operation whose preconditions do not hold.

    `position` is the op's index inside an EditScript when raised by apply_script.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f'op {position}: {message}'
        super().__init__(message)


class MetricError(ActivityEditorError, ValueError):
    """Mismatched populations or empty histograms."""


class PopulationError(ActivityEditorError, ValueError):
    """A population document that failed validation, naming the offending user."""

    def __init__(self, message, user_id=None):
        self.user_id = user_id
        if user_id is not None:
            message = f'user {user_id}: {message}'
        super().__init__(message)


class EndpointError(ActivityEditorError):
    """Chat endpoint failure after the retry budget is spent."""

    def __init__(self, message, endpoint=None, attempts=0):
        self.endpoint = endpoint
        self.attempts = attempts
        super().__init__(f'{message} (endpoint={endpoint}, attempts={attempts})')


class ConfigError(ActivityEditorError, ValueError):
    """Unresolvable or unknown configuration."""


class DocumentError(ActivityEditorError, ValueError):
    """An input file that cannot be parsed as the expected document."""
