from types import SimpleNamespace
from unittest.mock import MagicMock

from core.schedule import ActivitySegment, ActivityType, DaySchedule


def reply(content):
    """An SDK-shaped chat completion response."""
    return SimpleNamespace(choices=[SimpleNamespace(message=SimpleNamespace(content=content))])


def scripted_client(*contents):
    """A client whose successive completions return `contents`; exceptions are raised instead."""
    client = MagicMock()
    client.chat.completions.create.side_effect = [
        item if isinstance(item, BaseException) else reply(item) for item in contents
    ]
    return client


def day(*rows):
    """DaySchedule from (activity, start_minute, end_minute) rows."""
    return DaySchedule(tuple(ActivitySegment(ActivityType.parse(a), s, e) for a, s, e in rows))
