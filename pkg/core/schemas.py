"""
Pydantic models for the JSON documents exchanged with models and files.
"""
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .exceptions import ScheduleError
from .schedule import ActivitySegment, ActivityType, DaySchedule, parse_time


class SegmentDocument(BaseModel):
    model_config = ConfigDict(extra='ignore')

    activity: str
    start_time: str
    end_time: str

    @field_validator('activity')
    @classmethod
    def known_activity(cls, value: str) -> str:
        return ActivityType.parse(value).value

    def to_segment(self) -> ActivitySegment:
        return ActivitySegment(ActivityType.parse(self.activity), parse_time(self.start_time), parse_time(self.end_time))


def to_schedule(segments: List[SegmentDocument]) -> DaySchedule:
    return DaySchedule(tuple(segment.to_segment() for segment in segments))


class IntentionDocument(BaseModel):
    """Intention agent reply: {"reasoning": ..., "schedule": [...]}."""

    model_config = ConfigDict(extra='ignore')

    reasoning: str = ''
    schedule: List[SegmentDocument] = Field(min_length=1)


class PopulationEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')

    user_id: Union[str, int]
    schedule: List[SegmentDocument]


class RolloutLine(BaseModel):
    """One roll-out to score: input side of the reward wire format."""

    model_config = ConfigDict(extra='ignore')

    prompt_id: Union[str, int]
    rollout_text: Optional[str] = ''
    ground_truth_schedule: List[SegmentDocument] = Field(min_length=1)


def validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = '.'.join(str(part) for part in first.get('loc', ()))
    return f'{location}: {first.get("msg")}' if location else str(first.get('msg'))


def parse_segments(items) -> DaySchedule:
    """Validate a schedule document (array of segments) into a DaySchedule."""
    if not isinstance(items, list):
        raise ScheduleError('Schedule document must be an array of segments')
    try:
        return to_schedule([SegmentDocument.model_validate(item) for item in items])
    except ValidationError as e:
        raise ScheduleError(validation_message(e)) from None
