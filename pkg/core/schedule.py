"""
Schedule domain types, time arithmetic, normalization and the 96-slot
discretization consumed by the constraint, reward and metric services.

Times are integer minutes since midnight; 1440 encodes "24:00".
"""
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from itertools import groupby
from typing import Iterable, Mapping, Optional

import numpy as np

from .exceptions import ProfileError, ScheduleError


DAY_MINUTES = 24 * 60
SLOT_MINUTES = 15
SLOTS_PER_DAY = DAY_MINUTES // SLOT_MINUTES  # 96

UNKNOWN = 'unknown'

_TIME_PATTERN = re.compile(r'^\s*(\d{1,2}):(\d{2})\s*$')

# Minutes since midnight, 0..1440
TimeOfDay = int


class ActivityType(str, Enum):
    """The ten activity categories a schedule may use."""

    HOME = 'home'
    WORK = 'work'
    EDUCATION = 'education'
    SHOPPING = 'shopping'
    SERVICE = 'service'
    MEDICAL = 'medical'
    DINE_OUT = 'dine_out'
    SOCIALIZE = 'socialize'
    EXERCISE = 'exercise'
    DROPOFF_PICKUP = 'dropoff_pickup'

    @classmethod
    def parse(cls, label) -> 'ActivityType':
        if isinstance(label, cls):
            return label
        try:
            return cls(str(label).strip().lower())
        except ValueError:
            raise ScheduleError(f'Unknown activity type: {label!r}') from None

    @property
    def code(self) -> int:
        """Stable integer code (position in ACTIVITY_TYPES)."""
        return ACTIVITY_INDEX[self]

    def __str__(self):
        return self.value


ACTIVITY_TYPES = tuple(ActivityType)
ACTIVITY_INDEX = {activity: index for index, activity in enumerate(ACTIVITY_TYPES)}


def parse_time(text: str) -> TimeOfDay:
    """Parse "H:MM" / "HH:MM" into minutes since midnight ("24:00" -> 1440)."""
    match = _TIME_PATTERN.match(str(text))
    if not match:
        raise ScheduleError(f'Malformed time: {text!r}')
    hours, minutes = int(match.group(1)), int(match.group(2))
    if minutes >= 60:
        raise ScheduleError(f'Minutes out of range in {text!r}')
    if hours > 24 or (hours == 24 and minutes > 0):
        raise ScheduleError(f'Time beyond 24:00: {text!r}')
    return hours * 60 + minutes


def format_time(minutes: TimeOfDay) -> str:
    if not 0 <= minutes <= DAY_MINUTES:
        raise ScheduleError(f'Minutes out of range: {minutes}')
    return f'{minutes // 60:02d}:{minutes % 60:02d}'


@dataclass(frozen=True)
class ActivitySegment:
    activity: ActivityType
    start: TimeOfDay
    end: TimeOfDay

    def __post_init__(self):
        object.__setattr__(self, 'activity', ActivityType.parse(self.activity))
        if not (0 <= self.start < self.end <= DAY_MINUTES):
            raise ScheduleError(
                f'Invalid segment {self.activity.value} {self.start}-{self.end}: '
                'start must precede end within the day'
            )

    @property
    def duration(self) -> int:
        return self.end - self.start

    @classmethod
    def from_document(cls, item: Mapping) -> 'ActivitySegment':
        if not isinstance(item, Mapping):
            raise ScheduleError(f'Segment must be an object, got {type(item).__name__}')
        try:
            return cls(
                activity=ActivityType.parse(item['activity']),
                start=parse_time(item['start_time']),
                end=parse_time(item['end_time']),
            )
        except KeyError as e:
            raise ScheduleError(f'Segment missing key {e.args[0]!r}') from None

    def to_document(self) -> dict:
        return {
            'activity': self.activity.value,
            'start_time': format_time(self.start),
            'end_time': format_time(self.end),
        }

    def __str__(self):
        return f'[{format_time(self.start)}--{format_time(self.end)}] {self.activity.value}'


@dataclass(frozen=True)
class DaySchedule:
    """Ordered activity chain for one person-day."""

    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'segments', tuple(self.segments))

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, index):
        return self.segments[index]

    @property
    def activities(self) -> set:
        return {segment.activity for segment in self.segments}

    @classmethod
    def from_document(cls, items: Iterable) -> 'DaySchedule':
        if isinstance(items, (str, bytes)) or not isinstance(items, Iterable):
            raise ScheduleError('Schedule document must be an array of segments')
        return cls(tuple(ActivitySegment.from_document(item) for item in items))

    def to_document(self) -> list:
        return [segment.to_document() for segment in self.segments]

    def __str__(self):
        return '\n'.join(str(segment) for segment in self.segments)


@dataclass(frozen=True)
class Episode:
    activity: ActivityType
    start_slot: int
    length_slots: int

    @property
    def end_slot(self) -> int:
        return self.start_slot + self.length_slots


@dataclass(frozen=True)
class SlotSequence:
    """A day as 96 fifteen-minute slots; slot t covers minutes [15t, 15t+15)."""

    slots: tuple

    def __post_init__(self):
        slots = tuple(ActivityType.parse(slot) for slot in self.slots)
        if len(slots) != SLOTS_PER_DAY:
            raise ScheduleError(f'Slot sequence must have {SLOTS_PER_DAY} slots, got {len(slots)}')
        object.__setattr__(self, 'slots', slots)

    def __len__(self):
        return SLOTS_PER_DAY

    def __iter__(self):
        return iter(self.slots)

    def __getitem__(self, index):
        return self.slots[index]

    def codes(self) -> np.ndarray:
        return np.fromiter((slot.code for slot in self.slots), dtype=np.int64, count=SLOTS_PER_DAY)

    @classmethod
    def from_codes(cls, codes) -> 'SlotSequence':
        return cls(tuple(ACTIVITY_TYPES[int(code)] for code in codes))


# ============================================================================
# PROFILES
# ============================================================================

PROFILE_FIELDS = (
    'age_range',
    'gender',
    'race',
    'education',
    'employment_status',
    'work_schedule',
    'occupation',
    'primary_activity',
    'work_from_home',
    'driver_on_travel_day',
    'distance_to_work_miles',
    'work_state',
)


def _is_missing(value) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    return isinstance(value, str) and value.strip() in ('', UNKNOWN)


@dataclass(frozen=True)
class UserProfile:
    """The twelve socio-demographic attributes seeding generation.

    Text fields hold "unknown" when the survey value is absent; a missing
    commute distance is None and renders as "unknown".
    """

    age_range: str = UNKNOWN
    gender: str = UNKNOWN
    race: str = UNKNOWN
    education: str = UNKNOWN
    employment_status: str = UNKNOWN
    work_schedule: str = UNKNOWN
    occupation: str = UNKNOWN
    primary_activity: str = UNKNOWN
    work_from_home: str = UNKNOWN
    driver_on_travel_day: str = UNKNOWN
    distance_to_work_miles: Optional[float] = None
    work_state: str = UNKNOWN

    @classmethod
    def from_mapping(cls, mapping: Mapping, aliases: Optional[Mapping] = None) -> 'UserProfile':
        """Build a profile from a flat mapping, resolving column aliases first."""
        aliases = aliases or {}
        resolved = {}
        for key, value in mapping.items():
            name = aliases.get(key, key)
            if name in PROFILE_FIELDS and not _is_missing(value):
                resolved[name] = value

        values = {}
        for name in PROFILE_FIELDS:
            if name not in resolved:
                continue
            if name == 'distance_to_work_miles':
                try:
                    distance = float(resolved[name])
                except (TypeError, ValueError):
                    raise ProfileError(f'distance_to_work_miles is not a number: {resolved[name]!r}') from None
                if distance < 0 or math.isnan(distance):
                    raise ProfileError(f'distance_to_work_miles must be non-negative: {distance}')
                values[name] = distance
            else:
                values[name] = str(resolved[name]).strip()
        return cls(**values)

    def to_document(self) -> dict:
        document = {}
        for name in PROFILE_FIELDS:
            value = getattr(self, name)
            document[name] = UNKNOWN if value is None else value
        return document

    def display_value(self, name: str) -> str:
        value = getattr(self, name)
        if value is None:
            return UNKNOWN
        if isinstance(value, float):
            return f'{value:g}'
        return str(value)

    def mentions(self, fields: Iterable, keywords: Iterable) -> bool:
        """True if any keyword occurs (case-insensitively) in any of the fields."""
        keywords = [keyword.lower() for keyword in keywords]
        for name in fields:
            text = self.display_value(name).lower()
            if any(keyword in text for keyword in keywords):
                return True
        return False


# ============================================================================
# OPERATIONS
# ============================================================================

def _sorted_segments(schedule: DaySchedule) -> list:
    return sorted(schedule.segments, key=lambda segment: (segment.start, segment.end))


def normalize(schedule: DaySchedule) -> DaySchedule:
    """Sort segments by start and merge touching runs of the same activity.

    Overlapping segments are left alone; resolving them is the constraint
    engine's and the repair procedure's job.
    """
    if not len(schedule):
        raise ScheduleError('Cannot normalize an empty schedule')

    merged = []
    for segment in _sorted_segments(schedule):
        previous = merged[-1] if merged else None
        if previous and previous.activity == segment.activity and previous.end == segment.start:
            merged[-1] = ActivitySegment(previous.activity, previous.start, segment.end)
        else:
            merged.append(segment)
    return DaySchedule(tuple(merged))


def covers_day(schedule: DaySchedule) -> bool:
    """True if the sorted segments tile [00:00, 24:00] without gaps or overlaps."""
    if not len(schedule):
        return False
    cursor = 0
    for segment in _sorted_segments(schedule):
        if segment.start != cursor:
            return False
        cursor = segment.end
    return cursor == DAY_MINUTES


def minute_labels(schedule: DaySchedule) -> np.ndarray:
    """Activity code for each of the 1440 minutes of a day-covering schedule."""
    if not covers_day(schedule):
        raise ScheduleError('Schedule does not cover 00:00-24:00 contiguously')
    segments = _sorted_segments(schedule)
    return np.repeat(
        np.array([segment.activity.code for segment in segments], dtype=np.int64),
        [segment.duration for segment in segments],
    )


def discretize(schedule: DaySchedule) -> SlotSequence:
    """Label each 15-minute slot with the activity of longest overlap.

    Ties go to the activity that appears first inside the slot, i.e. the
    earlier-starting segment.
    """
    windows = minute_labels(schedule).reshape(SLOTS_PER_DAY, SLOT_MINUTES)
    labels = []
    for window in windows:
        counts = np.bincount(window, minlength=len(ACTIVITY_TYPES))
        best = counts.max()
        code = next(int(code) for code in window if counts[code] == best)
        labels.append(ACTIVITY_TYPES[code])
    return SlotSequence(tuple(labels))


def episodes(seq: SlotSequence) -> list:
    """Maximal runs of identical slot labels, in order."""
    result = []
    cursor = 0
    for activity, run in groupby(seq.slots):
        length = sum(1 for _ in run)
        result.append(Episode(activity, cursor, length))
        cursor += length
    return result


def expand_episodes(items: Iterable) -> SlotSequence:
    slots = []
    for episode in items:
        slots.extend([episode.activity] * episode.length_slots)
    return SlotSequence(tuple(slots))
