"""
Default duration bounds and commonsense rules for the constraint audit.

Both tables are plain data and can be replaced per deployment through JSON
documents (see load_duration_bounds / load_commonsense_rules).
"""
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

from .exceptions import ConfigError
from .schedule import ACTIVITY_TYPES, DAY_MINUTES, ActivityType


# (min_minutes, max_minutes) per activity type
DEFAULT_DURATION_BOUNDS = {
    'home': (15, 1440),
    'work': (30, 960),
    'education': (30, 720),
    'shopping': (5, 240),
    'service': (5, 240),
    'medical': (10, 480),
    'dine_out': (10, 240),
    'socialize': (10, 480),
    'exercise': (10, 300),
    'dropoff_pickup': (5, 60),
}

# Coherence: more segments than this in one day counts as fragmentation.
MAX_EPISODES = 12

# Coherence: an A -> B -> A detour where B is shorter than this is flagged.
MIN_DETOUR_MINUTES = 15

AFFIRMATIVE_VALUES = ['yes', 'y', 'true', '1']

# Each rule fires on episodes of `activity` lasting at least `min_minutes`
# when the profile matches. `match` is 'any' (a keyword occurs in one of
# `profile_fields`), 'none' (no keyword occurs in any of them) or 'exact'
# (a field equals one of the keywords).
DEFAULT_COMMONSENSE_RULES = [
    {
        'id': 'retired-no-work',
        'description': 'Retired or unemployed profile assigned a prolonged work activity',
        'activity': 'work',
        'min_minutes': 120,
        'profile_fields': ['primary_activity', 'employment_status'],
        'keywords': ['retired', 'unemployed', 'not employed'],
        'match': 'any',
        'severity': 'violation',
    },
    {
        'id': 'work-from-home-note',
        'description': 'Profile works from home; out-of-home work episode is worth a second look',
        'activity': 'work',
        'min_minutes': 0,
        'profile_fields': ['work_from_home'],
        'keywords': AFFIRMATIVE_VALUES,
        'match': 'exact',
        'severity': 'info',
    },
    {
        'id': 'non-student-education',
        'description': 'Prolonged education activity for a profile with no student indication',
        'activity': 'education',
        'min_minutes': 120,
        'profile_fields': ['primary_activity', 'employment_status', 'occupation'],
        'keywords': ['student', 'school', 'college', 'university'],
        'match': 'none',
        'severity': 'violation',
    },
]


@dataclass(frozen=True)
class DurationBounds:
    """Per-activity (min_minutes, max_minutes); both ends inclusive."""

    table: Mapping

    def __post_init__(self):
        table = {}
        for activity in ACTIVITY_TYPES:
            if activity.value not in self.table and activity not in self.table:
                raise ConfigError(f'Duration bounds missing activity {activity.value!r}')
            low, high = self.table.get(activity, self.table.get(activity.value))
            low, high = int(low), int(high)
            if not 0 < low <= high <= DAY_MINUTES:
                raise ConfigError(f'Invalid bounds for {activity.value}: [{low}, {high}]')
            table[activity] = (low, high)
        unknown = {str(key) for key in self.table} - {a.value for a in ACTIVITY_TYPES}
        if unknown:
            raise ConfigError(f'Duration bounds name unknown activities: {sorted(unknown)}')
        object.__setattr__(self, 'table', MappingProxyType(table))

    def __getitem__(self, activity) -> tuple:
        return self.table[ActivityType.parse(activity)]

    def allows(self, activity, minutes: int) -> bool:
        low, high = self[activity]
        return low <= minutes <= high

    def to_document(self) -> dict:
        return {activity.value: list(bounds) for activity, bounds in self.table.items()}


@dataclass(frozen=True)
class CommonsenseRule:
    id: str
    description: str
    activity: ActivityType
    min_minutes: int
    profile_fields: tuple
    keywords: tuple
    match: str = 'any'
    severity: str = 'violation'

    def applies_to(self, profile) -> bool:
        if self.match == 'exact':
            values = {profile.display_value(name).strip().lower() for name in self.profile_fields}
            return bool(values & {keyword.lower() for keyword in self.keywords})
        mentioned = profile.mentions(self.profile_fields, self.keywords)
        return mentioned if self.match == 'any' else not mentioned

    @classmethod
    def from_document(cls, document: Mapping) -> 'CommonsenseRule':
        try:
            rule = cls(
                id=str(document['id']),
                description=str(document['description']),
                activity=ActivityType.parse(document['activity']),
                min_minutes=int(document.get('min_minutes', 0)),
                profile_fields=tuple(document['profile_fields']),
                keywords=tuple(document['keywords']),
                match=document.get('match', 'any'),
                severity=document.get('severity', 'violation'),
            )
        except KeyError as e:
            raise ConfigError(f'Commonsense rule missing key {e.args[0]!r}') from None
        if rule.match not in ('any', 'none', 'exact'):
            raise ConfigError(f'Rule {rule.id}: match must be any, none or exact')
        if rule.severity not in ('violation', 'info'):
            raise ConfigError(f'Rule {rule.id}: severity must be violation or info')
        return rule


@dataclass(frozen=True)
class CoherenceLimits:
    """Fragmentation cap and the shortest A -> B -> A detour left unflagged."""

    max_episodes: int = MAX_EPISODES
    min_detour_minutes: int = MIN_DETOUR_MINUTES

    def __post_init__(self):
        if self.max_episodes < 1:
            raise ConfigError(f'max_episodes must be at least 1, got {self.max_episodes}')
        if not 0 <= self.min_detour_minutes <= DAY_MINUTES:
            raise ConfigError(f'min_detour_minutes out of range: {self.min_detour_minutes}')


def default_duration_bounds() -> DurationBounds:
    return DurationBounds(DEFAULT_DURATION_BOUNDS)


def default_commonsense_rules() -> tuple:
    return tuple(CommonsenseRule.from_document(rule) for rule in DEFAULT_COMMONSENSE_RULES)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f'Cannot read configuration document {path}: {e}') from e


def load_duration_bounds(path: Optional[str] = None) -> DurationBounds:
    """Defaults, overridden per activity by `{"duration_bounds": {...}}` in `path`."""
    if not path:
        return default_duration_bounds()
    document = _read_json(path)
    overrides = document.get('duration_bounds', document) if isinstance(document, dict) else None
    if not isinstance(overrides, dict):
        raise ConfigError(f'{path}: expected an object of activity -> [min, max]')
    table = dict(DEFAULT_DURATION_BOUNDS)
    table.update(overrides)
    return DurationBounds(table)


def load_commonsense_rules(path: Optional[str] = None) -> tuple:
    if not path:
        return default_commonsense_rules()
    document = _read_json(path)
    rules = document.get('commonsense_rules') if isinstance(document, dict) else document
    if not isinstance(rules, list):
        raise ConfigError(f'{path}: expected a list of commonsense rules')
    return tuple(CommonsenseRule.from_document(rule) for rule in rules)
