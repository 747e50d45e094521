"""
Constraint audit for (profile, schedule) pairs.

Five categories: Physical and Logical are hard (a violation makes the
schedule invalid); Commonsense, Temporal and Coherence are soft.
Segment indices in every Violation refer to the schedule as passed to the
check; audit() normalizes first, so its indices refer to normalize(schedule).
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .constraint_rules import (
    CoherenceLimits,
    DurationBounds,
    default_commonsense_rules,
    default_duration_bounds,
)
from .schedule import DAY_MINUTES, ActivityType, DaySchedule, UserProfile, format_time, normalize

logger = logging.getLogger(__name__)


class Hardness(str, Enum):
    HARD = 'Hard'
    SOFT = 'Soft'


class ConstraintCategory(str, Enum):
    PHYSICAL = 'Physical'
    LOGICAL = 'Logical'
    COMMONSENSE = 'Commonsense'
    TEMPORAL = 'Temporal'
    COHERENCE = 'Coherence'

    @property
    def hardness(self) -> Hardness:
        if self in (ConstraintCategory.PHYSICAL, ConstraintCategory.LOGICAL):
            return Hardness.HARD
        return Hardness.SOFT


@dataclass(frozen=True)
class Violation:
    category: ConstraintCategory
    segment_indices: tuple
    description: str
    severity: str = 'violation'

    def __post_init__(self):
        object.__setattr__(self, 'segment_indices', tuple(self.segment_indices))

    @property
    def hardness(self) -> Hardness:
        return self.category.hardness

    @property
    def is_hard(self) -> bool:
        return self.hardness is Hardness.HARD

    def to_document(self) -> dict:
        return {
            'category': self.category.value,
            'hardness': self.hardness.value,
            'segment_indices': list(self.segment_indices),
            'description': self.description,
            'severity': self.severity,
        }


def _describe(segment) -> str:
    name = segment.activity.value.replace('_', ' ').title()
    return f'{name} {format_time(segment.start)}--{format_time(segment.end)}'


def check_physical(schedule: DaySchedule) -> list:
    """Overlaps, gaps, and the 00:00 / 24:00 boundaries."""
    segments = schedule.segments
    if not segments:
        return []
    violations = []

    for i, first in enumerate(segments):
        for j in range(i + 1, len(segments)):
            second = segments[j]
            if second.start >= first.end:
                break
            violations.append(Violation(
                ConstraintCategory.PHYSICAL, (i, j),
                f'Detected overlap: {_describe(first)} and {_describe(second)}',
            ))

    reach_index, reach = 0, segments[0].end
    for j in range(1, len(segments)):
        segment = segments[j]
        if segment.start > reach:
            violations.append(Violation(
                ConstraintCategory.PHYSICAL, (reach_index, j),
                f'Gap: {format_time(reach)}--{format_time(segment.start)} is not covered',
            ))
        if segment.end > reach:
            reach_index, reach = j, segment.end

    if segments[0].start != 0:
        violations.append(Violation(
            ConstraintCategory.PHYSICAL, (0,),
            f'Day starts at {format_time(segments[0].start)} instead of 00:00',
        ))
    if reach != DAY_MINUTES:
        violations.append(Violation(
            ConstraintCategory.PHYSICAL, (reach_index,),
            f'Day ends at {format_time(reach)} instead of 24:00',
        ))
    return violations


def check_logical(schedule: DaySchedule) -> list:
    """Home at both ends; no two consecutive segments of the same activity."""
    segments = schedule.segments
    if not segments:
        return []
    violations = []
    last = len(segments) - 1

    if segments[0].activity is not ActivityType.HOME:
        violations.append(Violation(
            ConstraintCategory.LOGICAL, (0,),
            f'Day starts with {segments[0].activity.value}, not home',
        ))
    if segments[last].activity is not ActivityType.HOME:
        violations.append(Violation(
            ConstraintCategory.LOGICAL, (last,),
            f'Day ends with {segments[last].activity.value}, not home',
        ))
    for i in range(1, len(segments)):
        if segments[i].activity == segments[i - 1].activity:
            violations.append(Violation(
                ConstraintCategory.LOGICAL, (i - 1, i),
                f'Consecutive identical activities must be merged: '
                f'{_describe(segments[i - 1])} and {_describe(segments[i])}',
            ))
    return violations


def check_commonsense(profile: UserProfile, schedule: DaySchedule, rules: Optional[tuple] = None) -> list:
    rules = default_commonsense_rules() if rules is None else rules
    violations = []
    for rule in rules:
        if not rule.applies_to(profile):
            continue
        for i, segment in enumerate(schedule.segments):
            if segment.activity is rule.activity and segment.duration >= rule.min_minutes:
                violations.append(Violation(
                    ConstraintCategory.COMMONSENSE, (i,),
                    f'{rule.description}: {_describe(segment)}',
                    severity=rule.severity,
                ))
    return violations


def check_temporal(schedule: DaySchedule, bounds: Optional[DurationBounds] = None) -> list:
    bounds = bounds or default_duration_bounds()
    violations = []
    for i, segment in enumerate(schedule.segments):
        low, high = bounds[segment.activity]
        if not low <= segment.duration <= high:
            violations.append(Violation(
                ConstraintCategory.TEMPORAL, (i,),
                f'{_describe(segment)} lasts {segment.duration} min, outside [{low}, {high}]',
            ))
    return violations


def check_coherence(schedule: DaySchedule, limits: Optional[CoherenceLimits] = None) -> list:
    limits = limits or CoherenceLimits()
    max_episodes, min_detour_minutes = limits.max_episodes, limits.min_detour_minutes
    segments = schedule.segments
    violations = []
    if len(segments) > max_episodes:
        violations.append(Violation(
            ConstraintCategory.COHERENCE, (),
            f'{len(segments)} segments exceed the fragmentation cap of {max_episodes}',
        ))
    for i in range(1, len(segments) - 1):
        before, middle, after = segments[i - 1], segments[i], segments[i + 1]
        if (before.activity == after.activity != middle.activity
                and middle.duration < min_detour_minutes):
            violations.append(Violation(
                ConstraintCategory.COHERENCE, (i - 1, i, i + 1),
                f'Fragmented detour: {_describe(middle)} between two {before.activity.value} segments',
            ))
    return violations


def audit(profile: UserProfile, schedule: DaySchedule, bounds: Optional[DurationBounds] = None,
          rules: Optional[tuple] = None, coherence: Optional[CoherenceLimits] = None) -> list:
    """All five checks on the normalized schedule, hard violations first."""
    normalized = normalize(schedule)
    hard = check_physical(normalized) + check_logical(normalized)
    soft = (
        check_commonsense(profile, normalized, rules)
        + check_temporal(normalized, bounds)
        + check_coherence(normalized, coherence)
    )
    logger.debug(f'Audit: {len(hard)} hard, {len(soft)} soft violations over {len(normalized)} segments')
    return hard + soft


def hard_violations(violations) -> list:
    return [violation for violation in violations if violation.is_hard]


def is_hard_valid(schedule: DaySchedule) -> bool:
    if not len(schedule):
        return False
    normalized = normalize(schedule)
    return not check_physical(normalized) and not check_logical(normalized)


def violation_report(violations) -> list:
    return [violation.to_document() for violation in violations]
