"""
Rule-based reward for editor roll-outs:

    R = r_fmt + r_con + r_sim

r_fmt   1.0 if both [THOUGHT] and [JSON] blocks are present, 0.5 if one, else 0.0
r_con   mean of three indicators: full-day coverage, continuity, duration bounds
r_sim   0.40 Acc + 0.10 Macro-F1 + 0.25 (1 - JSD activity) + 0.25 (1 - JSD interval)

group_advantages() turns a group of roll-out rewards into GRPO advantages.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agent_service import parse_tagged_output
from .constraint_rules import DurationBounds, default_duration_bounds
from .exceptions import ActivityEditorError, MetricError
from .metrics_service import (
    activity_histogram,
    interval_histogram,
    jensen_shannon,
    slot_accuracy,
    slot_macro_f1,
)
from .schedule import DAY_MINUTES, DaySchedule, discretize

logger = logging.getLogger(__name__)

SIMILARITY_WEIGHTS = {
    'accuracy': 0.40,
    'macro_f1': 0.10,
    'activity': 0.25,
    'interval': 0.25,
}

ADVANTAGE_EPSILON = 1e-8


@dataclass(frozen=True)
class RewardBreakdown:
    r_fmt: float
    r_con: float
    r_sim: float
    notes: tuple = field(default_factory=tuple)

    @property
    def total(self) -> float:
        return self.r_fmt + self.r_con + self.r_sim

    def to_document(self) -> dict:
        return {
            'r_fmt': self.r_fmt,
            'r_con': self.r_con,
            'r_sim': self.r_sim,
            'total': self.total,
        }


def r_fmt(raw_output: str) -> float:
    tagged = parse_tagged_output(raw_output)
    present = (tagged.thought is not None) + (tagged.json_block is not None)
    return present / 2.0


def full_day_indicator(schedule: DaySchedule) -> bool:
    segments = sorted(schedule.segments, key=lambda segment: (segment.start, segment.end))
    if not segments:
        return False
    return segments[0].start == 0 and max(segment.end for segment in segments) == DAY_MINUTES


def continuity_indicator(schedule: DaySchedule) -> bool:
    segments = sorted(schedule.segments, key=lambda segment: (segment.start, segment.end))
    if not segments:
        return False
    return all(prev.end == nxt.start for prev, nxt in zip(segments, segments[1:]))


def duration_indicator(schedule: DaySchedule, bounds: DurationBounds) -> bool:
    if not len(schedule):
        return False
    return all(bounds.allows(segment.activity, segment.duration) for segment in schedule)


def r_con(schedule: DaySchedule, bounds: Optional[DurationBounds] = None) -> float:
    bounds = bounds or default_duration_bounds()
    indicators = (
        full_day_indicator(schedule),
        continuity_indicator(schedule),
        duration_indicator(schedule, bounds),
    )
    return sum(indicators) / 3.0


def r_sim(gen: DaySchedule, gt: DaySchedule) -> float:
    """Slot-level fidelity of `gen` to `gt`; both must cover the day."""
    gen_codes = discretize(gen).codes()
    gt_codes = discretize(gt).codes()
    score = (
        SIMILARITY_WEIGHTS['accuracy'] * slot_accuracy(gen_codes, gt_codes)
        + SIMILARITY_WEIGHTS['macro_f1'] * slot_macro_f1(gen_codes, gt_codes)
        + SIMILARITY_WEIGHTS['activity'] * (1 - jensen_shannon(activity_histogram(gen_codes),
                                                               activity_histogram(gt_codes)))
        + SIMILARITY_WEIGHTS['interval'] * (1 - jensen_shannon(interval_histogram(gen_codes),
                                                               interval_histogram(gt_codes)))
    )
    return float(min(max(score, 0.0), 1.0))


def total_reward(raw_output: str, gt: DaySchedule, bounds: Optional[DurationBounds] = None) -> RewardBreakdown:
    """Score one roll-out; never raises, failures zero the affected components."""
    tagged = parse_tagged_output(raw_output)
    fmt = r_fmt(raw_output)
    notes = []

    if tagged.schedule is None:
        notes.append('no parseable [JSON] schedule' if tagged.json_block is None
                     else f'[JSON] block unparseable: {tagged.json_error}')
        return RewardBreakdown(fmt, 0.0, 0.0, tuple(notes))

    con = r_con(tagged.schedule, bounds)
    try:
        sim = r_sim(tagged.schedule, gt)
    except ActivityEditorError as e:
        notes.append(f'r_sim zeroed: {e}')
        sim = 0.0
    return RewardBreakdown(fmt, con, sim, tuple(notes))


def group_advantages(rewards) -> list:
    """(r - mean) / (population std + eps) over one roll-out group."""
    rewards = np.asarray(list(rewards), dtype=np.float64)
    if rewards.size < 2:
        raise MetricError(f'Group advantages need at least 2 rewards, got {rewards.size}')
    centered = rewards - rewards.mean()
    std = rewards.std()
    if std == 0:
        return [0.0] * rewards.size
    advantages = centered / (std + ADVANTAGE_EPSILON)
    return (advantages - advantages.mean()).tolist()
