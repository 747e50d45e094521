"""
Editor action space: typed edit operations over a DaySchedule, an edit-script
diff between two schedules, and the deterministic repair procedure.

Operations:
- Add: insert a segment at an index
- Delete: remove the segment at an index
- Shift: move the start/end of the segment at an index
- Replace: change the activity of the segment at an index
- Split: cut the segment at an index in two, the second half taking a new activity

Merging is not an operation; callers normalize after editing.
"""
import logging
from dataclasses import dataclass, field
from typing import Union

from .exceptions import EditError, ScheduleError
from .schedule import DAY_MINUTES, ActivitySegment, ActivityType, DaySchedule, format_time, normalize, parse_time

logger = logging.getLogger(__name__)

# Gaps shorter than this are absorbed by the preceding activity; longer ones become home.
DEFAULT_GAP_EXTEND_MINUTES = 30

# Length of the home block carved at a day boundary that does not end at home.
HOME_ANCHOR_MINUTES = 15


@dataclass(frozen=True)
class Add:
    index: int
    segment: ActivitySegment
    rationale: str = ''

    op = 'ADD'

    def describe(self) -> str:
        return (f"ADD: activity '{self.segment.activity.value}' at time "
                f"{format_time(self.segment.start)}-{format_time(self.segment.end)}")

    def params(self) -> dict:
        return {'segment': self.segment.to_document()}


@dataclass(frozen=True)
class Delete:
    index: int
    rationale: str = ''
    activity: str = ''

    op = 'DELETE'

    def describe(self) -> str:
        return f"DELETE: activity '{self.activity}' at index {self.index}"

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Shift:
    index: int
    new_start: int
    new_end: int
    rationale: str = ''
    activity: str = ''

    op = 'SHIFT'

    def describe(self) -> str:
        return (f"SHIFT: activity '{self.activity}' to "
                f"{format_time(self.new_start)}-{format_time(self.new_end)}")

    def params(self) -> dict:
        return {'new_start': format_time(self.new_start), 'new_end': format_time(self.new_end)}


@dataclass(frozen=True)
class Replace:
    index: int
    new_activity: ActivityType
    rationale: str = ''
    activity: str = ''

    op = 'REPLACE'

    def __post_init__(self):
        object.__setattr__(self, 'new_activity', ActivityType.parse(self.new_activity))

    def describe(self) -> str:
        return f"REPLACE: activity '{self.activity}' -> '{self.new_activity.value}'"

    def params(self) -> dict:
        return {'new_activity': self.new_activity.value}


@dataclass(frozen=True)
class Split:
    index: int
    split_time: int
    second_activity: ActivityType
    rationale: str = ''
    activity: str = ''

    op = 'SPLIT'

    def __post_init__(self):
        object.__setattr__(self, 'second_activity', ActivityType.parse(self.second_activity))

    def describe(self) -> str:
        return (f"SPLIT: activity '{self.activity}' divided at {format_time(self.split_time)}, "
                f"second segment '{self.second_activity.value}'")

    def params(self) -> dict:
        return {
            'split_time': format_time(self.split_time),
            'second_activity': self.second_activity.value,
        }


EditOp = Union[Add, Delete, Shift, Replace, Split]


@dataclass(frozen=True)
class EditScript:
    ops: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'ops', tuple(self.ops))

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def to_document(self) -> list:
        return [
            {'op': op.op, 'index': op.index, **op.params(), 'rationale': op.rationale}
            for op in self.ops
        ]

    @classmethod
    def from_document(cls, items) -> 'EditScript':
        ops = []
        for position, item in enumerate(items):
            try:
                ops.append(_op_from_document(item))
            except (KeyError, TypeError) as e:
                raise EditError(f'malformed op document: {e}', position=position) from None
            except ScheduleError as e:
                raise EditError(str(e), position=position) from e
        return cls(tuple(ops))


def _op_from_document(item) -> EditOp:
    kind = str(item['op']).upper()
    index = int(item['index'])
    rationale = item.get('rationale', '')
    if kind == 'ADD':
        return Add(index, ActivitySegment.from_document(item['segment']), rationale)
    if kind == 'DELETE':
        return Delete(index, rationale)
    if kind == 'SHIFT':
        return Shift(index, parse_time(item['new_start']), parse_time(item['new_end']), rationale)
    if kind == 'REPLACE':
        return Replace(index, item['new_activity'], rationale)
    if kind == 'SPLIT':
        return Split(index, parse_time(item['split_time']), item['second_activity'], rationale)
    raise EditError(f'Unknown edit operation {kind!r}')


def _check_index(op, size: int, inclusive: bool = False):
    upper = size if inclusive else size - 1
    if not 0 <= op.index <= upper:
        raise EditError(f'{op.op} index {op.index} out of range for {size} segments')


def apply_op(schedule: DaySchedule, op: EditOp) -> DaySchedule:
    """Apply one operation locally; the result is not re-normalized."""
    segments = list(schedule.segments)

    if isinstance(op, Add):
        _check_index(op, len(segments), inclusive=True)
        segments.insert(op.index, op.segment)
        return DaySchedule(segments)

    _check_index(op, len(segments))
    target = segments[op.index]

    if isinstance(op, Delete):
        del segments[op.index]
    elif isinstance(op, Shift):
        if not op.new_start < op.new_end:
            raise EditError(f'SHIFT at {op.index} would leave a non-positive duration')
        try:
            segments[op.index] = ActivitySegment(target.activity, op.new_start, op.new_end)
        except ScheduleError as e:
            raise EditError(str(e)) from e
    elif isinstance(op, Replace):
        segments[op.index] = ActivitySegment(op.new_activity, target.start, target.end)
    elif isinstance(op, Split):
        if not target.start < op.split_time < target.end:
            raise EditError(
                f'SPLIT time {format_time(op.split_time)} is not strictly inside '
                f'{format_time(target.start)}-{format_time(target.end)}'
            )
        segments[op.index:op.index + 1] = [
            ActivitySegment(target.activity, target.start, op.split_time),
            ActivitySegment(op.second_activity, op.split_time, target.end),
        ]
    else:
        raise EditError(f'Unknown edit operation: {op!r}')
    return DaySchedule(segments)


def apply_script(schedule: DaySchedule, script) -> DaySchedule:
    """Left fold of apply_op; the first failing op aborts with its position."""
    ops = script.ops if isinstance(script, EditScript) else tuple(script)
    for position, op in enumerate(ops):
        try:
            schedule = apply_op(schedule, op)
        except ScheduleError as e:
            raise EditError(str(e), position=position) from e
    return schedule


def _overlap(a: ActivitySegment, b: ActivitySegment) -> int:
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def _align(source: tuple, target: tuple) -> list:
    """Greedy non-crossing alignment, same-activity pairs first, then by overlap."""
    candidates = []
    for si, s in enumerate(source):
        for ti, t in enumerate(target):
            overlap = _overlap(s, t)
            same = s.activity == t.activity
            if overlap > 0 or same:
                candidates.append((not same, -overlap, si, ti))
    candidates.sort()

    pairs = []
    used_source, used_target = set(), set()
    for _, _, si, ti in candidates:
        if si in used_source or ti in used_target:
            continue
        if any((si < a) != (ti < b) for a, b in pairs):
            continue
        pairs.append((si, ti))
        used_source.add(si)
        used_target.add(ti)
    return sorted(pairs)


def diff(source: DaySchedule, target: DaySchedule) -> EditScript:
    """An edit script turning `source` into `target`.

    Ops come ordered Delete (descending index), Replace, Shift, Add (ascending
    time). Replay correctness is guaranteed; minimality is not.
    """
    pairs = _align(source.segments, target.segments)
    matched_source = {si for si, _ in pairs}
    matched_target = {ti for _, ti in pairs}
    ops = []

    for si in sorted(set(range(len(source))) - matched_source, reverse=True):
        segment = source[si]
        ops.append(Delete(si, rationale=f'{segment} has no counterpart in the target',
                          activity=segment.activity.value))

    # After deletes, position k holds the k-th matched source segment.
    for position, (si, ti) in enumerate(pairs):
        s, t = source[si], target[ti]
        if s.activity != t.activity:
            ops.append(Replace(position, t.activity,
                               rationale=f'{s.activity.value} should be {t.activity.value}',
                               activity=s.activity.value))
    for position, (si, ti) in enumerate(pairs):
        s, t = source[si], target[ti]
        if (s.start, s.end) != (t.start, t.end):
            ops.append(Shift(position, t.start, t.end,
                             rationale=(f'{format_time(s.start)}-{format_time(s.end)} -> '
                                        f'{format_time(t.start)}-{format_time(t.end)}'),
                             activity=t.activity.value))

    for ti in sorted(set(range(len(target))) - matched_target):
        segment = target[ti]
        ops.append(Add(ti, segment, rationale=f'{segment} is missing'))

    return EditScript(tuple(ops))


def _carve_home(segments: list, low: int, high: int) -> list:
    carved = []
    for segment in segments:
        if segment.end <= low or segment.start >= high:
            carved.append(segment)
            continue
        if segment.start < low:
            carved.append(ActivitySegment(segment.activity, segment.start, low))
        if segment.end > high:
            carved.append(ActivitySegment(segment.activity, high, segment.end))
    carved.append(ActivitySegment(ActivityType.HOME, low, high))
    return sorted(carved, key=lambda segment: segment.start)


def repair(schedule: DaySchedule, gap_extend_minutes: int = DEFAULT_GAP_EXTEND_MINUTES) -> DaySchedule:
    """Deterministically turn any non-empty schedule into a hard-valid one.

    normalize -> truncate overlaps -> fill gaps -> pin 00:00 / 24:00 ->
    anchor home at both ends -> merge.
    """
    segments = list(normalize(schedule).segments)

    kept = []
    for segment in segments:
        if kept and segment.start < kept[-1].end:
            if segment.end <= kept[-1].end:
                continue
            segment = ActivitySegment(segment.activity, kept[-1].end, segment.end)
        kept.append(segment)

    filled = [kept[0]]
    for segment in kept[1:]:
        previous = filled[-1]
        if segment.start > previous.end:
            if segment.start - previous.end < gap_extend_minutes:
                filled[-1] = ActivitySegment(previous.activity, previous.start, segment.start)
            else:
                filled.append(ActivitySegment(ActivityType.HOME, previous.end, segment.start))
        filled.append(segment)

    if filled[0].start > 0:
        filled.insert(0, ActivitySegment(ActivityType.HOME, 0, filled[0].start))
    if filled[-1].end < DAY_MINUTES:
        last = filled[-1]
        filled[-1] = ActivitySegment(last.activity, last.start, DAY_MINUTES)

    if filled[0].activity is not ActivityType.HOME:
        filled = _carve_home(filled, 0, HOME_ANCHOR_MINUTES)
    if filled[-1].activity is not ActivityType.HOME:
        filled = _carve_home(filled, DAY_MINUTES - HOME_ANCHOR_MINUTES, DAY_MINUTES)

    repaired = normalize(DaySchedule(filled))
    if repaired != schedule:
        logger.debug(f'Repaired schedule: {len(schedule)} -> {len(repaired)} segments')
    return repaired
