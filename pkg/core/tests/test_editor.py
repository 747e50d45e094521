import random

import pytest

from core.constraint_service import is_hard_valid
from core.editor_service import (
    Add,
    Delete,
    EditScript,
    Replace,
    Shift,
    Split,
    apply_op,
    apply_script,
    diff,
    repair,
)
from core.exceptions import EditError
from core.mock_data import random_malformed_schedule, random_schedule
from core.schedule import ActivitySegment, ActivityType

from .helpers import day


class TestApplyOp:

    def test_add_at_end(self, ground_truth):
        extra = ActivitySegment(ActivityType.EXERCISE, 1300, 1360)
        result = apply_op(ground_truth, Add(len(ground_truth), extra))
        assert result[-1] == extra
        assert len(result) == len(ground_truth) + 1

    def test_split(self, ground_truth):
        result = apply_op(ground_truth, Split(1, 900, 'dine_out'))
        assert result[1] == ActivitySegment(ActivityType.WORK, 465, 900)
        assert result[2] == ActivitySegment(ActivityType.DINE_OUT, 900, 990)

    def test_split_outside_segment(self, ground_truth):
        with pytest.raises(EditError):
            apply_op(ground_truth, Split(1, 465, 'dine_out'))

    def test_replace_keeps_times(self, ground_truth):
        result = apply_op(ground_truth, Replace(3, 'medical'))
        assert result[3] == ActivitySegment(ActivityType.MEDICAL, 1050, 1065)

    def test_shift_needs_positive_duration(self, ground_truth):
        with pytest.raises(EditError):
            apply_op(ground_truth, Shift(1, 990, 990))

    def test_index_out_of_range(self, ground_truth):
        with pytest.raises(EditError):
            apply_op(ground_truth, Delete(6))
        with pytest.raises(EditError):
            apply_op(ground_truth, Add(7, ActivitySegment(ActivityType.HOME, 0, 15)))

    def test_script_reports_failing_position(self, ground_truth):
        with pytest.raises(EditError) as excinfo:
            apply_script(ground_truth, [Delete(0), Delete(99)])
        assert excinfo.value.position == 1
        assert str(excinfo.value).startswith('op 1: ')


class TestDiff:

    def test_case_study_script(self, draft, edited):
        script = diff(draft, edited)
        assert [(op.op, op.index) for op in script] == [
            ('DELETE', 4),
            ('REPLACE', 2),
            ('SHIFT', 1),
            ('SHIFT', 2),
            ('SHIFT', 3),
            ('SHIFT', 4),
        ]
        assert script.ops[1].new_activity is ActivityType.SHOPPING
        assert (script.ops[2].new_start, script.ops[2].new_end) == (465, 990)
        assert (script.ops[5].new_start, script.ops[5].new_end) == (1190, 1440)
        assert apply_script(draft, script) == edited

    def test_case_study_to_ground_truth(self, draft, ground_truth):
        assert apply_script(draft, diff(draft, ground_truth)) == ground_truth

    def test_identical_schedules(self, ground_truth):
        assert len(diff(ground_truth, ground_truth)) == 0

    def test_replay_reaches_target(self):
        rng = random.Random(7)
        for _ in range(500):
            source = random_malformed_schedule(rng)
            target = random_schedule(rng) if rng.random() < 0.5 else random_malformed_schedule(rng)
            assert apply_script(source, diff(source, target)) == target

    def test_document_shape(self, draft, edited):
        document = diff(draft, edited).to_document()
        assert document[0] == {'op': 'DELETE', 'index': 4, 'rationale': document[0]['rationale']}
        assert document[1]['new_activity'] == 'shopping'
        assert document[2]['new_start'] == '07:45'
        assert document[2]['new_end'] == '16:30'

    def test_document_replays(self, draft, edited):
        script = EditScript.from_document(diff(draft, edited).to_document())
        assert apply_script(draft, script) == edited

    def test_unknown_op_in_document(self):
        with pytest.raises(EditError) as excinfo:
            EditScript.from_document([{'op': 'DELETE', 'index': 0}, {'op': 'MERGE', 'index': 1}])
        assert excinfo.value.position == 1


class TestRepair:

    def test_case_study_draft(self, draft):
        assert repair(draft) == day(
            ('home', 0, 465),
            ('work', 465, 1005),
            ('home', 1005, 1080),
            ('work', 1080, 1140),
            ('shopping', 1140, 1175),
            ('home', 1175, 1440),
        )

    def test_valid_schedule_unchanged(self, ground_truth):
        assert repair(ground_truth) == ground_truth

    def test_short_gap_extends_previous(self):
        schedule = day(('home', 0, 480), ('work', 500, 1020), ('home', 1020, 1440))
        assert repair(schedule)[0] == ActivitySegment(ActivityType.HOME, 0, 500)

    def test_long_gap_becomes_home(self):
        schedule = day(('home', 0, 480), ('work', 480, 720), ('shopping', 800, 860), ('home', 860, 1440))
        assert ActivitySegment(ActivityType.HOME, 720, 800) in repair(schedule).segments

    def test_anchors_home_at_both_ends(self):
        repaired = repair(day(('work', 0, 1440)))
        assert repaired == day(('home', 0, 15), ('work', 15, 1425), ('home', 1425, 1440))

    def test_always_hard_valid_and_idempotent(self):
        rng = random.Random(2024)
        for _ in range(10_000):
            repaired = repair(random_malformed_schedule(rng))
            assert is_hard_valid(repaired)
            assert repair(repaired) == repaired
