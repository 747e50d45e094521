import json

import pytest

from core.agent_service import (
    default_draft,
    generate_single_pass,
    generate_trajectory,
    grpo_prompt_record,
    parse_intention_output,
    parse_tagged_output,
    run_session,
    synthesize_sft_example,
)
from core.constraint_service import is_hard_valid
from core.exceptions import EndpointError, ScheduleError
from core.llm_service import MockChatClient
from core.mock_data import CASE_STUDY_REASONING, fixture_profiles
from core.prompts import STUDENT_SYSTEM_PROMPT, render_tagged_output
from core.schedule import DaySchedule, discretize

from .helpers import scripted_client


def intention_reply(schedule, reasoning=CASE_STUDY_REASONING):
    return json.dumps({'reasoning': reasoning, 'schedule': schedule.to_document()})


DEEPLY_NESTED = '[' * 50000


class TestParseTaggedOutput:

    def test_well_formed(self, ground_truth):
        tagged = parse_tagged_output(render_tagged_output('thinking', ground_truth))
        assert tagged.thought == 'thinking'
        assert tagged.schedule == ground_truth
        assert tagged.json_error is None

    def test_code_fenced_object(self, ground_truth):
        body = json.dumps({'schedule': ground_truth.to_document()})
        tagged = parse_tagged_output(f'[THOUGHT]t[/THOUGHT]\n[JSON]\n```json\n{body}\n```\n[/JSON]')
        assert tagged.schedule == ground_truth

    def test_bad_json_is_reported_not_raised(self):
        tagged = parse_tagged_output('[THOUGHT]t[/THOUGHT][JSON][{"activity": "nap"}][/JSON]')
        assert tagged.schedule is None
        assert tagged.json_error

    @pytest.mark.parametrize('raw', [None, '', 'no tags', 42])
    def test_total(self, raw):
        tagged = parse_tagged_output(raw)
        assert tagged.thought is None
        assert tagged.schedule is None

    def test_deeply_nested_json_is_reported(self):
        tagged = parse_tagged_output(f'[THOUGHT]x[/THOUGHT][JSON]{DEEPLY_NESTED}[/JSON]')
        assert tagged.thought == 'x'
        assert tagged.schedule is None
        assert tagged.json_error


class TestParseIntentionOutput:

    def test_object(self, draft):
        parsed = parse_intention_output(intention_reply(draft))
        assert parsed.schedule == draft
        assert parsed.reasoning == CASE_STUDY_REASONING

    def test_bare_array(self, draft):
        assert parse_intention_output(json.dumps(draft.to_document())).schedule == draft

    def test_surrounding_prose(self, draft):
        raw = f'Here is the plan:\n{intention_reply(draft)}\nLet me know!'
        assert parse_intention_output(raw).schedule == draft

    @pytest.mark.parametrize('raw', ['', 'no json', '{"reasoning": "x", "schedule": []}', '[]', DEEPLY_NESTED])
    def test_rejects(self, raw):
        with pytest.raises(ScheduleError):
            parse_intention_output(raw)


class TestGenerateTrajectory:

    def test_second_round_fixes_the_draft(self, profile, draft, edited, endpoint):
        client = scripted_client(
            intention_reply(draft),
            render_tagged_output('looks fine', draft),
            render_tagged_output('fixed the overlap', edited),
        )
        schedule, provenance = generate_trajectory(profile, endpoint, client=client)
        assert schedule == edited
        assert provenance.editor_rounds == 2
        assert not provenance.fallback_used
        assert [record.stage for record in provenance.records] == ['intention', 'editor', 'editor']

        calls = client.chat.completions.create.call_args_list
        first_editor = calls[1].kwargs['messages'][1]['content']
        second_editor = calls[2].kwargs['messages'][1]['content']
        assert 'VIOLATIONS DETECTED:' not in first_editor
        assert 'VIOLATIONS DETECTED:' in second_editor

    def test_repair_after_max_rounds(self, profile, draft, endpoint):
        client = scripted_client(intention_reply(draft), 'garbage', 'garbage', 'garbage')
        schedule, provenance = generate_trajectory(profile, endpoint, client=client)
        assert is_hard_valid(schedule)
        assert provenance.repair_fallback
        assert provenance.editor_rounds == 3
        assert provenance.records[-1].stage == 'repair'
        assert provenance.records[-1].fallback_used

    def test_intention_fallback(self, profile, ground_truth, endpoint):
        client = scripted_client('nope', 'nope', 'nope', render_tagged_output('ok', ground_truth))
        schedule, provenance = generate_trajectory(profile, endpoint, client=client)
        assert provenance.intention_fallback
        assert provenance.draft == default_draft()
        assert schedule == ground_truth

    def test_deeply_nested_intention_falls_back(self, profile, ground_truth, endpoint):
        client = scripted_client(*[DEEPLY_NESTED] * 3, render_tagged_output('ok', ground_truth))
        schedule, provenance = generate_trajectory(profile, endpoint, client=client)
        assert provenance.intention_fallback
        assert is_hard_valid(schedule)

    def test_endpoint_failure_propagates(self, profile, endpoint):
        client = scripted_client(*[ConnectionError('down')] * 3)
        with pytest.raises(EndpointError):
            generate_trajectory(profile, endpoint, client=client)

    def test_mock_endpoint_always_valid_and_deterministic(self, endpoint):
        profiles = fixture_profiles(12)
        first = [generate_trajectory(p, endpoint, client=MockChatClient(seed=3))[0] for p in profiles]
        second = [generate_trajectory(p, endpoint, client=MockChatClient(seed=3))[0] for p in profiles]
        assert first == second
        assert all(is_hard_valid(schedule) for schedule in first)

    def test_single_pass(self, profile, draft, endpoint):
        client = scripted_client(intention_reply(draft))
        schedule, provenance = generate_single_pass(profile, endpoint, client=client)
        assert is_hard_valid(schedule)
        assert provenance.repair_fallback
        assert provenance.editor_rounds == 0


class TestSessionDocument:

    def test_run_session(self, profile, draft, edited, endpoint):
        client = scripted_client(intention_reply(draft), render_tagged_output('fixed', edited))
        document = run_session('u1', profile, endpoint, client=client)
        assert document['user_id'] == 'u1'
        assert document['schedule'] == edited.to_document()
        assert document['draft'] == draft.to_document()
        assert document['rounds'] == 1
        assert document['fallback_used'] is False
        json.dumps(document)


class TestSftSynthesis:

    def test_matching_teacher_trace_is_kept(self, profile, draft, ground_truth, endpoint):
        client = scripted_client(render_tagged_output('teacher reasoning', ground_truth))
        record = synthesize_sft_example(profile, draft, ground_truth, endpoint, client=client)
        assert not record.rebuilt
        roles = [message['role'] for message in record.to_document()['messages']]
        assert roles == ['system', 'user', 'assistant']
        assert record.messages[0]['content'] == STUDENT_SYSTEM_PROMPT
        assert 'teacher reasoning' in record.messages[2]['content']

    def test_mismatch_is_rebuilt(self, profile, draft, edited, ground_truth, endpoint):
        client = scripted_client(render_tagged_output('teacher reasoning', edited))
        record = synthesize_sft_example(profile, draft, ground_truth, endpoint, client=client)
        assert record.rebuilt
        tagged = parse_tagged_output(record.messages[2]['content'])
        assert discretize(tagged.schedule) == discretize(ground_truth)
        assert "- DELETE: 'shopping' at idx 4" in tagged.thought

    def test_endpoint_failure_falls_back(self, profile, draft, ground_truth, endpoint):
        client = scripted_client(*[ConnectionError('down')] * 3)
        record = synthesize_sft_example(profile, draft, ground_truth, endpoint, client=client)
        assert record.rebuilt

    def test_strict_mode_raises(self, profile, draft, ground_truth, endpoint):
        client = scripted_client(*[ConnectionError('down')] * 3)
        with pytest.raises(EndpointError):
            synthesize_sft_example(profile, draft, ground_truth, endpoint, client=client, allow_fallback=False)

    def test_mock_teacher(self, profile, draft, ground_truth, endpoint):
        record = synthesize_sft_example(profile, draft, ground_truth, endpoint, client=MockChatClient())
        tagged = parse_tagged_output(record.messages[2]['content'])
        assert discretize(tagged.schedule) == discretize(ground_truth)


def test_grpo_prompt_record(profile, ground_truth):
    record = grpo_prompt_record(7, profile, ground_truth)
    assert record['prompt_id'] == '7'
    assert [message['role'] for message in record['messages']] == ['system', 'user']
    assert DaySchedule.from_document(record['ground_truth_schedule']) == ground_truth
