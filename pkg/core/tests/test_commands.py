import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from core.config import RunConfig
from core.constraint_service import is_hard_valid
from core.exceptions import ConfigError, EndpointError, MetricError
from core.io_service import load_population, save_population, write_json, write_jsonl
from core.management.pipeline import EXIT_IO, EXIT_USAGE, EXIT_VALIDATION, exit_code_for
from core.mock_data import fixture_profiles, random_population
from core.models import GenerationRun, GenerationSession
from core.prompts import render_tagged_output
from core.schedule import DaySchedule
from core.tasks import generate_session

from .helpers import day


def run(name, *args, **options):
    out, err = StringIO(), StringIO()
    call_command(name, *args, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


@pytest.fixture
def profiles_file(tmp_path):
    path = tmp_path / 'profiles.json'
    rows = [dict(profile.to_document(), user_id=f'p{n}') for n, profile in enumerate(fixture_profiles(6))]
    path.write_text(json.dumps(rows), encoding='utf-8')
    return str(path)


@pytest.fixture
def case_study_files(tmp_path, profile, draft, ground_truth):
    profiles = tmp_path / 'case_profiles.json'
    profiles.write_text(json.dumps([dict(profile.to_document(), user_id='u1')]), encoding='utf-8')
    drafts, truth = tmp_path / 'drafts.json', tmp_path / 'truth.json'
    save_population(drafts, {'u1': draft})
    save_population(truth, {'u1': ground_truth})
    return str(profiles), str(drafts), str(truth)


@pytest.mark.django_db
class TestGenerate:

    def test_mock_population_is_hard_valid(self, tmp_path, profiles_file):
        out = tmp_path / 'population.json'
        run('generate', profiles=profiles_file, out=str(out), provider='mock', concurrency=3)

        population = load_population(out)
        assert list(population) == [f'p{n}' for n in range(6)]
        provenance = tmp_path.joinpath('population.provenance.jsonl').read_text().splitlines()
        records = [json.loads(line) for line in provenance]
        assert {record['user_id'] for record in records} == set(population)
        assert all({'round', 'raw_output', 'violations', 'fallback_used'} <= set(record) for record in records)

        generation = GenerationRun.objects.get()
        assert generation.status == 'completed'
        assert generation.profile_count == 6
        assert generation.config['duration_bounds']['work'] == [30, 960]
        assert GenerationSession.objects.filter(run=generation).count() == 6

    def test_fifty_profiles_then_evaluate(self, tmp_path):
        profiles, out, reference = tmp_path / 'profiles.json', tmp_path / 'gen.json', tmp_path / 'ref.json'
        rows = [dict(profile.to_document(), user_id=f'u{n:04d}') for n, profile in enumerate(fixture_profiles(50))]
        profiles.write_text(json.dumps(rows), encoding='utf-8')
        save_population(reference, random_population(50, seed=9))

        run('generate', profiles=str(profiles), out=str(out), provider='mock')
        assert len(load_population(out)) == 50

        report = tmp_path / 'metrics.json'
        run('evaluate', gen=str(out), ref=str(reference), out=str(report))
        assert len(json.loads(report.read_text())['metrics']) == 12

    def test_same_seed_same_bytes(self, tmp_path, profiles_file):
        first, second = tmp_path / 'one.json', tmp_path / 'two.json'
        run('generate', profiles=profiles_file, out=str(first), provider='mock', seed=7)
        run('generate', profiles=profiles_file, out=str(second), provider='mock', seed=7, concurrency=1)
        assert first.read_bytes() == second.read_bytes()

    def test_single_pass(self, tmp_path, profiles_file):
        out = tmp_path / 'population.json'
        run('generate', profiles=profiles_file, out=str(out), provider='mock', single_pass=True)
        assert len(load_population(out)) == 6
        assert GenerationRun.objects.get().mode == 'single_pass'

    def test_needs_profiles(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('generate', out=str(tmp_path / 'population.json'), provider='mock')
        assert excinfo.value.returncode == EXIT_USAGE

    def test_missing_profile_file(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('generate', profiles=str(tmp_path / 'absent.csv'), out=str(tmp_path / 'p.json'), provider='mock')
        assert excinfo.value.returncode == EXIT_IO


class TestValidateAndRepair:

    def test_case_study_draft_is_invalid(self, tmp_path, draft):
        path = tmp_path / 'draft.json'
        write_json(path, draft.to_document())
        out = StringIO()
        with pytest.raises(CommandError) as excinfo:
            call_command('validate', schedules=str(path), stdout=out)
        assert excinfo.value.returncode == EXIT_VALIDATION
        assert 'draft: invalid' in out.getvalue()
        assert '[Physical] Detected overlap' in out.getvalue()

    def test_repaired_draft_validates(self, tmp_path, draft):
        source, repaired = tmp_path / 'draft.json', tmp_path / 'repaired.json'
        write_json(source, draft.to_document())
        run('repair', schedules=str(source), out=str(repaired))

        assert isinstance(json.loads(repaired.read_text()), list)
        stdout, _ = run('validate', schedules=str(repaired))
        assert 'All 1 schedules are hard-valid' in stdout

    def test_validate_report_file(self, tmp_path, ground_truth):
        source, report = tmp_path / 'population.json', tmp_path / 'report.json'
        save_population(source, {'a': ground_truth})
        run('validate', schedules=str(source), out=str(report))
        assert json.loads(report.read_text())[0]['status'] == 'valid'

    def test_coherence_flags(self, tmp_path):
        path = tmp_path / 'detour.json'
        write_json(path, day(('home', 0, 600), ('shopping', 600, 610), ('home', 610, 1440)).to_document())
        strict, relaxed = tmp_path / 'strict.json', tmp_path / 'relaxed.json'
        run('validate', schedules=str(path), out=str(strict))
        run('validate', schedules=str(path), out=str(relaxed), min_detour_minutes=5)
        assert json.loads(strict.read_text())[0]['violations']
        assert json.loads(relaxed.read_text())[0]['violations'] == []

    def test_missing_schedules_file(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('validate', schedules=str(tmp_path / 'absent.json'))
        assert excinfo.value.returncode == EXIT_IO


class TestDiff:

    def test_bare_schedules(self, tmp_path, draft, edited):
        source, target = tmp_path / 'draft.json', tmp_path / 'edited.json'
        write_json(source, draft.to_document())
        write_json(target, edited.to_document())
        stdout, _ = run('diff', '--from', str(source), '--to', str(target))
        assert [op['op'] for op in json.loads(stdout)] == ['DELETE', 'REPLACE', 'SHIFT', 'SHIFT', 'SHIFT', 'SHIFT']

    def test_populations_must_match(self, tmp_path, draft, edited):
        source, target = tmp_path / 'a.json', tmp_path / 'b.json'
        save_population(source, {'u1': draft})
        save_population(target, {'u2': edited})
        with pytest.raises(CommandError) as excinfo:
            run('diff', '--from', str(source), '--to', str(target))
        assert excinfo.value.returncode == EXIT_VALIDATION


class TestScoreRollouts:

    def test_groups_and_advantages(self, tmp_path, ground_truth, edited):
        refs, out = tmp_path / 'rollouts.jsonl', tmp_path / 'scores.jsonl'
        texts = [render_tagged_output('x', edited if n % 2 else ground_truth) for n in range(8)] + ['garbage']
        write_jsonl(refs, [
            {'prompt_id': 'p', 'rollout_text': text, 'ground_truth_schedule': ground_truth.to_document()}
            for text in texts
        ])
        _, stderr = run('score_rollouts', refs=str(refs), out=str(out))

        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(lines) == 9
        assert sum(line['advantage'] for line in lines[:8]) == pytest.approx(0.0, abs=1e-9)
        assert lines[0]['total'] == pytest.approx(3.0)
        assert lines[-1]['advantage'] is None
        assert 'Scored 9 roll-outs' in stderr

    def test_prompt_change_closes_group(self, tmp_path, ground_truth):
        refs = tmp_path / 'rollouts.jsonl'
        document = ground_truth.to_document()
        write_jsonl(refs, [
            {'prompt_id': 'a', 'rollout_text': '', 'ground_truth_schedule': document},
            {'prompt_id': 'a', 'rollout_text': 'no tags', 'ground_truth_schedule': document},
            {'prompt_id': 'b', 'rollout_text': '', 'ground_truth_schedule': document},
        ])
        stdout, _ = run('score_rollouts', refs=str(refs))
        lines = [json.loads(line) for line in stdout.splitlines()]
        assert [line['prompt_id'] for line in lines] == ['a', 'a', 'b']
        assert lines[0]['advantage'] == 0.0
        assert lines[2]['advantage'] is None

    def test_invalid_line(self, tmp_path):
        refs = tmp_path / 'rollouts.jsonl'
        write_jsonl(refs, [{'prompt_id': 'a', 'rollout_text': ''}])
        with pytest.raises(CommandError) as excinfo:
            run('score_rollouts', refs=str(refs))
        assert excinfo.value.returncode == EXIT_VALIDATION
        assert 'line 1' in str(excinfo.value)


class TestTrainingData:

    def test_make_sft_data(self, tmp_path, case_study_files):
        profiles, drafts, truth = case_study_files
        out = tmp_path / 'sft.jsonl'
        run('make_sft_data', profiles=profiles, drafts=drafts, truth=truth, out=str(out), provider='mock')
        [record] = [json.loads(line) for line in out.read_text().splitlines()]
        assert [message['role'] for message in record['messages']] == ['system', 'user', 'assistant']

    def test_truth_must_be_hard_valid(self, tmp_path, case_study_files):
        profiles, drafts, _ = case_study_files
        with pytest.raises(CommandError) as excinfo:
            run('make_sft_data', profiles=profiles, drafts=drafts, truth=drafts,
                out=str(tmp_path / 'sft.jsonl'), provider='mock')
        assert excinfo.value.returncode == EXIT_VALIDATION

    def test_export_grpo_prompts(self, tmp_path, case_study_files):
        profiles, _, truth = case_study_files
        out = tmp_path / 'prompts.jsonl'
        run('export_grpo_prompts', profiles=profiles, truth=truth, out=str(out))
        [record] = [json.loads(line) for line in out.read_text().splitlines()]
        assert record['prompt_id'] == 'u1'
        assert len(record['ground_truth_schedule']) == 6


class TestEvaluate:

    def test_population_against_itself(self, tmp_path):
        path, report = tmp_path / 'population.json', tmp_path / 'metrics.json'
        save_population(path, random_population(10, seed=5))
        stdout, _ = run('evaluate', gen=str(path), ref=str(path), out=str(report))
        assert 'Acc↑' in stdout
        assert json.loads(report.read_text())['metrics']['accuracy'] == 1.0

    def test_mismatched_users(self, tmp_path):
        gen, ref = tmp_path / 'gen.json', tmp_path / 'ref.json'
        save_population(gen, random_population(3, seed=1, prefix='g'))
        save_population(ref, random_population(3, seed=1, prefix='r'))
        with pytest.raises(CommandError) as excinfo:
            run('evaluate', gen=str(gen), ref=str(ref))
        assert excinfo.value.returncode == EXIT_VALIDATION


@pytest.mark.parametrize('error, code', [
    (ConfigError('x'), 2),
    (FileNotFoundError('x'), 3),
    (MetricError('x'), 4),
    (EndpointError('x'), 5),
    (RuntimeError('x'), 1),
])
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_celery_task_runs_inline(profile):
    result = generate_session('u1', profile.to_document(), RunConfig(provider='mock').model_dump())
    assert result['user_id'] == 'u1'
    assert is_hard_valid(DaySchedule.from_document(result['schedule']))
