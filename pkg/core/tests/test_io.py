import json

import pytest

from core.exceptions import DocumentError, PopulationError, ProfileError
from core.io_service import (
    load_aliases,
    load_population,
    load_profile_table,
    load_profiles,
    load_schedules,
    population_document,
    read_jsonl,
    save_population,
    write_jsonl,
)
from core.schedule import UNKNOWN

NHTS_HEADER = 'HOUSEID,R_AGE,R_SEX,R_RACE,EDUC,WORKER,WKFTPT,OCCAT,PRMACT,WRK_HOME,DRIVER,DISTTOWK17,WKSTFIPS'
NHTS_ROW = ('30000007,35-44,Female,White,Bachelor,Employed full-time,Full-time,'
            '"Professional, managerial, or technical",Working,No,Yes,4.15,California')


@pytest.fixture
def profile_csv(tmp_path):
    path = tmp_path / 'profiles.csv'
    path.write_text(f'{NHTS_HEADER}\n{NHTS_ROW}\n', encoding='utf-8')
    return path


class TestProfiles:

    def test_nhts_columns(self, profile_csv):
        [(user_id, profile)] = load_profile_table(profile_csv)
        assert user_id == '0'
        assert profile.gender == 'Female'
        assert profile.occupation == 'Professional, managerial, or technical'
        assert profile.distance_to_work_miles == 4.15
        assert profile.work_state == 'California'

    def test_user_id_column(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        path.write_text('user_id,R_SEX\nabc,Male\n', encoding='utf-8')
        assert load_profile_table(path)[0][0] == 'abc'

    def test_missing_column_is_unknown(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        header, row = NHTS_HEADER.rsplit(',', 1)[0], NHTS_ROW.rsplit(',', 1)[0]
        path.write_text(f'{header}\n{row}\n', encoding='utf-8')
        [profile] = load_profiles(path)
        assert profile.work_state == UNKNOWN
        assert profile.to_document()['work_state'] == UNKNOWN

    def test_blank_distance_renders_unknown(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        path.write_text('R_SEX,DISTTOWK17\nMale,\n', encoding='utf-8')
        [profile] = load_profiles(path)
        assert profile.distance_to_work_miles is None
        assert profile.display_value('distance_to_work_miles') == UNKNOWN

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        path.write_text('', encoding='utf-8')
        assert load_profiles(path) == []

    def test_unrecognized_row(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        path.write_text('colour,flavour\nred,sweet\n', encoding='utf-8')
        with pytest.raises(ProfileError):
            load_profiles(path)

    def test_bad_distance(self, tmp_path):
        path = tmp_path / 'profiles.csv'
        path.write_text('R_SEX,DISTTOWK17\nMale,far\n', encoding='utf-8')
        with pytest.raises(ProfileError) as excinfo:
            load_profiles(path)
        assert 'row 0' in str(excinfo.value)

    def test_json_profiles(self, tmp_path, profile):
        path = tmp_path / 'profiles.json'
        path.write_text(json.dumps([dict(profile.to_document(), user_id='p1')]), encoding='utf-8')
        assert load_profile_table(path) == [('p1', profile)]

    def test_custom_aliases(self, tmp_path):
        aliases_path = tmp_path / 'aliases.json'
        aliases_path.write_text(json.dumps({'SEX_CODE': 'gender'}), encoding='utf-8')
        path = tmp_path / 'profiles.csv'
        path.write_text('SEX_CODE\nFemale\n', encoding='utf-8')
        [profile] = load_profiles(path, load_aliases(str(aliases_path)))
        assert profile.gender == 'Female'

    def test_alias_to_unknown_field(self, tmp_path):
        aliases_path = tmp_path / 'aliases.json'
        aliases_path.write_text(json.dumps({'X': 'income'}), encoding='utf-8')
        with pytest.raises(DocumentError):
            load_aliases(str(aliases_path))


class TestPopulations:

    def test_round_trip(self, tmp_path, ground_truth):
        path = tmp_path / 'population.json'
        save_population(path, {'a': ground_truth, 'b': ground_truth})
        assert load_population(path) == {'a': ground_truth, 'b': ground_truth}

    def test_case_study_ground_truth(self, tmp_path, ground_truth):
        path = tmp_path / 'truth.json'
        save_population(path, {'u1': ground_truth})
        assert len(load_population(path)['u1']) == 6

    def test_bytes_are_stable(self, tmp_path, ground_truth):
        first, second = tmp_path / 'one.json', tmp_path / 'two.json'
        save_population(first, {'a': ground_truth})
        save_population(second, load_population(first))
        assert first.read_bytes() == second.read_bytes()

    def test_document_keeps_file_order(self, ground_truth, edited):
        document = population_document({'z': ground_truth, 'a': edited})
        assert [entry['user_id'] for entry in document] == ['z', 'a']
        assert len(document[0]['schedule']) == 6

    def test_invalid_schedule_names_user(self, tmp_path, ground_truth, draft):
        path = tmp_path / 'population.json'
        save_population(path, {'ok': ground_truth, 'bad': draft})
        with pytest.raises(PopulationError) as excinfo:
            load_population(path)
        assert excinfo.value.user_id == 'bad'
        assert 'overlap' in str(excinfo.value)

    def test_validation_can_be_skipped(self, tmp_path, draft):
        path = tmp_path / 'population.json'
        save_population(path, {'bad': draft})
        assert load_population(path, validate=False) == {'bad': draft}

    def test_duplicate_user(self, tmp_path, ground_truth):
        path = tmp_path / 'population.json'
        entry = {'user_id': 'a', 'schedule': ground_truth.to_document()}
        path.write_text(json.dumps([entry, entry]), encoding='utf-8')
        with pytest.raises(PopulationError) as excinfo:
            load_population(path)
        assert 'duplicate' in str(excinfo.value)

    def test_unknown_activity(self, tmp_path):
        path = tmp_path / 'population.json'
        entry = {'user_id': 7, 'schedule': [{'activity': 'nap', 'start_time': '00:00', 'end_time': '24:00'}]}
        path.write_text(json.dumps([entry]), encoding='utf-8')
        with pytest.raises(PopulationError) as excinfo:
            load_population(path)
        assert excinfo.value.user_id == '7'

    def test_not_an_array(self, tmp_path):
        path = tmp_path / 'population.json'
        path.write_text('{"user_id": "a"}', encoding='utf-8')
        with pytest.raises(DocumentError):
            load_population(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'population.json'
        path.write_text('[{', encoding='utf-8')
        with pytest.raises(DocumentError):
            load_population(path)

    def test_bare_schedule_file(self, tmp_path, draft):
        path = tmp_path / 'draft.json'
        path.write_text(json.dumps(draft.to_document()), encoding='utf-8')
        population, bare = load_schedules(path)
        assert bare
        assert population == {'draft': draft}

    def test_population_file_is_not_bare(self, tmp_path, ground_truth):
        path = tmp_path / 'population.json'
        save_population(path, {'a': ground_truth})
        assert load_schedules(path) == ({'a': ground_truth}, False)


class TestJsonLines:

    def test_round_trip_skips_blank_lines(self, tmp_path):
        path = tmp_path / 'records.jsonl'
        write_jsonl(path, [{'a': 1}, {'b': 2}])
        path.write_text(path.read_text() + '\n\n', encoding='utf-8')
        assert list(read_jsonl(path)) == [(1, {'a': 1}), (2, {'b': 2})]

    def test_bad_line_names_position(self, tmp_path):
        path = tmp_path / 'records.jsonl'
        path.write_text('{"a": 1}\nnot json\n', encoding='utf-8')
        with pytest.raises(DocumentError) as excinfo:
            list(read_jsonl(path))
        assert ':2:' in str(excinfo.value)
