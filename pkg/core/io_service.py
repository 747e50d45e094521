"""
File I/O: profile tables, population documents and JSON-lines streams.

Population document: one JSON array per run,
    [{"user_id": "...", "schedule": [{"activity", "start_time", "end_time"}, ...]}, ...]
"""
import json
import logging
import sys
from pathlib import Path
from typing import Iterator, Mapping, Optional

import pandas as pd
from pydantic import ValidationError

from .constraint_service import check_logical, check_physical
from .exceptions import ActivityEditorError, DocumentError, PopulationError, ProfileError
from .schedule import PROFILE_FIELDS, DaySchedule, UserProfile, normalize
from .schemas import PopulationEntry, to_schedule, validation_message

logger = logging.getLogger(__name__)

USER_ID_COLUMNS = ('user_id', 'person_id', 'id')

# NHTS person-file column names -> profile fields. Extend per dataset with --aliases.
DEFAULT_PROFILE_ALIASES = {
    'R_AGE': 'age_range',
    'R_SEX': 'gender',
    'R_RACE': 'race',
    'EDUC': 'education',
    'WORKER': 'employment_status',
    'WKFTPT': 'work_schedule',
    'OCCAT': 'occupation',
    'PRMACT': 'primary_activity',
    'WRK_HOME': 'work_from_home',
    'DRIVER': 'driver_on_travel_day',
    'DISTTOWK17': 'distance_to_work_miles',
    'WKSTFIPS': 'work_state',
}


def _column_key(name) -> str:
    return str(name).strip().lower().replace(' ', '_').replace('-', '_')


def load_aliases(path: Optional[str] = None) -> dict:
    aliases = dict(DEFAULT_PROFILE_ALIASES)
    if path:
        document = read_json(path)
        if not isinstance(document, dict):
            raise DocumentError(f'{path}: alias table must be an object of column -> field')
        aliases.update(document)
    unknown = sorted(set(aliases.values()) - set(PROFILE_FIELDS))
    if unknown:
        raise DocumentError(f'Alias table maps to unknown profile fields: {unknown}')
    return aliases


def read_json(path):
    try:
        text = Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise DocumentError(f'{path}: not UTF-8 text') from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f'{path}: invalid JSON ({e})') from e


def write_json(path, document):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(document, indent=2) + '\n', encoding='utf-8')


# ============================================================================
# PROFILES
# ============================================================================

def _profile_rows(path: Path) -> list:
    if path.suffix.lower() in ('.json', '.jsonl'):
        text = path.read_text(encoding='utf-8')
        if not text.strip():
            return []
        if path.suffix.lower() == '.jsonl':
            return [json.loads(line) for line in text.splitlines() if line.strip()]
        document = json.loads(text)
        if isinstance(document, dict):
            document = [document]
        return document

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return []
    return frame.to_dict(orient='records')


def load_profile_table(path, aliases: Optional[Mapping] = None) -> list:
    """[(user_id, UserProfile)] in file order; ids default to the row number."""
    path = Path(path)
    aliases = {_column_key(key): value for key, value in (aliases or DEFAULT_PROFILE_ALIASES).items()}
    try:
        rows = _profile_rows(path)
    except (json.JSONDecodeError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DocumentError(f'{path}: cannot parse profile table ({e})') from e

    table = []
    for number, row in enumerate(rows):
        if not isinstance(row, Mapping):
            raise ProfileError(f'{path}: row {number} is not an object')
        keyed = {_column_key(key): value for key, value in row.items()}
        recognized = {aliases.get(key, key) for key in keyed} & set(PROFILE_FIELDS)
        if not recognized:
            raise ProfileError(f'{path}: row {number} has no recognized profile columns')
        user_id = next((str(keyed[key]) for key in USER_ID_COLUMNS if str(keyed.get(key, '')).strip()), str(number))
        try:
            profile = UserProfile.from_mapping(keyed, aliases)
        except ProfileError as e:
            raise ProfileError(f'{path}: row {number}: {e}') from None
        table.append((user_id, profile))
    logger.info(f'Loaded {len(table)} profiles from {path}')
    return table


def load_profiles(path, aliases: Optional[Mapping] = None) -> list:
    return [profile for _, profile in load_profile_table(path, aliases)]


# ============================================================================
# POPULATIONS
# ============================================================================

def _hard_problems(schedule: DaySchedule) -> list:
    normalized = normalize(schedule)
    return [violation.description for violation in check_physical(normalized) + check_logical(normalized)]


def _is_bare_schedule(document) -> bool:
    return bool(document) and isinstance(document[0], Mapping) and 'activity' in document[0]


def _population_from_document(document, path, validate: bool) -> dict:
    population = {}
    for number, item in enumerate(document):
        user_id = str(item.get('user_id')) if isinstance(item, Mapping) and 'user_id' in item else None
        try:
            entry = PopulationEntry.model_validate(item)
            schedule = to_schedule(entry.schedule)
        except ValidationError as e:
            raise PopulationError(f'entry {number}: {validation_message(e)}', user_id=user_id) from None
        except ActivityEditorError as e:
            raise PopulationError(str(e), user_id=user_id) from None

        user_id = str(entry.user_id)
        if user_id in population:
            raise PopulationError('duplicate user_id', user_id=user_id)
        if validate:
            if not len(schedule):
                raise PopulationError('empty schedule', user_id=user_id)
            problems = _hard_problems(schedule)
            if problems:
                raise PopulationError(f'schedule is not hard-valid: {problems[0]}', user_id=user_id)
        population[user_id] = schedule
    logger.info(f'Loaded {len(population)} schedules from {path}')
    return population


def load_schedules(path, validate: bool = False) -> tuple:
    """(population, bare): a bare schedule array becomes a one-user population keyed by the file stem."""
    document = read_json(path)
    if not isinstance(document, list):
        raise DocumentError(f'{path}: expected a population or a schedule array')
    if _is_bare_schedule(document):
        document = [{'user_id': Path(path).stem, 'schedule': document}]
        return _population_from_document(document, path, validate), True
    return _population_from_document(document, path, validate), False


def load_population(path, validate: bool = True) -> dict:
    """{user_id: DaySchedule} in file order.

    With `validate`, every schedule must be hard-valid; the first failure
    raises PopulationError naming the user.
    """
    document = read_json(path)
    if not isinstance(document, list):
        raise DocumentError(f'{path}: population must be an array of {{user_id, schedule}} entries')
    return _population_from_document(document, path, validate)


def population_document(population: Mapping) -> list:
    return [
        {'user_id': str(user_id), 'schedule': schedule.to_document()}
        for user_id, schedule in population.items()
    ]


def save_population(path, population: Mapping):
    write_json(path, population_document(population))


# ============================================================================
# JSON LINES
# ============================================================================

def read_jsonl(path) -> Iterator:
    """(line_number, object) pairs; '-' reads stdin."""
    handle = sys.stdin if str(path) == '-' else open(path, encoding='utf-8')
    try:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield number, json.loads(line)
            except json.JSONDecodeError as e:
                raise DocumentError(f'{path}:{number}: invalid JSON ({e})') from e
    finally:
        if handle is not sys.stdin:
            handle.close()


def write_jsonl(path, records):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        for record in records:
            handle.write(json.dumps(record) + '\n')
