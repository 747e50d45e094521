"""
Mock data for development and testing: the case-study user, fixture
profiles, and seeded random schedules/populations.
"""
import random
from typing import Optional

from .constraint_rules import DEFAULT_DURATION_BOUNDS
from .schedule import (
    DAY_MINUTES,
    SLOT_MINUTES,
    ActivitySegment,
    ActivityType,
    DaySchedule,
    UserProfile,
    parse_time,
)


def _day(*rows) -> DaySchedule:
    return DaySchedule(tuple(
        ActivitySegment(ActivityType.parse(activity), parse_time(start), parse_time(end))
        for activity, start, end in rows
    ))


# ============================================================================
# CASE STUDY (California user, 4.15 mile commute)
# ============================================================================

CASE_STUDY_PROFILE = {
    'age_range': 'unknown',
    'gender': 'Female',
    'race': 'unknown',
    'education': 'unknown',
    'employment_status': 'Employed full-time',
    'work_schedule': 'unknown',
    'occupation': 'Professional, managerial, or technical',
    'primary_activity': 'Working',
    'work_from_home': 'No',
    'driver_on_travel_day': 'Yes',
    'distance_to_work_miles': 4.15,
    'work_state': 'California',
}

CASE_STUDY_DRAFT = _day(
    ('home', '00:00', '07:45'),
    ('work', '07:45', '16:45'),
    ('home', '16:45', '18:00'),
    ('work', '17:45', '19:00'),
    ('shopping', '19:00', '19:35'),
    ('home', '19:35', '24:00'),
)

CASE_STUDY_EDITED = _day(
    ('home', '00:00', '07:45'),
    ('work', '07:45', '16:30'),
    ('shopping', '16:30', '17:20'),
    ('work', '17:20', '19:50'),
    ('home', '19:50', '24:00'),
)

CASE_STUDY_GROUND_TRUTH = _day(
    ('home', '00:00', '07:45'),
    ('work', '07:45', '16:30'),
    ('shopping', '16:30', '17:30'),
    ('service', '17:30', '17:45'),
    ('work', '17:45', '20:30'),
    ('home', '20:30', '24:00'),
)

CASE_STUDY_REASONING = (
    'Full-time professional with a short 4.15 mile commute: a long work block, '
    'an evening errand on the way home, no extra home stay mid-afternoon.'
)


def case_study_profile() -> UserProfile:
    return UserProfile.from_mapping(CASE_STUDY_PROFILE)


# ============================================================================
# FIXTURE PROFILES
# ============================================================================

MOCK_PROFILES = [
    {
        'age_range': '25-34',
        'gender': 'Male',
        'race': 'White',
        'education': "Bachelor's degree",
        'employment_status': 'Employed full-time',
        'work_schedule': 'Regular daytime',
        'occupation': 'Sales or service',
        'primary_activity': 'Working',
        'work_from_home': 'No',
        'driver_on_travel_day': 'Yes',
        'distance_to_work_miles': 12.5,
        'work_state': 'Texas',
    },
    {
        'age_range': '65-74',
        'gender': 'Female',
        'race': 'Asian',
        'education': 'High school graduate',
        'employment_status': 'Not employed',
        'work_schedule': 'unknown',
        'occupation': 'unknown',
        'primary_activity': 'Retired',
        'work_from_home': 'unknown',
        'driver_on_travel_day': 'No',
        'distance_to_work_miles': None,
        'work_state': 'unknown',
    },
    {
        'age_range': '18-24',
        'gender': 'Female',
        'race': 'Black or African American',
        'education': 'Some college',
        'employment_status': 'Employed part-time',
        'work_schedule': 'Evening shift',
        'occupation': 'Sales or service',
        'primary_activity': 'Going to school',
        'work_from_home': 'No',
        'driver_on_travel_day': 'No',
        'distance_to_work_miles': 3.2,
        'work_state': 'California',
    },
    {
        'age_range': '35-44',
        'gender': 'Male',
        'race': 'White',
        'education': 'Graduate degree',
        'employment_status': 'Employed full-time',
        'work_schedule': 'Flexible',
        'occupation': 'Professional, managerial, or technical',
        'primary_activity': 'Working',
        'work_from_home': 'Yes',
        'driver_on_travel_day': 'Yes',
        'distance_to_work_miles': 0.0,
        'work_state': 'Florida',
    },
]

PROFILE_VALUES = {
    'age_range': ['18-24', '25-34', '35-44', '45-54', '55-64', '65-74', '75+'],
    'gender': ['Male', 'Female'],
    'race': ['White', 'Black or African American', 'Asian', 'Multiple races', 'unknown'],
    'education': ['High school graduate', 'Some college', "Bachelor's degree", 'Graduate degree'],
    'employment_status': ['Employed full-time', 'Employed part-time', 'Not employed', 'Retired'],
    'work_schedule': ['Regular daytime', 'Evening shift', 'Flexible', 'unknown'],
    'occupation': ['Sales or service', 'Clerical or administrative support',
                   'Manufacturing, construction, maintenance, or farming',
                   'Professional, managerial, or technical', 'unknown'],
    'primary_activity': ['Working', 'Going to school', 'Keeping house', 'Retired', 'Looking for work'],
    'work_from_home': ['Yes', 'No', 'unknown'],
    'driver_on_travel_day': ['Yes', 'No'],
    'work_state': ['California', 'Texas', 'Florida', 'New York', 'Georgia', 'unknown'],
}


def fixture_profiles(count: int = 50, seed: int = 0) -> list:
    """`count` profiles: the hand-written ones first, then seeded samples."""
    rng = random.Random(seed)
    documents = [CASE_STUDY_PROFILE] + MOCK_PROFILES
    while len(documents) < count:
        document = {name: rng.choice(values) for name, values in PROFILE_VALUES.items()}
        document['distance_to_work_miles'] = round(rng.uniform(0.5, 40.0), 2) if rng.random() < 0.8 else None
        documents.append(document)
    return [UserProfile.from_mapping(document) for document in documents[:count]]


# ============================================================================
# RANDOM SCHEDULES
# ============================================================================

OUT_OF_HOME_ACTIVITIES = [activity for activity in ActivityType if activity is not ActivityType.HOME]

# Errand lengths in slots, kept inside every activity's duration bounds.
ERRAND_SLOTS = (2, 3, 4, 6, 8)


def _slot_aligned(rng: random.Random, low_minutes: int, high_minutes: int) -> int:
    return rng.randrange(low_minutes // SLOT_MINUTES, high_minutes // SLOT_MINUTES + 1) * SLOT_MINUTES


def random_schedule(rng: random.Random, with_work: Optional[bool] = None) -> DaySchedule:
    """A plausible hard-valid day on the 15-minute grid."""
    if with_work is None:
        with_work = rng.random() < 0.6
    cursor = _slot_aligned(rng, 6 * 60, 9 * 60)
    segments = [ActivitySegment(ActivityType.HOME, 0, cursor)]
    previous = ActivityType.HOME

    plan = []
    if with_work:
        plan.append((ActivityType.WORK, _slot_aligned(rng, 4 * 60, 9 * 60)))
    for _ in range(rng.randint(0, 3)):
        plan.append((rng.choice(OUT_OF_HOME_ACTIVITIES), rng.choice(ERRAND_SLOTS) * SLOT_MINUTES))
    rng.shuffle(plan)

    for activity, minutes in plan:
        if activity is previous:
            continue
        low, high = DEFAULT_DURATION_BOUNDS[activity.value]
        minutes = min(max(minutes, low), high)
        if cursor + minutes > DAY_MINUTES - 2 * 60:
            break
        segments.append(ActivitySegment(activity, cursor, cursor + minutes))
        cursor += minutes
        previous = activity

    segments.append(ActivitySegment(ActivityType.HOME, cursor, DAY_MINUTES))
    return DaySchedule(tuple(segments))


def random_population(count: int, seed: int = 0, prefix: str = 'u') -> dict:
    """{user_id: DaySchedule} for `count` seeded random days."""
    rng = random.Random(seed)
    return {f'{prefix}{i:04d}': random_schedule(rng) for i in range(count)}


def random_malformed_schedule(rng: random.Random, max_segments: int = 15) -> DaySchedule:
    """Arbitrary segments: overlaps, gaps and boundary errors all likely."""
    segments = []
    for _ in range(rng.randint(1, max_segments)):
        start = rng.randrange(0, DAY_MINUTES)
        end = rng.randint(start + 1, min(DAY_MINUTES, start + 8 * 60))
        segments.append(ActivitySegment(rng.choice(list(ActivityType)), start, end))
    return DaySchedule(tuple(segments))
