"""
Prompt templates for the intention agent, the editor agent, the data
generation teacher, the SFT student and GRPO roll-outs.

Each render_* function returns (system_text, user_text). Rendering is
deterministic: documents are serialized with json.dumps(indent=2).
"""
import json

from .constraint_service import ConstraintCategory, is_hard_valid
from .exceptions import ScheduleError
from .schedule import DaySchedule, UserProfile, format_time


# ============================================================================
# INTENTION-DRIVEN AGENT
# ============================================================================

INTENTION_SYSTEM_PROMPT = """You are a daily schedule planner. Given a person's profile, generate a complete and realistic 24-hour schedule with exact start/end times.

RULES:
- Use ONLY these activity types: home, work, education, shopping, service, medical, dine_out, socialize, exercise, dropoff_pickup
- Schedule MUST cover full 24 hours: start at 00:00, end at 24:00, NO gaps or overlaps
- Must start and end with "home"
- Consecutive activities must connect (end_time of one = start_time of the next)
- Durations must be realistic based on the person's profile

OUTPUT FORMAT:
{
  "reasoning": "Brief explanation of the schedule choices",
  "schedule": [
    {"activity": "home", "start_time": "00:00", "end_time": "07:30"},
    {"activity": "work", "start_time": "07:30", "end_time": "17:00"},
    {"activity": "home", "start_time": "17:00", "end_time": "24:00"}
  ]
}"""

INTENTION_USER_PROMPT = """Generate a complete 24-hour schedule for this person:

- Age range: {age_range}
- Gender: {gender}
- Race: {race}
- Education: {education}
- Employment status: {employment_status}
- Work schedule: {work_schedule}
- Occupation: {occupation}
- Primary activity: {primary_activity}
- Work from home: {work_from_home}
- Driver on travel day: {driver_on_travel_day}
- Distance to work (miles): {distance_to_work_miles}
- Work state: {work_state}"""


# ============================================================================
# EDITOR AGENT
# ============================================================================

EDITOR_SYSTEM_PROMPT = """You are an Editor Agent for daily schedule refinement.

Your task:
1. Check the INITIAL SCHEDULE against 5 constraint types:
   Physical, Logical, Common Sense, Temporal, and Coherence
2. Identify any violations in the draft
3. Apply edit operations from the action space:
   ADD / DELETE / SHIFT / REPLACE / SPLIT
4. Output the final constraint-satisfying schedule

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical Constraints (Hard): overlaps, 24h coverage, ends at 24:00
2. Logical Constraints (Hard): starts/ends at home, starts at 00:00, consecutive identical activities must be merged
3. Common Sense Constraints (Soft): activities match socio-demographic profile
4. Temporal Constraints (Soft): realistic durations for each activity type
5. Coherence Constraints (Soft): logical transitions, not over-fragmented

Edit Operations Applied:
- ADD: activity 'Y' at time HH:MM (reason)
- DELETE: activity 'X' at index N (reason)
- SHIFT: activity 'Z' start/end time adjustment (reason)
- REPLACE: activity 'A' -> 'B' (reason)
- SPLIT: activity 'X' divided into two segments (reason)

Final Result: All constraints satisfied / Violations remain
[/THOUGHT]

[JSON]
[final schedule as JSON array]
[/JSON]"""

EDITOR_USER_PROMPT = """PERSON PROFILE:
{user_profile}

INITIAL SCHEDULE:
{initial_schedule}"""

VIOLATION_FEEDBACK_HEADER = 'VIOLATIONS DETECTED:'


# ============================================================================
# DATA GENERATION TEACHER
# ============================================================================

TEACHER_SYSTEM_PROMPT = """You are a schedule planning expert. You understand human behavior patterns and generate realistic daily schedules."""

TEACHER_USER_PROMPT = """You are a Critic and Editor Agent. Your job is to validate and refine a daily schedule.

PERSON PROFILE:
{user_profile}

INITIAL SCHEDULE (from unified 2-stage generator):
{initial_schedule}

GROUND TRUTH REFERENCE (for comparison):
{ground_truth_schedule}

YOUR TASK:
Act as the Editor. Check constraints on the INITIAL SCHEDULE, identify violations, and apply edits to match the GROUND TRUTH.

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical (Hard): overlaps? 24h coverage? ends at 24:00? -> Yes / No
2. Logical (Hard): starts/ends home? starts at 00:00? -> Yes / No
3. Common Sense (Soft): activities match profile? -> Yes / No
4. Temporal (Soft): realistic durations? -> Yes / No
5. Coherence (Soft): logical flow? not fragmented? -> Yes / No

Edits to Match Ground Truth:
If already matches: No edits needed
Otherwise list each operation:
- DELETE: 'X' at idx N (reason)
- ADD: 'Y' at time HH:MM (reason)
- SHIFT: 'Z' time adjustment (reason)
- REPLACE: 'A' -> 'B' (reason)

Final Result:
All constraints satisfied after edits? Yes / No
[/THOUGHT]

[JSON]
[final schedule - must match the GROUND TRUTH]
[/JSON]

Be thorough in checking each constraint on the INITIAL SCHEDULE.
Show edit operations explicitly if violations are found."""

# Checklist lines of a teacher trace, in the order the teacher prompt lists them.
TEACHER_CHECKLIST = (
    (ConstraintCategory.PHYSICAL, 'Physical (Hard): overlaps? 24h coverage? ends at 24:00?'),
    (ConstraintCategory.LOGICAL, 'Logical (Hard): starts/ends home? starts at 00:00?'),
    (ConstraintCategory.COMMONSENSE, 'Common Sense (Soft): activities match profile?'),
    (ConstraintCategory.TEMPORAL, 'Temporal (Soft): realistic durations?'),
    (ConstraintCategory.COHERENCE, 'Coherence (Soft): logical flow? not fragmented?'),
)

NO_EDITS_NEEDED = 'No edits needed'


# ============================================================================
# SFT STUDENT
# ============================================================================

STUDENT_SYSTEM_PROMPT = """You are a Critic and Editor Agent for daily schedule refinement.

Your task:
1. Check the INITIAL SCHEDULE against 5 constraint types:
   Physical, Logical, Common Sense, Temporal, and Coherence
2. Identify any violations
3. Apply edit operations:
   ADD / DELETE / SHIFT / REPLACE
4. Output the refined schedule

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical Constraints (Hard): overlaps, 24h coverage, ends at 24:00
2. Logical Constraints (Hard): starts/ends at home, starts at 00:00
3. Common Sense Constraints (Soft): age/employment appropriate activities
4. Temporal Constraints (Soft): realistic durations
5. Coherence Constraints (Soft): logical transitions, not over-fragmented

Applying Edit Operations:
- DELETE: activity 'X' at index N (reason)
- ADD: activity 'Y' at time HH:MM (reason)
- SHIFT: activity time adjustment (reason)
- REPLACE: activity type change (reason)

Final Result: Yes / No
[/THOUGHT]

[JSON]
[refined schedule as JSON array]
[/JSON]"""

STUDENT_USER_PROMPT = EDITOR_USER_PROMPT


# ============================================================================
# GRPO ROLL-OUTS
# ============================================================================

GRPO_SYSTEM_PROMPT = """You are a daily activity schedule generator. Your task is to generate a realistic daily schedule for a person based on their profile.

OUTPUT FORMAT:
[THOUGHT]
Brief reasoning about the person's schedule patterns.
[/THOUGHT]

[JSON]
[
  {"activity": "home", "start_time": "00:00", "end_time": "07:00"}
]
[/JSON]

The schedule must start at 00:00 and end at 24:00, covering the full day without gaps or overlaps."""

GRPO_USER_PROMPT = """Generate a daily schedule for this person:
{user_profile}"""


# ============================================================================
# RENDERING
# ============================================================================

def _fill(template: str, **values) -> str:
    # str.format would trip over the literal JSON braces in the templates.
    for name, value in values.items():
        template = template.replace('{' + name + '}', value)
    return template


def dump_document(document) -> str:
    return json.dumps(document, indent=2)


def profile_document(profile: UserProfile) -> str:
    return dump_document(profile.to_document())


def schedule_document(schedule: DaySchedule) -> str:
    if not len(schedule):
        raise ScheduleError('Cannot render an empty schedule')
    return dump_document(schedule.to_document())


def render_intention_prompt(profile: UserProfile) -> tuple:
    values = {name: profile.display_value(name) for name in profile.to_document()}
    return INTENTION_SYSTEM_PROMPT, _fill(INTENTION_USER_PROMPT, **values)


def render_editor_prompt(profile: UserProfile, draft: DaySchedule) -> tuple:
    user_text = _fill(
        EDITOR_USER_PROMPT,
        user_profile=profile_document(profile),
        initial_schedule=schedule_document(draft),
    )
    return EDITOR_SYSTEM_PROMPT, user_text


def render_teacher_prompt(profile: UserProfile, draft: DaySchedule, ground_truth: DaySchedule) -> tuple:
    if not is_hard_valid(ground_truth):
        raise ScheduleError('Ground truth schedule is not hard-valid')
    user_text = _fill(
        TEACHER_USER_PROMPT,
        user_profile=profile_document(profile),
        initial_schedule=schedule_document(draft),
        ground_truth_schedule=schedule_document(ground_truth),
    )
    return TEACHER_SYSTEM_PROMPT, user_text


def render_student_prompt(profile: UserProfile, draft: DaySchedule) -> tuple:
    user_text = _fill(
        STUDENT_USER_PROMPT,
        user_profile=profile_document(profile),
        initial_schedule=schedule_document(draft),
    )
    return STUDENT_SYSTEM_PROMPT, user_text


def render_grpo_prompt(profile: UserProfile) -> tuple:
    return GRPO_SYSTEM_PROMPT, _fill(GRPO_USER_PROMPT, user_profile=profile_document(profile))


def render_violation_feedback(user_text: str, violations) -> str:
    """Editor user message for a follow-up round: the original text plus the audit."""
    report = dump_document([violation.to_document() for violation in violations])
    return f'{user_text}\n\n{VIOLATION_FEEDBACK_HEADER}\n{report}'


def render_tagged_output(thought: str, schedule: DaySchedule) -> str:
    return f'[THOUGHT]\n{thought}\n[/THOUGHT]\n\n[JSON]\n{schedule_document(schedule)}\n[/JSON]'


def format_teacher_edit(op) -> str:
    """One edit line in the teacher trace format."""
    if op.op == 'DELETE':
        line = f"DELETE: '{op.activity}' at idx {op.index}"
    elif op.op == 'ADD':
        line = f"ADD: '{op.segment.activity.value}' at time {format_time(op.segment.start)}"
    elif op.op == 'SHIFT':
        line = f"SHIFT: '{op.activity}' time adjustment to {format_time(op.new_start)}-{format_time(op.new_end)}"
    elif op.op == 'REPLACE':
        line = f"REPLACE: '{op.activity}' -> '{op.new_activity.value}'"
    else:
        line = op.describe()
    return f'- {line} ({op.rationale})' if op.rationale else f'- {line}'


def render_teacher_thought(violations, script, satisfied: bool) -> str:
    """A teacher-format [THOUGHT] body built from an audit and an edit script."""
    failing = {violation.category for violation in violations if violation.severity != 'info'}
    lines = ['Constraint Checking:']
    for number, (category, question) in enumerate(TEACHER_CHECKLIST, start=1):
        lines.append(f'{number}. {question} -> {"No" if category in failing else "Yes"}')

    lines += ['', 'Edits to Match Ground Truth:']
    if len(script):
        lines += [format_teacher_edit(op) for op in script]
    else:
        lines.append(NO_EDITS_NEEDED)

    lines += ['', 'Final Result:', f'All constraints satisfied after edits? {"Yes" if satisfied else "No"}']
    return '\n'.join(lines)
