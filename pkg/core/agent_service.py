"""
Generate-then-edit orchestration.

Flow for one user:
1. Intention agent drafts a schedule from the profile
2. Editor agent audits and edits the draft ([THOUGHT] / [JSON] reply)
3. While hard violations remain, the editor is re-prompted with the audit
4. After max_rounds, deterministic repair takes over

Also builds SFT records from teacher traces and GRPO roll-out prompts.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from pydantic import ValidationError

from .constraint_rules import CoherenceLimits, DurationBounds
from .constraint_service import audit, hard_violations, is_hard_valid, violation_report
from .editor_service import DEFAULT_GAP_EXTEND_MINUTES, diff, repair
from .exceptions import EndpointError, ScheduleError
from .llm_service import ChatEndpoint, chat_complete, get_chat_client
from .prompts import (
    render_editor_prompt,
    render_grpo_prompt,
    render_intention_prompt,
    render_student_prompt,
    render_tagged_output,
    render_teacher_prompt,
    render_teacher_thought,
    render_violation_feedback,
)
from .schedule import DAY_MINUTES, ActivitySegment, ActivityType, DaySchedule, UserProfile, discretize, normalize
from .schemas import IntentionDocument, parse_segments, to_schedule, validation_message

logger = logging.getLogger(__name__)

_THOUGHT_BLOCK = re.compile(r'\[THOUGHT\](.*?)\[/THOUGHT\]', re.DOTALL)
_JSON_BLOCK = re.compile(r'\[JSON\](.*?)\[/JSON\]', re.DOTALL)
_CODE_FENCE = re.compile(r'^```[a-zA-Z]*\s*|\s*```$')


@dataclass(frozen=True)
class Draft:
    reasoning: str
    schedule: DaySchedule


@dataclass(frozen=True)
class TaggedOutput:
    thought: Optional[str]
    schedule: Optional[DaySchedule]
    raw: str
    json_block: Optional[str] = None
    json_error: Optional[str] = None


@dataclass(frozen=True)
class RoundRecord:
    round: int
    stage: str
    raw_output: str
    violations: list = field(default_factory=list)
    fallback_used: bool = False

    def to_document(self) -> dict:
        return {
            'round': self.round,
            'stage': self.stage,
            'raw_output': self.raw_output,
            'violations': self.violations,
            'fallback_used': self.fallback_used,
        }


@dataclass
class Provenance:
    """Per-session log: every round's raw output and audit, plus fallback flags."""

    records: list = field(default_factory=list)
    draft: Optional[Draft] = None
    editor_rounds: int = 0
    intention_fallback: bool = False
    repair_fallback: bool = False

    @property
    def fallback_used(self) -> bool:
        return self.intention_fallback or self.repair_fallback

    def add(self, record: RoundRecord):
        self.records.append(record)

    def to_documents(self) -> list:
        return [record.to_document() for record in self.records]


@dataclass(frozen=True)
class SftRecord:
    messages: tuple
    rebuilt: bool = False

    def to_document(self) -> dict:
        return {'messages': list(self.messages)}


# ============================================================================
# PARSING
# ============================================================================

def _strip_fences(text: str) -> str:
    return _CODE_FENCE.sub('', text.strip())


def _schedule_from_json(text: str) -> DaySchedule:
    document = json.loads(_strip_fences(text))
    if isinstance(document, dict) and 'schedule' in document:
        document = document['schedule']
    schedule = parse_segments(document)
    if not len(schedule):
        raise ScheduleError('Schedule array is empty')
    return schedule


def parse_tagged_output(raw: Optional[str]) -> TaggedOutput:
    """First [THOUGHT] and [JSON] blocks of a reply; never raises."""
    raw = raw if isinstance(raw, str) else ''
    thought_match = _THOUGHT_BLOCK.search(raw)
    json_match = _JSON_BLOCK.search(raw)

    thought = thought_match.group(1).strip() if thought_match else None
    json_block = json_match.group(1).strip() if json_match else None
    schedule, json_error = None, None
    if json_block is not None:
        try:
            schedule = _schedule_from_json(json_block)
        except (ValueError, TypeError, RecursionError) as e:
            json_error = str(e)
    return TaggedOutput(thought=thought, schedule=schedule, raw=raw, json_block=json_block, json_error=json_error)


def _json_candidates(text: str):
    text = _strip_fences(text)
    yield text
    for opener, closer in (('{', '}'), ('[', ']')):
        start, end = text.find(opener), text.rfind(closer)
        if 0 <= start < end:
            yield text[start:end + 1]


def parse_intention_output(raw: Optional[str]) -> Draft:
    """A Draft from {"reasoning", "schedule"} or a bare schedule array."""
    if not isinstance(raw, str) or not raw.strip():
        raise ScheduleError('Intention output is empty')
    for candidate in _json_candidates(raw):
        try:
            document = json.loads(candidate)
        except (json.JSONDecodeError, RecursionError):
            continue
        try:
            if isinstance(document, list):
                if not document:
                    raise ScheduleError('Intention schedule is empty')
                return Draft('', parse_segments(document))
            parsed = IntentionDocument.model_validate(document)
            return Draft(parsed.reasoning, to_schedule(parsed.schedule))
        except ValidationError as e:
            raise ScheduleError(f'Intention output rejected: {validation_message(e)}') from None
    raise ScheduleError('Intention output holds no JSON document')


def default_draft() -> Draft:
    return Draft('', DaySchedule((ActivitySegment(ActivityType.HOME, 0, DAY_MINUTES),)))


# ============================================================================
# GENERATE-THEN-EDIT
# ============================================================================

def draft_schedule(profile: UserProfile, endpoint: ChatEndpoint, client, provenance: Provenance) -> Draft:
    system_text, user_text = render_intention_prompt(profile)
    for attempt in range(1, endpoint.max_retries + 1):
        raw = chat_complete(endpoint, system_text, user_text, client=client)
        try:
            draft = parse_intention_output(raw)
        except ScheduleError as e:
            logger.warning(f'Intention output unparseable (attempt {attempt}): {e}')
            provenance.add(RoundRecord(0, 'intention', raw, [{'description': str(e)}]))
            continue
        provenance.add(RoundRecord(0, 'intention', raw))
        return draft

    logger.warning('Intention agent gave no usable draft; falling back to an all-home day')
    provenance.intention_fallback = True
    provenance.add(RoundRecord(0, 'intention-fallback', '', [], fallback_used=True))
    return default_draft()


def generate_trajectory(profile: UserProfile, endpoint: ChatEndpoint, bounds: Optional[DurationBounds] = None,
                        max_rounds: Optional[int] = None, rules: Optional[tuple] = None, client=None,
                        gap_extend_minutes: int = DEFAULT_GAP_EXTEND_MINUTES,
                        coherence: Optional[CoherenceLimits] = None) -> tuple:
    """Run one session; returns (hard-valid schedule, Provenance)."""
    max_rounds = endpoint.max_rounds if max_rounds is None else max_rounds
    if max_rounds < 1:
        raise ScheduleError('max_rounds must be at least 1')
    client = client or get_chat_client(endpoint)
    provenance = Provenance()

    draft = draft_schedule(profile, endpoint, client, provenance)
    provenance.draft = draft
    current = draft.schedule
    violations = []

    for round_number in range(1, max_rounds + 1):
        system_text, user_text = render_editor_prompt(profile, current)
        if violations:
            user_text = render_violation_feedback(user_text, violations)
        raw = chat_complete(endpoint, system_text, user_text, client=client)
        provenance.editor_rounds = round_number

        tagged = parse_tagged_output(raw)
        candidate = tagged.schedule if tagged.schedule is not None else current
        violations = audit(profile, candidate, bounds, rules, coherence)
        hard = hard_violations(violations)
        logger.info(f'Editor round {round_number}: {len(hard)} hard / {len(violations) - len(hard)} soft violations')
        provenance.add(RoundRecord(round_number, 'editor', raw, violation_report(violations)))

        current = candidate
        if tagged.schedule is not None and not hard:
            return normalize(candidate), provenance

    repaired = repair(current, gap_extend_minutes)
    logger.warning(f'Hard violations left after {max_rounds} editor rounds; applied deterministic repair')
    provenance.repair_fallback = True
    final_violations = audit(profile, repaired, bounds, rules, coherence)
    provenance.add(RoundRecord(max_rounds + 1, 'repair', '', violation_report(final_violations), fallback_used=True))
    return repaired, provenance


def generate_single_pass(profile: UserProfile, endpoint: ChatEndpoint, client=None,
                         gap_extend_minutes: int = DEFAULT_GAP_EXTEND_MINUTES) -> tuple:
    """Intention agent only, then deterministic repair."""
    client = client or get_chat_client(endpoint)
    provenance = Provenance()
    draft = draft_schedule(profile, endpoint, client, provenance)
    provenance.draft = draft
    schedule = repair(draft.schedule, gap_extend_minutes)
    if schedule != draft.schedule:
        provenance.repair_fallback = True
        provenance.add(RoundRecord(1, 'repair', '', [], fallback_used=True))
    return schedule, provenance


# ============================================================================
# TRAINING DATA
# ============================================================================

def _slot_identical(schedule: Optional[DaySchedule], ground_truth: DaySchedule) -> bool:
    if schedule is None:
        return False
    try:
        return discretize(schedule) == discretize(ground_truth)
    except ScheduleError:
        return False


def synthesize_sft_example(profile: UserProfile, draft: DaySchedule, ground_truth: DaySchedule,
                           endpoint: ChatEndpoint, client=None, allow_fallback: bool = True) -> SftRecord:
    """Teacher trace for (profile, draft) -> ground truth, as a student chat record.

    A teacher reply whose [JSON] does not match the ground truth slot for slot
    is replaced by a trace rebuilt from diff(draft, ground_truth).
    """
    teacher_system, teacher_user = render_teacher_prompt(profile, draft, ground_truth)

    raw = None
    try:
        raw = chat_complete(endpoint, teacher_system, teacher_user, client=client or get_chat_client(endpoint))
    except EndpointError:
        if not allow_fallback:
            raise
        logger.warning('Teacher endpoint failed; rebuilding the trace deterministically')

    tagged = parse_tagged_output(raw)
    rebuilt = not (tagged.thought and _slot_identical(tagged.schedule, ground_truth))
    if rebuilt:
        if raw is not None:
            logger.info('Teacher output does not match the ground truth; rebuilding from the edit script')
        thought = render_teacher_thought(
            audit(profile, draft), diff(draft, ground_truth), satisfied=is_hard_valid(ground_truth),
        )
        assistant = render_tagged_output(thought, ground_truth)
    else:
        assistant = f'[THOUGHT]\n{tagged.thought}\n[/THOUGHT]\n\n[JSON]\n{tagged.json_block}\n[/JSON]'

    student_system, student_user = render_student_prompt(profile, draft)
    messages = (
        {'role': 'system', 'content': student_system},
        {'role': 'user', 'content': student_user},
        {'role': 'assistant', 'content': assistant},
    )
    return SftRecord(messages, rebuilt=rebuilt)


def grpo_prompt_record(prompt_id, profile: UserProfile, ground_truth: DaySchedule) -> dict:
    system_text, user_text = render_grpo_prompt(profile)
    return {
        'prompt_id': str(prompt_id),
        'messages': [
            {'role': 'system', 'content': system_text},
            {'role': 'user', 'content': user_text},
        ],
        'ground_truth_schedule': ground_truth.to_document(),
    }


def run_session(user_id, profile: UserProfile, endpoint: ChatEndpoint, bounds: Optional[DurationBounds] = None,
                rules: Optional[tuple] = None, single_pass: bool = False, client=None,
                gap_extend_minutes: int = DEFAULT_GAP_EXTEND_MINUTES,
                coherence: Optional[CoherenceLimits] = None) -> dict:
    """One user's session as a JSON-ready document (thread pool and Celery share it)."""
    if single_pass:
        schedule, provenance = generate_single_pass(profile, endpoint, client, gap_extend_minutes)
    else:
        schedule, provenance = generate_trajectory(
            profile, endpoint, bounds=bounds, rules=rules, client=client, gap_extend_minutes=gap_extend_minutes,
            coherence=coherence,
        )
    return {
        'user_id': str(user_id),
        'profile': profile.to_document(),
        'draft': provenance.draft.schedule.to_document() if provenance.draft else [],
        'schedule': schedule.to_document(),
        'provenance': provenance.to_documents(),
        'rounds': provenance.editor_rounds,
        'fallback_used': provenance.fallback_used,
    }
