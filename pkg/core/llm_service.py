"""
Chat-completion endpoint client.

Providers:
- openai: any OpenAI-compatible endpoint (base URL configurable)
- groq: Groq's hosted Llama models
- mock: deterministic offline client answering from a content hash

Every call goes through client.chat.completions.create with a system and a
user message; transient failures are retried with exponential backoff.
"""
import hashlib
import json
import logging
import os
import random
import re
from dataclasses import dataclass, replace
from pathlib import Path
from types import SimpleNamespace
from typing import Optional

from django.conf import settings
from tenacity import Retrying, retry_if_exception, stop_after_attempt, wait_exponential

from .constraint_service import audit
from .editor_service import diff, repair
from .exceptions import ConfigError, EndpointError
from .mock_data import random_schedule
from .prompts import (
    EDITOR_SYSTEM_PROMPT,
    GRPO_SYSTEM_PROMPT,
    INTENTION_SYSTEM_PROMPT,
    STUDENT_SYSTEM_PROMPT,
    TEACHER_SYSTEM_PROMPT,
    render_tagged_output,
    render_teacher_thought,
)
from .schedule import ActivitySegment, DaySchedule, UserProfile

try:
    from openai import OpenAI
    OPENAI_AVAILABLE = True
except ImportError:
    OPENAI_AVAILABLE = False

try:
    from groq import Groq
    GROQ_AVAILABLE = True
except ImportError:
    GROQ_AVAILABLE = False

logger = logging.getLogger(__name__)

PROVIDERS = ('openai', 'groq', 'mock')

# HTTP statuses that no amount of retrying will fix.
NON_RETRYABLE_STATUS = {400, 401, 403, 404, 422}

MAX_BACKOFF_SECONDS = 30


@dataclass(frozen=True)
class ChatEndpoint:
    """Connection and sampling settings for one chat endpoint.

    The API key itself is never stored: `api_key_file` or the environment
    (Django settings) is consulted when a client is built.
    """

    model_name: str
    base_url: str = ''
    provider: str = 'openai'
    api_key_file: str = ''
    temperature: float = 0.7
    max_rounds: int = 3
    max_retries: int = 3
    retry_backoff: float = 1.0
    timeout: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.provider not in PROVIDERS:
            raise ConfigError(f'Unknown provider {self.provider!r}; expected one of {PROVIDERS}')
        if self.max_rounds < 1:
            raise ConfigError('max_rounds must be at least 1')
        if self.max_retries < 1:
            raise ConfigError('max_retries must be at least 1')

    @property
    def identity(self) -> str:
        return f'{self.provider}:{self.model_name}@{self.base_url or "default"}'

    @classmethod
    def from_settings(cls, **overrides) -> 'ChatEndpoint':
        values = {
            'model_name': settings.ENDPOINT_MODEL,
            'base_url': settings.ENDPOINT_BASE_URL,
            'provider': settings.ENDPOINT_PROVIDER,
            'api_key_file': settings.ENDPOINT_API_KEY_FILE,
            'temperature': settings.ENDPOINT_TEMPERATURE,
            'max_rounds': settings.EDITOR_MAX_ROUNDS,
            'max_retries': settings.ENDPOINT_MAX_RETRIES,
            'retry_backoff': settings.ENDPOINT_RETRY_BACKOFF,
            'timeout': settings.ENDPOINT_TIMEOUT,
            'seed': settings.RANDOM_SEED,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_overrides(self, **overrides) -> 'ChatEndpoint':
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def resolve_api_key(self) -> str:
        if self.api_key_file:
            try:
                return Path(self.api_key_file).read_text(encoding='utf-8').strip()
            except OSError as e:
                raise ConfigError(f'Cannot read API key file {self.api_key_file}: {e}') from e
        return getattr(settings, 'ENDPOINT_API_KEY', '') or os.getenv('OPENAI_API_KEY', '')


def get_chat_client(endpoint: ChatEndpoint):
    """Build the SDK client for `endpoint`; anything exposing chat.completions.create works."""
    if endpoint.provider == 'mock':
        return MockChatClient(seed=endpoint.seed)

    api_key = endpoint.resolve_api_key()
    if not api_key:
        raise ConfigError(f'No API key configured for {endpoint.identity}')

    if endpoint.provider == 'groq':
        if not GROQ_AVAILABLE:
            raise ConfigError('groq package is not installed')
        return Groq(api_key=api_key, base_url=endpoint.base_url or None, timeout=endpoint.timeout)

    if not OPENAI_AVAILABLE:
        raise ConfigError('openai package is not installed')
    return OpenAI(api_key=api_key, base_url=endpoint.base_url or None, timeout=endpoint.timeout)


def _is_retryable(exc: BaseException) -> bool:
    status = getattr(exc, 'status_code', None)
    return status not in NON_RETRYABLE_STATUS


def chat_complete(endpoint: ChatEndpoint, system_text: str, user_text: str, client=None) -> str:
    """Assistant text for a two-message chat, retrying transient failures."""
    client = client or get_chat_client(endpoint)
    messages = [
        {'role': 'system', 'content': system_text},
        {'role': 'user', 'content': user_text},
    ]
    attempts = 0

    def _log_retry(retry_state):
        logger.warning(
            f'{endpoint.identity}: attempt {retry_state.attempt_number}/{endpoint.max_retries} failed: '
            f'{retry_state.outcome.exception()!r}'
        )

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(endpoint.max_retries),
            wait=wait_exponential(multiplier=endpoint.retry_backoff, max=MAX_BACKOFF_SECONDS),
            retry=retry_if_exception(_is_retryable),
            before_sleep=_log_retry,
            reraise=True,
        ):
            with attempt:
                attempts = attempt.retry_state.attempt_number
                response = client.chat.completions.create(
                    model=endpoint.model_name,
                    messages=messages,
                    temperature=endpoint.temperature,
                )
                content = response.choices[0].message.content
                if content is None:
                    raise ValueError('response carried no message content')
    except Exception as e:
        logger.error(f'{endpoint.identity}: giving up after {attempts} attempt(s): {e}')
        raise EndpointError(f'Chat completion failed: {e}', endpoint=endpoint.identity, attempts=attempts) from e
    return content


# ============================================================================
# MOCK CLIENT
# ============================================================================

_PROFILE_BLOCK = re.compile(r'PERSON PROFILE:\n(\{.*?\n\})', re.DOTALL)
_INITIAL_BLOCK = re.compile(r'INITIAL SCHEDULE[^\n]*:\n(\[.*?\n\])', re.DOTALL)
_TRUTH_BLOCK = re.compile(r'GROUND TRUTH REFERENCE[^\n]*:\n(\[.*?\n\])', re.DOTALL)

GARBAGE_REPLIES = [
    'I am sorry, I cannot help with planning a schedule right now.',
    '{"reasoning": "truncated", "schedule": [{"activity": "home", "start_time": "00:00"',
    '[THOUGHT]\nThe schedule looks fine.\n[/THOUGHT]\n\n[JSON]\nnot json at all\n[/JSON]',
]


def _response(content: str):
    return SimpleNamespace(choices=[SimpleNamespace(message=SimpleNamespace(content=content))])


def _schedule_from(pattern, text: str) -> Optional[DaySchedule]:
    match = pattern.search(text)
    if not match:
        return None
    try:
        return DaySchedule.from_document(json.loads(match.group(1)))
    except (ValueError, TypeError):
        return None


class _MockCompletions:
    def __init__(self, owner):
        self.owner = owner

    def create(self, model=None, messages=None, temperature=None, **kwargs):
        self.owner.calls.append({'model': model, 'messages': messages, 'temperature': temperature})
        system = messages[0]['content'] if messages else ''
        user = messages[-1]['content'] if messages else ''
        return _response(self.owner.reply(system, user))


class MockChatClient:
    """Offline stand-in for the SDK clients.

    Replies depend only on (seed, prompt kind, message content): valid,
    flawed and garbage answers are mixed so every fallback path gets used.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls = []
        self.chat = SimpleNamespace(completions=_MockCompletions(self))

    def _rng(self, kind: str, content: str) -> random.Random:
        tag = f'{self.seed}::{kind}::{content}'
        return random.Random(int(hashlib.sha256(tag.encode('utf-8')).hexdigest()[:16], 16))

    def reply(self, system: str, user: str) -> str:
        if system == INTENTION_SYSTEM_PROMPT:
            return self._intention_reply(user)
        if system == TEACHER_SYSTEM_PROMPT:
            return self._teacher_reply(user)
        if system in (EDITOR_SYSTEM_PROMPT, STUDENT_SYSTEM_PROMPT):
            return self._editor_reply(user)
        if system == GRPO_SYSTEM_PROMPT:
            return self._rollout_reply(user)
        return self._rng('other', user).choice(GARBAGE_REPLIES)

    def _intention_reply(self, user: str) -> str:
        rng = self._rng('intention', user)
        roll = rng.random()
        working = 'Primary activity: Working' in user or 'Employed' in user
        schedule = random_schedule(rng, with_work=working)
        if roll < 0.15:
            return rng.choice(GARBAGE_REPLIES)
        if roll < 0.45:
            schedule = _flaw(rng, schedule)
        document = schedule.to_document()
        if roll > 0.85:
            return json.dumps(document, indent=2)
        reasoning = 'Works a daytime block.' if working else 'Mostly home with short errands.'
        return json.dumps({'reasoning': reasoning, 'schedule': document}, indent=2)

    def _editor_reply(self, user: str) -> str:
        rng = self._rng('editor', user)
        draft = _schedule_from(_INITIAL_BLOCK, user)
        roll = rng.random()
        if draft is None or not len(draft) or roll < 0.1:
            return rng.choice(GARBAGE_REPLIES)
        if roll < 0.3:
            # Echo the draft untouched, flaws included.
            return render_tagged_output('Final Result: All constraints satisfied', draft)
        edited = repair(draft)
        script = diff(draft, edited)
        lines = ['Constraint Checking:', 'Edit Operations Applied:']
        lines += [f'- {op.describe()}' for op in script] or ['- none']
        lines.append('Final Result: All constraints satisfied')
        return render_tagged_output('\n'.join(lines), edited)

    def _teacher_reply(self, user: str) -> str:
        rng = self._rng('teacher', user)
        draft = _schedule_from(_INITIAL_BLOCK, user)
        truth = _schedule_from(_TRUTH_BLOCK, user)
        if not draft or not truth:
            return rng.choice(GARBAGE_REPLIES)
        match = _PROFILE_BLOCK.search(user)
        profile = UserProfile.from_mapping(json.loads(match.group(1))) if match else UserProfile()
        thought = render_teacher_thought(audit(profile, draft), diff(draft, truth), satisfied=True)
        if rng.random() < 0.2:
            truth = _near_miss(truth)
        return render_tagged_output(thought, truth)

    def _rollout_reply(self, user: str) -> str:
        rng = self._rng('rollout', user)
        roll = rng.random()
        if roll < 0.1:
            return rng.choice(GARBAGE_REPLIES)
        return render_tagged_output("Brief reasoning about the person's schedule patterns.", random_schedule(rng))


def _flaw(rng: random.Random, schedule: DaySchedule) -> DaySchedule:
    """Break one hard constraint: an overlap, a gap or a late start."""
    segments = list(schedule.segments)
    kind = rng.choice(('overlap', 'gap', 'late_start'))
    if kind == 'late_start' or len(segments) < 2:
        first = segments[0]
        segments[0] = ActivitySegment(first.activity, min(first.end - 15, 30), first.end)
        return DaySchedule(tuple(segments))

    i = rng.randrange(1, len(segments))
    segment = segments[i]
    start = segment.start - 30 if kind == 'overlap' else segment.start + 30
    if 0 <= start < segment.end:
        segments[i] = ActivitySegment(segment.activity, start, segment.end)
    return DaySchedule(tuple(segments))


def _near_miss(schedule: DaySchedule) -> DaySchedule:
    """Move the first internal boundary 15 minutes earlier."""
    segments = list(schedule.segments)
    if len(segments) < 2 or segments[0].duration <= 30:
        return schedule
    first, second = segments[0], segments[1]
    segments[0] = ActivitySegment(first.activity, first.start, first.end - 15)
    segments[1] = ActivitySegment(second.activity, second.start - 15, second.end)
    return DaySchedule(tuple(segments))
