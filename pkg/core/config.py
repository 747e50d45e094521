"""
Run configuration: command-line flags > environment > config file > defaults.

Defaults come from Django settings; the environment layer only holds
ACTIVITY_EDITOR_* variables that are actually set. The API key is never
part of RunConfig: it is read from the environment or a key file when the
client is built.
"""
import os
from typing import Literal, Mapping, Optional

from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .constraint_rules import (
    MAX_EPISODES,
    MIN_DETOUR_MINUTES,
    CoherenceLimits,
    load_commonsense_rules,
    load_duration_bounds,
)
from .exceptions import ConfigError
from .io_service import read_json
from .llm_service import ChatEndpoint
from .schedule import DAY_MINUTES
from .schemas import validation_message

ENV_VARIABLES = {
    'provider': 'ACTIVITY_EDITOR_PROVIDER',
    'base_url': 'ACTIVITY_EDITOR_BASE_URL',
    'model': 'ACTIVITY_EDITOR_MODEL',
    'api_key_file': 'ACTIVITY_EDITOR_API_KEY_FILE',
    'temperature': 'ACTIVITY_EDITOR_TEMPERATURE',
    'timeout': 'ACTIVITY_EDITOR_TIMEOUT',
    'max_retries': 'ACTIVITY_EDITOR_MAX_RETRIES',
    'retry_backoff': 'ACTIVITY_EDITOR_RETRY_BACKOFF',
    'max_rounds': 'ACTIVITY_EDITOR_MAX_ROUNDS',
    'concurrency': 'ACTIVITY_EDITOR_CONCURRENCY',
    'seed': 'ACTIVITY_EDITOR_SEED',
    'rollouts_per_prompt': 'ACTIVITY_EDITOR_ROLLOUTS_PER_PROMPT',
    'duration_bounds_path': 'ACTIVITY_EDITOR_DURATION_BOUNDS',
    'commonsense_rules_path': 'ACTIVITY_EDITOR_COMMONSENSE_RULES',
    'gap_extend_minutes': 'ACTIVITY_EDITOR_REPAIR_GAP_EXTEND',
    'max_episodes': 'ACTIVITY_EDITOR_MAX_EPISODES',
    'min_detour_minutes': 'ACTIVITY_EDITOR_MIN_DETOUR_MINUTES',
}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    provider: Literal['openai', 'groq', 'mock'] = 'openai'
    base_url: str = ''
    model: str = 'gpt-4o-mini'
    api_key_file: str = ''
    temperature: float = Field(0.7, ge=0.0, le=2.0)
    timeout: float = Field(60.0, gt=0)
    max_retries: int = Field(3, ge=1)
    retry_backoff: float = Field(1.0, ge=0)
    max_rounds: int = Field(3, ge=1)
    concurrency: int = Field(4, ge=1)
    seed: int = 0
    rollouts_per_prompt: int = Field(8, ge=2)
    duration_bounds_path: str = ''
    commonsense_rules_path: str = ''
    gap_extend_minutes: int = Field(30, ge=0)
    max_episodes: int = Field(MAX_EPISODES, ge=1)
    min_detour_minutes: int = Field(MIN_DETOUR_MINUTES, ge=0, le=DAY_MINUTES)

    # input / output paths
    profiles: Optional[str] = None
    aliases: Optional[str] = None
    drafts: Optional[str] = None
    truth: Optional[str] = None
    schedules: Optional[str] = None
    out: Optional[str] = None
    provenance: Optional[str] = None

    def endpoint(self) -> ChatEndpoint:
        return ChatEndpoint(
            model_name=self.model,
            base_url=self.base_url,
            provider=self.provider,
            api_key_file=self.api_key_file,
            temperature=self.temperature,
            max_rounds=self.max_rounds,
            max_retries=self.max_retries,
            retry_backoff=self.retry_backoff,
            timeout=self.timeout,
            seed=self.seed,
        )

    def duration_bounds(self):
        return load_duration_bounds(self.duration_bounds_path or None)

    def commonsense_rules(self):
        return load_commonsense_rules(self.commonsense_rules_path or None)

    def coherence_limits(self) -> CoherenceLimits:
        return CoherenceLimits(self.max_episodes, self.min_detour_minutes)

    def snapshot(self) -> dict:
        """JSON-ready record of the run, with the effective duration bounds resolved."""
        return dict(self.model_dump(), duration_bounds=self.duration_bounds().to_document())


def settings_defaults() -> dict:
    return {
        'provider': settings.ENDPOINT_PROVIDER,
        'base_url': settings.ENDPOINT_BASE_URL,
        'model': settings.ENDPOINT_MODEL,
        'api_key_file': settings.ENDPOINT_API_KEY_FILE,
        'temperature': settings.ENDPOINT_TEMPERATURE,
        'timeout': settings.ENDPOINT_TIMEOUT,
        'max_retries': settings.ENDPOINT_MAX_RETRIES,
        'retry_backoff': settings.ENDPOINT_RETRY_BACKOFF,
        'max_rounds': settings.EDITOR_MAX_ROUNDS,
        'concurrency': settings.GENERATION_CONCURRENCY,
        'seed': settings.RANDOM_SEED,
        'rollouts_per_prompt': settings.ROLLOUTS_PER_PROMPT,
        'duration_bounds_path': settings.DURATION_BOUNDS_PATH,
        'commonsense_rules_path': settings.COMMONSENSE_RULES_PATH,
        'gap_extend_minutes': settings.REPAIR_GAP_EXTEND_MINUTES,
        'max_episodes': settings.COHERENCE_MAX_EPISODES,
        'min_detour_minutes': settings.COHERENCE_MIN_DETOUR_MINUTES,
    }


def environment_overrides(environ: Optional[Mapping] = None) -> dict:
    environ = os.environ if environ is None else environ
    return {name: environ[variable] for name, variable in ENV_VARIABLES.items() if variable in environ}


def resolve_run_config(flags: Optional[Mapping] = None, config_path: Optional[str] = None,
                       environ: Optional[Mapping] = None) -> RunConfig:
    """Merge the layers; unknown keys anywhere raise ConfigError."""
    values = settings_defaults()
    if config_path:
        document = read_json(config_path)
        if not isinstance(document, dict):
            raise ConfigError(f'{config_path}: config file must be a JSON object')
        values.update(document)
    values.update(environment_overrides(environ))
    values.update({key: value for key, value in (flags or {}).items() if value is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f'Invalid run configuration: {validation_message(e)}') from None
