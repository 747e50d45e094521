"""
Shared plumbing for the pipeline management commands: exit codes, error
translation and the endpoint flags several commands accept.
"""
import json
import logging

from django.core.management.base import BaseCommand, CommandError

from core.config import resolve_run_config
from core.exceptions import (
    ConfigError,
    DocumentError,
    EndpointError,
    MetricError,
    PopulationError,
    ProfileError,
    ScheduleError,
)

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_ENDPOINT = 5

ERROR_EXIT_CODES = [
    (ConfigError, EXIT_USAGE),
    (DocumentError, EXIT_IO),
    (OSError, EXIT_IO),
    (EndpointError, EXIT_ENDPOINT),
    (PopulationError, EXIT_VALIDATION),
    (ProfileError, EXIT_VALIDATION),
    (ScheduleError, EXIT_VALIDATION),
    (MetricError, EXIT_VALIDATION),
]


def exit_code_for(error: BaseException) -> int:
    for error_type, code in ERROR_EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return 1


class PipelineCommand(BaseCommand):
    """BaseCommand whose `run()` errors leave with the matching exit code."""

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except CommandError:
            raise
        except (ConfigError, DocumentError, OSError, EndpointError,
                PopulationError, ProfileError, ScheduleError, MetricError) as e:
            logger.error(f'{self.__module__.rsplit(".", 1)[-1]} failed: {e}')
            raise CommandError(str(e), returncode=exit_code_for(e)) from e

    def run(self, **options):
        raise NotImplementedError

    def usage_error(self, message):
        return CommandError(message, returncode=EXIT_USAGE)

    def write_document(self, document):
        self.stdout.write(json.dumps(document, indent=2))


def add_endpoint_arguments(parser):
    parser.add_argument('--config', help='JSON config file (lowest precedence)')
    parser.add_argument('--provider', choices=['openai', 'groq', 'mock'])
    parser.add_argument('--model', help='Model name served by the endpoint')
    parser.add_argument('--base-url', '--endpoint', dest='base_url', help='OpenAI-compatible base URL')
    parser.add_argument('--temperature', type=float)
    parser.add_argument('--max-rounds', dest='max_rounds', type=int)
    parser.add_argument('--max-retries', dest='max_retries', type=int)
    parser.add_argument('--seed', type=int)


def add_rule_arguments(parser):
    parser.add_argument('--duration-bounds', dest='duration_bounds_path', help='JSON duration bounds override')
    parser.add_argument('--commonsense-rules', dest='commonsense_rules_path', help='JSON commonsense rule table')


def add_coherence_arguments(parser):
    parser.add_argument('--max-episodes', type=int, help='Segments per day above which a schedule is fragmented')
    parser.add_argument('--min-detour-minutes', type=int, help='Shortest A -> B -> A detour left unflagged')


def run_config(options, *names):
    """RunConfig from the parsed options named in `names` plus --config."""
    flags = {name: options.get(name) for name in names}
    return resolve_run_config(flags, options.get('config'))
