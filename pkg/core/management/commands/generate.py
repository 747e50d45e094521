"""
Management command to generate a population of daily schedules.
Run with: python manage.py generate --profiles profiles.csv --out population.json
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
import logging

from django.utils import timezone

from core.agent_service import run_session
from core.exceptions import EndpointError, PopulationError
from core.io_service import load_aliases, load_profile_table, write_json, write_jsonl
from core.llm_service import get_chat_client
from core.management.pipeline import (
    PipelineCommand,
    add_coherence_arguments,
    add_endpoint_arguments,
    add_rule_arguments,
    run_config,
)
from core.models import GenerationRun, GenerationSession

logger = logging.getLogger(__name__)

CONFIG_FLAGS = (
    'profiles', 'out', 'provenance', 'aliases', 'provider', 'model', 'base_url', 'temperature',
    'max_rounds', 'max_retries', 'seed', 'concurrency', 'duration_bounds_path', 'commonsense_rules_path',
    'max_episodes', 'min_detour_minutes',
)


class Command(PipelineCommand):
    help = 'Generates one hard-valid daily schedule per profile with the generate-then-edit loop'

    def add_arguments(self, parser):
        parser.add_argument('--profiles', help='Profile table (CSV, JSON or JSON lines)')
        parser.add_argument('--out', help='Population document to write')
        parser.add_argument('--provenance', help='Provenance JSON lines (default: <out>.provenance.jsonl)')
        parser.add_argument('--aliases', help='JSON column -> profile field alias table')
        parser.add_argument('--concurrency', type=int, help='Sessions in flight at once')
        parser.add_argument(
            '--single-pass',
            action='store_true',
            help='Intention agent only, followed by deterministic repair',
        )
        parser.add_argument(
            '--celery',
            action='store_true',
            help='Dispatch sessions to Celery workers instead of local threads',
        )
        add_endpoint_arguments(parser)
        add_rule_arguments(parser)
        add_coherence_arguments(parser)

    def run(self, **options):
        config = run_config(options, *CONFIG_FLAGS)
        if not config.profiles or not config.out:
            raise self.usage_error('generate needs --profiles and --out (flags or config file)')

        table = load_profile_table(config.profiles, load_aliases(config.aliases))
        seen = set()
        for user_id, _ in table:
            if user_id in seen:
                raise PopulationError('duplicate user_id in profile table', user_id=user_id)
            seen.add(user_id)

        endpoint = config.endpoint()
        mode = 'single_pass' if options['single_pass'] else 'editor'
        run = GenerationRun.objects.create(
            mode=mode,
            endpoint=endpoint.identity,
            config=config.snapshot(),
            profile_count=len(table),
        )
        self.stdout.write(f'Generating {len(table)} schedules ({mode}, {endpoint.identity})...')

        try:
            if options['celery']:
                results = self._dispatch_celery(table, config, options['single_pass'])
            else:
                results = self._dispatch_threads(table, config, endpoint, options['single_pass'])
        except EndpointError as e:
            run.status = 'failed'
            run.error = str(e)
            run.completed_at = timezone.now()
            run.save()
            raise

        # Main thread only: sessions are written after every worker has joined
        GenerationSession.objects.bulk_create([
            GenerationSession(
                run=run,
                user_id=result['user_id'],
                profile=result['profile'],
                draft=result['draft'],
                schedule=result['schedule'],
                provenance=result['provenance'],
                rounds=result['rounds'],
                fallback_used=result['fallback_used'],
            )
            for result in results
        ])
        run.status = 'completed'
        run.fallback_count = sum(result['fallback_used'] for result in results)
        run.total_rounds = sum(result['rounds'] for result in results)
        run.completed_at = timezone.now()
        run.save()

        write_json(config.out, [{'user_id': result['user_id'], 'schedule': result['schedule']} for result in results])
        provenance_path = config.provenance or str(Path(config.out).with_suffix('.provenance.jsonl'))
        write_jsonl(provenance_path, [
            {'user_id': result['user_id'], **record}
            for result in results
            for record in result['provenance']
        ])

        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(results)} schedules to {config.out} '
            f'({run.fallback_count} fallbacks, {run.total_rounds} editor rounds)'
        ))
        logger.info(f'Run {run.id}: provenance in {provenance_path}')

    def _dispatch_threads(self, table, config, endpoint, single_pass):
        client = get_chat_client(endpoint)
        bounds = config.duration_bounds()
        rules = config.commonsense_rules()
        coherence = config.coherence_limits()
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            futures = [
                pool.submit(
                    run_session, user_id, profile, endpoint,
                    bounds=bounds, rules=rules, single_pass=single_pass, client=client,
                    gap_extend_minutes=config.gap_extend_minutes, coherence=coherence,
                )
                for user_id, profile in table
            ]
            return [future.result() for future in futures]

    def _dispatch_celery(self, table, config, single_pass):
        from celery import group
        from core.tasks import generate_session

        config_document = config.model_dump()
        job = group(
            generate_session.s(user_id, profile.to_document(), config_document, single_pass)
            for user_id, profile in table
        )
        return job.apply_async().get()
