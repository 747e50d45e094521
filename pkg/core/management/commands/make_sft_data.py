"""
Management command to build supervised fine-tuning records.
Run with: python manage.py make_sft_data --profiles p.csv --drafts d.json --truth t.json --out sft.jsonl
"""

import logging

from core.agent_service import synthesize_sft_example
from core.io_service import load_aliases, load_population, load_profile_table, write_jsonl
from core.llm_service import get_chat_client
from core.management.pipeline import PipelineCommand, add_endpoint_arguments, run_config

logger = logging.getLogger(__name__)


class Command(PipelineCommand):
    help = 'Asks the teacher model to edit each draft towards its ground truth and writes chat records'

    def add_arguments(self, parser):
        parser.add_argument('--profiles', required=True, help='Profile table')
        parser.add_argument('--drafts', required=True, help='Population of draft schedules')
        parser.add_argument('--truth', required=True, help='Population of ground-truth schedules')
        parser.add_argument('--out', required=True, help='SFT JSON lines to write')
        parser.add_argument('--aliases', help='JSON column -> profile field alias table')
        parser.add_argument(
            '--strict',
            action='store_true',
            help='Fail on endpoint errors instead of rebuilding traces from the edit script',
        )
        add_endpoint_arguments(parser)

    def run(self, **options):
        config = run_config(options, 'provider', 'model', 'base_url', 'temperature', 'max_rounds',
                            'max_retries', 'seed')
        profiles = load_profile_table(options['profiles'], load_aliases(options['aliases']))
        drafts = load_population(options['drafts'], validate=False)
        truth = load_population(options['truth'], validate=True)

        endpoint = config.endpoint()
        client = get_chat_client(endpoint)
        records = []
        rebuilt = 0
        for user_id, profile in profiles:
            if user_id not in drafts or user_id not in truth:
                self.stdout.write(self.style.WARNING(f'  Skipping {user_id} - no draft or ground truth'))
                continue
            record = synthesize_sft_example(
                profile, drafts[user_id], truth[user_id], endpoint,
                client=client, allow_fallback=not options['strict'],
            )
            rebuilt += record.rebuilt
            records.append(record.to_document())

        write_jsonl(options['out'], records)
        logger.info(f'{rebuilt} of {len(records)} teacher traces rebuilt from the edit script')
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(records)} SFT records to {options["out"]} ({rebuilt} rebuilt)'
        ))
