"""
Management command to export roll-out prompts for an external GRPO trainer.
Run with: python manage.py export_grpo_prompts --profiles p.csv --truth t.json --out prompts.jsonl
"""

from core.agent_service import grpo_prompt_record
from core.io_service import load_aliases, load_population, load_profile_table, write_jsonl
from core.management.pipeline import PipelineCommand


class Command(PipelineCommand):
    help = 'Writes one {prompt_id, messages, ground_truth_schedule} line per user'

    def add_arguments(self, parser):
        parser.add_argument('--profiles', required=True, help='Profile table')
        parser.add_argument('--truth', required=True, help='Population of ground-truth schedules')
        parser.add_argument('--out', required=True, help='JSON lines to write')
        parser.add_argument('--aliases', help='JSON column -> profile field alias table')

    def run(self, **options):
        profiles = load_profile_table(options['profiles'], load_aliases(options['aliases']))
        truth = load_population(options['truth'])

        records = []
        for user_id, profile in profiles:
            if user_id not in truth:
                self.stdout.write(self.style.WARNING(f'  Skipping {user_id} - no ground truth'))
                continue
            records.append(grpo_prompt_record(user_id, profile, truth[user_id]))

        write_jsonl(options['out'], records)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(records)} prompts to {options["out"]}'))
