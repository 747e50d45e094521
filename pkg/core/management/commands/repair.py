"""
Management command to make schedules hard-valid deterministically.
Run with: python manage.py repair --schedules drafts.json --out repaired.json
"""

from core.editor_service import repair
from core.io_service import load_schedules, save_population, write_json
from core.management.pipeline import PipelineCommand, run_config


class Command(PipelineCommand):
    help = 'Repairs every schedule: overlaps truncated, gaps filled, day anchored at home'

    def add_arguments(self, parser):
        parser.add_argument('--schedules', required=True, help='Population document or a single schedule array')
        parser.add_argument('--out', required=True, help='Where to write the repaired schedules')
        parser.add_argument(
            '--gap-extend',
            dest='gap_extend_minutes',
            type=int,
            help='Gaps shorter than this many minutes extend the previous activity',
        )
        parser.add_argument('--config', help='JSON config file (lowest precedence)')

    def run(self, **options):
        config = run_config(options, 'gap_extend_minutes')
        population, bare = load_schedules(options['schedules'], validate=False)

        repaired = {}
        changed = 0
        for user_id, schedule in population.items():
            repaired[user_id] = repair(schedule, config.gap_extend_minutes)
            if repaired[user_id] != schedule:
                changed += 1
                self.stdout.write(f'  Repaired {user_id}')

        if bare:
            write_json(options['out'], next(iter(repaired.values())).to_document())
        else:
            save_population(options['out'], repaired)
        self.stdout.write(self.style.SUCCESS(
            f'Repaired {changed} of {len(repaired)} schedules; wrote {options["out"]}'
        ))
