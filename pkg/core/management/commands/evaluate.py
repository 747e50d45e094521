"""
Management command to compare a generated population with a reference one.
Run with: python manage.py evaluate --gen generated.json --ref reference.json
"""

from core.io_service import load_population, write_json
from core.management.pipeline import PipelineCommand
from core.metrics_service import Population, evaluate


class Command(PipelineCommand):
    help = 'Computes the twelve fidelity metrics and prints them as a table'

    def add_arguments(self, parser):
        parser.add_argument('--gen', required=True, help='Generated population')
        parser.add_argument('--ref', required=True, help='Reference population')
        parser.add_argument('--out', help='Write the metric document as JSON')

    def run(self, **options):
        generated = Population.from_schedules(load_population(options['gen']))
        reference = Population.from_schedules(load_population(options['ref']))

        report = evaluate(generated, reference)
        self.stdout.write(report.to_table())
        if options['out']:
            write_json(options['out'], report.to_document())
            self.stdout.write(self.style.SUCCESS(f'Wrote metrics to {options["out"]}'))
