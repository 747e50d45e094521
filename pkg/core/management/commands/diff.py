"""
Management command to print the edit script between two schedules.
Run with: python manage.py diff --from draft.json --to edited.json
"""

from core.editor_service import diff
from core.exceptions import PopulationError
from core.io_service import load_schedules, write_json
from core.management.pipeline import PipelineCommand


class Command(PipelineCommand):
    help = 'Emits the edit script turning each --from schedule into the matching --to schedule'

    def add_arguments(self, parser):
        parser.add_argument('--from', dest='source', required=True, help='Source schedule or population')
        parser.add_argument('--to', dest='target', required=True, help='Target schedule or population')
        parser.add_argument('--out', help='Write the document here instead of stdout')

    def run(self, **options):
        source, source_bare = load_schedules(options['source'])
        target, target_bare = load_schedules(options['target'])

        if source_bare and target_bare:
            document = diff(next(iter(source.values())), next(iter(target.values()))).to_document()
        else:
            missing = sorted(set(source) ^ set(target))
            if missing:
                raise PopulationError('present in only one of --from / --to', user_id=missing[0])
            document = [
                {'user_id': user_id, 'edits': diff(source[user_id], target[user_id]).to_document()}
                for user_id in source
            ]

        if options['out']:
            write_json(options['out'], document)
            self.stdout.write(self.style.SUCCESS(f'Wrote edit script to {options["out"]}'))
        else:
            self.write_document(document)
