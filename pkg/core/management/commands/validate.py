"""
Management command to audit schedules against the constraint set.
Run with: python manage.py validate --schedules population.json
"""

from django.core.management.base import CommandError

from core.constraint_service import audit, hard_violations, violation_report
from core.io_service import load_aliases, load_profile_table, load_schedules, write_json
from core.management.pipeline import (
    EXIT_VALIDATION,
    PipelineCommand,
    add_coherence_arguments,
    add_rule_arguments,
    run_config,
)
from core.schedule import UserProfile


class Command(PipelineCommand):
    help = 'Audits every schedule; exits with status 4 if any has a hard violation'

    def add_arguments(self, parser):
        parser.add_argument('--schedules', required=True, help='Population document or a single schedule array')
        parser.add_argument('--profiles', help='Profile table, enables the commonsense checks per user')
        parser.add_argument('--aliases', help='JSON column -> profile field alias table')
        parser.add_argument('--out', help='Write the audit report as JSON')
        parser.add_argument('--config', help='JSON config file (lowest precedence)')
        add_rule_arguments(parser)
        add_coherence_arguments(parser)

    def run(self, **options):
        config = run_config(
            options, 'duration_bounds_path', 'commonsense_rules_path', 'max_episodes', 'min_detour_minutes',
        )
        bounds = config.duration_bounds()
        rules = config.commonsense_rules()
        coherence = config.coherence_limits()

        population, _ = load_schedules(options['schedules'], validate=False)
        profiles = {}
        if options['profiles']:
            profiles = dict(load_profile_table(options['profiles'], load_aliases(options['aliases'])))

        report = []
        invalid = []
        for user_id, schedule in population.items():
            violations = audit(profiles.get(user_id, UserProfile()), schedule, bounds, rules, coherence)
            hard = hard_violations(violations)
            status = 'invalid' if hard else 'valid'
            report.append({'user_id': user_id, 'status': status, 'violations': violation_report(violations)})

            style = self.style.ERROR if hard else self.style.SUCCESS
            self.stdout.write(style(f'{user_id}: {status}'))
            for violation in violations:
                self.stdout.write(f'  [{violation.category.value}] {violation.description}')
            if hard:
                invalid.append(user_id)

        if options['out']:
            write_json(options['out'], report)

        if invalid:
            raise CommandError(
                f'{len(invalid)} of {len(population)} schedules have hard violations: {", ".join(invalid)}',
                returncode=EXIT_VALIDATION,
            )
        self.stdout.write(self.style.SUCCESS(f'All {len(population)} schedules are hard-valid'))
