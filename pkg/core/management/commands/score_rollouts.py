"""
Management command to score GRPO roll-outs.
Run with: python manage.py score_rollouts --refs rollouts.jsonl --out scores.jsonl

Input lines:  {"prompt_id", "rollout_text", "ground_truth_schedule"}
Output lines: {"prompt_id", "r_fmt", "r_con", "r_sim", "total", "advantage"}

Consecutive lines sharing a prompt_id form a group; a group is flushed when
it reaches --group-size or the prompt_id changes. A group of one has no
advantage (null).
"""

import json

from django.core.management.base import CommandError
from pydantic import ValidationError

from core.io_service import read_jsonl
from core.management.pipeline import EXIT_VALIDATION, PipelineCommand, add_rule_arguments, run_config
from core.reward_service import group_advantages, total_reward
from core.schemas import RolloutLine, to_schedule, validation_message


class Command(PipelineCommand):
    help = 'Scores roll-outs line by line and emits per-group advantages'

    def add_arguments(self, parser):
        parser.add_argument(
            '--refs', '--input',
            dest='refs',
            default='-',
            help='JSON lines of roll-outs with their ground truth ("-" reads stdin)',
        )
        parser.add_argument('--out', help='JSON lines output (default: stdout)')
        parser.add_argument('--group-size', dest='rollouts_per_prompt', type=int, help='Roll-outs per prompt')
        parser.add_argument('--config', help='JSON config file (lowest precedence)')
        add_rule_arguments(parser)

    def run(self, **options):
        config = run_config(options, 'rollouts_per_prompt', 'duration_bounds_path')
        bounds = config.duration_bounds()
        group_size = config.rollouts_per_prompt

        handle = open(options['out'], 'w', encoding='utf-8') if options['out'] else None
        emit = (lambda line: handle.write(line + '\n')) if handle else self.stdout.write
        scored = 0
        group = []
        try:
            for number, item in read_jsonl(options['refs']):
                try:
                    line = RolloutLine.model_validate(item)
                    ground_truth = to_schedule(line.ground_truth_schedule)
                except (ValidationError, ValueError) as e:
                    message = validation_message(e) if isinstance(e, ValidationError) else str(e)
                    raise CommandError(f'line {number}: {message}', returncode=EXIT_VALIDATION) from None

                prompt_id = str(line.prompt_id)
                if group and (group[0][0] != prompt_id or len(group) == group_size):
                    scored += self._flush(group, emit)
                    group = []
                group.append((prompt_id, total_reward(line.rollout_text or '', ground_truth, bounds)))
            if group:
                scored += self._flush(group, emit)
        finally:
            if handle:
                handle.close()

        self.stderr.write(f'Scored {scored} roll-outs')

    def _flush(self, group, emit) -> int:
        if len(group) > 1:
            advantages = group_advantages([breakdown.total for _, breakdown in group])
        else:
            advantages = [None]
        for (prompt_id, breakdown), advantage in zip(group, advantages):
            emit(json.dumps({'prompt_id': prompt_id, **breakdown.to_document(), 'advantage': advantage}))
        return len(group)
