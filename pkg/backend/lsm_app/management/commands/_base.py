"""Shared flags and error mapping for the engine subcommands."""
from django.core.management.base import BaseCommand, CommandError

from lsm_app.conf import load_parameters
from lsm_app.environments import TASKS
from lsm_app.exceptions import LsmError


class EngineCommand(BaseCommand):
    # flag dest -> settings.LSM key, for flags that override a parameter
    overrides = {'workers': 'WORKERS'}

    def add_arguments(self, parser):
        parser.add_argument('--task', choices=TASKS, default='tmaze')
        parser.add_argument('--seed', type=int, default=0, help='master seed')
        parser.add_argument('--config', help='KEY=value file overriding engine settings')
        parser.add_argument('--out', default='out', help='output directory')
        parser.add_argument('--workers', type=int, help='worker processes (default: WORKERS setting)')
        self.add_engine_arguments(parser)

    def add_engine_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            params = load_parameters(
                options['config'],
                {key: options.get(dest) for dest, key in self.overrides.items()},
            )
            return self.run(params, **options)
        except LsmError as exc:
            raise CommandError(str(exc)) from exc

    def run(self, params, **options):
        raise NotImplementedError

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
