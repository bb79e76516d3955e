#!/usr/bin/env python3
"""Command-line entry point.

Engine subcommands:
    python manage.py evolve   --task tmaze --seed 0 --out runs/evolve
    python manage.py run      --task tmaze --survivors runs/evolve --out runs/cell
    python manage.py ablate   --task flappy --seeds 10 --out runs/ablation
    python manage.py baseline --task tmaze --out runs/qlearning
    python manage.py test lsm_app
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install backend/requirements.txt into the "
            "active environment before running the engine commands."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
