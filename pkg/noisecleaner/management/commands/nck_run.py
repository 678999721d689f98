"""
Run the classifier/cleaner alternation and record every step.
"""
from noisecleaner.management.commands._base import RunCommand


class Command(RunCommand):
    """
    Run the classifier/cleaner alternation and record every step.
    """

    help = ("Usage: nck_run [--config <path>] [--seed <n>] [--out <dir>] [--steps <n>] ...")
    command = u'run'
