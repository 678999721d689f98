"""
Export a synthetic train/eval pair as feature files.
"""
from noisecleaner.management.commands._base import RunCommand


class Command(RunCommand):
    """
    Export a synthetic train/eval pair as feature files.
    """

    help = ("Usage: nck_generate [--config <path>] [--seed <n>] [--out <dir>]")
    command = u'generate'
