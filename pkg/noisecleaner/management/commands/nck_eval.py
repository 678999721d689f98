"""
Evaluate a classifier checkpoint on held-out videos.
"""
from noisecleaner.management.commands._base import RunCommand


class Command(RunCommand):
    """
    Evaluate a classifier checkpoint on held-out videos.
    """

    help = ("Usage: nck_eval --checkpoint <path> [--eval-dataset <dir>] [--out <dir>]")
    command = u'eval'
