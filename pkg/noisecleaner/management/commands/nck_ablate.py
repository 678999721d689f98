"""
Run the cleaner ablations, or a single one given by --ablate, --graph or --branch.
"""
from noisecleaner.management.commands._base import RunCommand


class Command(RunCommand):
    """
    Run the cleaner ablations, or a single one given by --ablate, --graph or --branch.
    """

    help = ("Usage: nck_ablate [--ablate <spec>] [--graph constant:<v>] [--branch <name>] ...")
    command = u'ablate'
