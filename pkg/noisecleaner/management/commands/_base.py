"""
Flags and control flow shared by the nck_* commands.
"""
from django.core.management.base import BaseCommand, CommandError

from noisecleaner.errors import ConfigRequestError
from noisecleaner.experiment import run_experiment
from noisecleaner.schema import load_run_config

EXIT_INVALID_CONFIG = 2


class RunCommand(BaseCommand):
    """
    Build a run configuration from `--config` and the flags, then execute it.

    Subclasses set `command` to one of the run-configuration commands.
    """

    command = None

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            action='store',
            dest='config',
            default=None,
            help="JSON run configuration; flags override its values"
        )
        parser.add_argument('--seed', action='store', dest='seed', type=int, default=None, help="Run seed")
        parser.add_argument(
            '-o',
            '--out',
            action='store',
            dest='output_dir',
            default=None,
            help="Run directory (default: <NCK_DEFAULT_OUTPUT_DIR>/<command>-seed<seed>)"
        )
        parser.add_argument(
            '--steps', action='store', dest='steps', type=int, default=None, help="Number of alternation steps"
        )
        parser.add_argument(
            '--confidence-fraction',
            action='store',
            dest='confidence_fraction',
            type=float,
            default=None,
            help="Fraction of snippets per video kept as high-confidence supervision"
        )
        parser.add_argument(
            '--ema-alpha',
            action='store',
            dest='ema_alpha',
            type=float,
            default=None,
            help="Momentum of the running average of cleaner outputs"
        )
        parser.add_argument(
            '--ablate',
            action='store',
            dest='ablate',
            default=None,
            help="Ablation spec, e.g. branch=temporal,graph=constant:0.5,indirect=off"
        )
        parser.add_argument(
            '--graph', action='store', dest='graph', default=None, help="Replace the graphs, e.g. constant:0.5"
        )
        parser.add_argument(
            '--branch',
            action='store',
            dest='branch',
            default=None,
            help="Cleaner branches to keep: feature, temporal or both"
        )
        parser.add_argument(
            '--symmetrize-similarity',
            action='store_true',
            dest='symmetrize_similarity',
            default=False,
            help="Symmetrize the feature-similarity graph"
        )
        parser.add_argument(
            '--hard-targets',
            action='store_true',
            dest='hard_targets',
            default=False,
            help="Threshold cleaned labels at 0.5 before retraining"
        )
        parser.add_argument(
            '--dataset', action='store', dest='dataset', default=None, help="Directory of training feature files"
        )
        parser.add_argument(
            '--eval-dataset',
            action='store',
            dest='eval_dataset',
            default=None,
            help="Directory of evaluation feature files (with ground truth)"
        )
        parser.add_argument(
            '--checkpoint', action='store', dest='checkpoint', default=None, help="Classifier checkpoint to evaluate"
        )

    def handle(self, *args, **options):
        """
        Run the command.

        Raises:
            CommandError: The configuration is invalid (status 2) or the run failed.

        """
        try:
            config = load_run_config(self.command, path=options.pop('config', None), **options)
        except ConfigRequestError as ex:
            raise CommandError(str(ex), returncode=EXIT_INVALID_CONFIG)

        status = run_experiment(config)
        if status != 0:
            raise CommandError(
                u"The {} command failed; see the log for details".format(self.command), returncode=status
            )
        self.stdout.write(u"Results written to {}".format(config.output_dir))
