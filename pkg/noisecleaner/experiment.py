"""
Execute a validated run configuration.

`run_experiment` is what the management commands call; it never raises for
bad input or a failed run, it logs the reason and returns a non-zero exit
status instead.
"""
from collections import OrderedDict
from dataclasses import replace
import logging
import os

from noisecleaner.alternation import api
from noisecleaner.classifier.builtin import BuiltinSnippetClassifier
from noisecleaner.data import RunDirectoryWriter
from noisecleaner.errors import ConfigRequestError, NoiseCleanerError
from noisecleaner.fileio.api import load_dataset
from noisecleaner.schema import ABLATION_GRID
from noisecleaner.synthdata import export_dataset, generate, standard_benchmark

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1

ABLATION_FILE = 'ablation.json'


def _synthetic_pair(synthetic):
    evaluation = replace(synthetic, seed=synthetic.seed + 1, id_prefix=u"eval")
    if evaluation.id_prefix == synthetic.id_prefix:
        evaluation = replace(evaluation, id_prefix=u"eval-{}".format(synthetic.seed + 1))
    return generate(synthetic), generate(evaluation)


def load_data(config):
    """
    Training and evaluation videos for a run.

    Feature files named by the configuration win, then the synthetic
    configuration, then the standard benchmark at the run's seed.

    Returns:
        tuple of (train dataset, eval dataset); the train dataset is None
        when only an eval dataset was given.

    """
    if config.eval_dataset:
        train = load_dataset(config.dataset) if config.dataset else None
        return train, load_dataset(config.eval_dataset)
    if config.synthetic is not None:
        return _synthetic_pair(config.synthetic)
    train, evaluation, __ = standard_benchmark(config.seed)
    logger.info(u"Using the standard benchmark, replicate {}".format(config.seed))
    return train, evaluation


def _generate(config, writer):
    if config.synthetic is not None:
        train, evaluation = _synthetic_pair(config.synthetic)
    else:
        train, evaluation, __ = standard_benchmark(config.seed)
    export_dataset(train, writer.path('train'))
    export_dataset(evaluation, writer.path('eval'))
    writer.write_json('dataset.json', OrderedDict([
        ('train', OrderedDict([('n_videos', len(train)), ('n_anomalous', sum(bag.label for bag in train))])),
        ('eval', OrderedDict([('n_videos', len(evaluation)), ('n_anomalous', sum(bag.label for bag in evaluation))])),
    ]))


def _require_training_set(train):
    if train is None:
        raise ConfigRequestError(u"A training dataset is required")
    return train


def _alternate(alternation, train, evaluation, writer):
    history = api.run(alternation, train, evaluation, on_step=writer.write_step)
    final = history[-1].evaluation
    logger.info(u"Finished {} steps: final AUC {:.4f}".format(len(history), final.auc))
    return history


def _run(config, writer):
    train, evaluation = load_data(config)
    alternation = config.alternation
    if config.ablation is not None:
        alternation = config.ablation.apply(alternation)
    _alternate(alternation, _require_training_set(train), evaluation, writer)


def _eval(config, writer):
    __, evaluation = load_data(config)
    classifier = BuiltinSnippetClassifier.load(config.checkpoint)
    result = api.evaluate_classifier(
        classifier, evaluation, config.alternation.eval_threshold, config.alternation.frames_per_snippet
    )
    writer.write_roc(u'eval', result.roc)
    writer.write_json('metrics.json', OrderedDict([
        ('checkpoint', config.checkpoint),
        ('auc', result.auc),
        ('false_alarm_rate', result.false_alarm_rate),
    ]))
    logger.info(u"Checkpoint {}: AUC {:.4f}".format(config.checkpoint, result.auc))


def _ablate(config, writer):
    train, evaluation = load_data(config)
    train = _require_training_set(train)
    if config.ablation is not None:
        variants = OrderedDict([(u'custom', config.ablation)])
    else:
        variants = ABLATION_GRID

    summary = []
    for name, ablation in variants.items():
        logger.info(u"Ablation '{}': {}".format(name, ablation.spec()))
        variant_writer = RunDirectoryWriter(writer.path('variants', name))
        alternation = ablation.apply(config.alternation)
        variant_writer.write_json('ablation.json', OrderedDict([('name', name), ('spec', ablation.spec())]))
        history = _alternate(alternation, train, evaluation, variant_writer)
        summary.append(OrderedDict([
            ('name', name),
            ('spec', ablation.spec()),
            ('auc', [record.evaluation.auc for record in history]),
            ('final_auc', history[-1].evaluation.auc),
        ]))
        writer.write_json(ABLATION_FILE, OrderedDict([('variants', summary)]))


COMMAND_HANDLERS = {
    u'generate': _generate,
    u'run': _run,
    u'eval': _eval,
    u'ablate': _ablate,
}


def run_experiment(config):
    """
    Execute the command of a run configuration.

    The configuration snapshot is written to `config.output_dir` before
    anything else happens.

    Args:
        config (RunConfig)

    Returns:
        int: 0 on success, non-zero if the run failed.

    """
    writer = RunDirectoryWriter(config.output_dir)
    try:
        writer.write_config(config.to_dict())
        COMMAND_HANDLERS[config.command](config, writer)
    except NoiseCleanerError as ex:
        logger.error(u"The {} command failed: {}".format(config.command, ex))
        return EXIT_FAILURE
    except (IOError, OSError):
        logger.exception(u"The {} command could not write to {}".format(config.command, config.output_dir))
        return EXIT_FAILURE
    logger.info(u"The {} command finished; results are in {}".format(
        config.command, os.path.abspath(config.output_dir)
    ))
    return EXIT_OK
