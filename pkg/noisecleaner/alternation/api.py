"""
Public interface for the alternation between the snippet classifier and the noise cleaner.

Step 1 trains the classifier on video-level labels: every snippet of an
anomalous video is a positive.  Each further step

    1. samples the classifier on every anomalous video to get mean
       predictions and their variance,
    2. trains a cleaner on the graphs of those videos, supervised by the
       most confident predictions and by its own running average,
    3. retrains the classifier on the cleaned labels.

Normal videos are never cleaned: their snippets keep target 0 throughout.
At test time only the classifier is used.
"""
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging

import numpy as np

from django.conf import settings

from noisecleaner.classifier.base import TrainingSample
from noisecleaner.classifier.builtin import BuiltinClassifierConfig, BuiltinSnippetClassifier
from noisecleaner.classifier.errors import ClassifierError
from noisecleaner.cleaner import network
from noisecleaner.cleaner.errors import CleanerError
from noisecleaner.cleaner.loss import init_ema, select_high_confidence, total_loss, update_ema
from noisecleaner.cleaner.network import CleanerConfig
from noisecleaner.errors import DatasetError, NumericalError
from noisecleaner.evaluation import auc, expand_to_frames, false_alarm_rate, roc_curve
from noisecleaner.graphs.api import GraphConfig, VideoGraphs
from noisecleaner.graphs.errors import GraphError
from noisecleaner.video import check_dataset

from .errors import AlternationInternalError, AlternationRequestError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlternationConfig:
    """
    Budgets and switches of one alternation run.

    `initial_epochs` and `retrain_epochs` default to the classifier's own
    epoch budget; `jitter` defaults to its `jitter_sigma`.
    """
    n_steps: int = 3
    cleaner_epochs: int = 50
    confidence_fraction: float = 0.5
    ema_alpha: float = 0.6
    classifier: BuiltinClassifierConfig = field(default_factory=BuiltinClassifierConfig)
    seed: int = 0
    initial_epochs: int = None
    retrain_epochs: int = None
    cleaner_lr: float = 1e-3
    n_samples: int = 10
    jitter: float = None
    use_indirect: bool = True
    shared_cleaner: bool = True
    warm_start_cleaner: bool = False
    graphs: GraphConfig = field(default_factory=GraphConfig)
    cleaner: CleanerConfig = field(default_factory=CleanerConfig)
    hard_targets: bool = False
    eval_threshold: float = 0.5
    frames_per_snippet: int = 1

    def validate(self):
        """
        Raises:
            AlternationRequestError: A field is out of range.
        """
        if self.n_steps < 1:
            raise AlternationRequestError(u"n_steps must be at least 1, got {}".format(self.n_steps))
        if self.cleaner_epochs < 1:
            raise AlternationRequestError(u"cleaner_epochs must be at least 1, got {}".format(self.cleaner_epochs))
        if not 0.0 < self.confidence_fraction <= 1.0:
            raise AlternationRequestError(u"confidence_fraction must lie in (0, 1]")
        if not 0.0 <= self.ema_alpha < 1.0:
            raise AlternationRequestError(u"ema_alpha must lie in [0, 1)")
        for name in ('initial_epochs', 'retrain_epochs'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise AlternationRequestError(u"{} must be non-negative, got {}".format(name, value))
        if not self.cleaner_lr > 0:
            raise AlternationRequestError(u"cleaner_lr must be positive, got {}".format(self.cleaner_lr))
        if self.n_samples < 1:
            raise AlternationRequestError(u"n_samples must be at least 1, got {}".format(self.n_samples))
        if self.jitter is not None and self.jitter < 0:
            raise AlternationRequestError(u"jitter must be non-negative, got {}".format(self.jitter))
        if not 0.0 <= self.eval_threshold <= 1.0:
            raise AlternationRequestError(u"eval_threshold must lie in [0, 1]")
        if self.frames_per_snippet < 1:
            raise AlternationRequestError(u"frames_per_snippet must be positive")
        if self.seed < 0:
            raise AlternationRequestError(u"seed must be unsigned, got {}".format(self.seed))
        try:
            self.classifier.validate()
            self.graphs.validate()
            # raw_dim is only known once the data is.
            replace(self.cleaner, raw_dim=self.cleaner.raw_dim or 1).validate()
        except (ClassifierError, GraphError, CleanerError) as ex:
            raise AlternationRequestError(str(ex))
        return self

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        nested = (('classifier', BuiltinClassifierConfig), ('graphs', GraphConfig), ('cleaner', CleanerConfig))
        for name, config_class in nested:
            if isinstance(values.get(name), dict):
                values[name] = config_class.from_dict(values[name])
        return cls(**values)


@dataclass(frozen=True)
class Evaluation:
    auc: float
    false_alarm_rate: float
    roc: object


@dataclass
class StepRecord:
    """
    What happened at one step.

    `targets` are the per-snippet training targets the classifier was fitted
    to at this step and `cleaned` the cleaner outputs (empty at step 1).
    `checkpoints` is filled in by whoever persists the step.
    """
    step: int
    targets: OrderedDict
    cleaned: OrderedDict
    evaluation: Evaluation
    checkpoints: dict = field(default_factory=dict)

    def metrics(self):
        return OrderedDict([
            ('step', self.step),
            ('auc', self.evaluation.auc),
            ('false_alarm_rate', self.evaluation.false_alarm_rate),
            ('n_cleaned_videos', len(self.cleaned)),
        ])


class AlternationHistory(object):
    """
    Append-only sequence of step records, numbered from 1.
    """

    def __init__(self):
        self._records = []

    def append(self, record):
        if record.step != len(self._records) + 1:
            raise AlternationInternalError(u"Expected step {}, got {}".format(len(self._records) + 1, record.step))
        self._records.append(record)

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __getitem__(self, index):
        return self._records[index]

    def metrics(self):
        return [record.metrics() for record in self._records]


@dataclass
class CleaningOutcome:
    """
    Result of one clean stage.

    `labels` maps each anomalous video id to its cleaned snippet
    probabilities.  `params` is the shared cleaner, or a mapping of video id
    to cleaner in per-video mode.
    """
    labels: OrderedDict
    params: object = None
    noisy: OrderedDict = field(default_factory=OrderedDict)


def derive_seed(*keys):
    """
    A 32-bit seed that depends on every key.
    """
    return int(np.random.SeedSequence([int(key) for key in keys]).generate_state(1)[0])


def _worker_count():
    if not settings.configured:
        return 1
    return max(1, int(getattr(settings, 'NCK_THREADS', 1)))


def build_targets(dataset, cleaned=None, hard_targets=False):
    """
    Per-snippet training targets for every video.

    Normal videos get all zeros.  Anomalous videos get their cleaned labels,
    or all ones when `cleaned` is None (video-level supervision).

    Raises:
        AlternationRequestError: Cleaned labels are missing or of the wrong
            length for an anomalous video.

    """
    samples = []
    for bag in dataset:
        if not bag.is_anomalous:
            targets = np.zeros(bag.n_snippets)
        elif cleaned is None:
            targets = np.ones(bag.n_snippets)
        else:
            if bag.video_id not in cleaned:
                raise AlternationRequestError(u"No cleaned labels for anomalous video '{}'".format(bag.video_id))
            targets = np.asarray(cleaned[bag.video_id], dtype=np.float64)
            if targets.shape != (bag.n_snippets,):
                raise AlternationRequestError(u"Cleaned labels of '{}' have shape {}, expected ({},)".format(
                    bag.video_id, targets.shape, bag.n_snippets
                ))
            if hard_targets:
                targets = (targets >= 0.5).astype(np.float64)
        samples.append(TrainingSample(bag.video_id, bag.features, targets))
    return samples


class _VideoProblem(object):
    """
    Everything the cleaner needs from one anomalous video.
    """

    def __init__(self, bag, noisy, config):
        self.video_id = bag.video_id
        self.features = bag.features
        self.noisy = noisy
        self.confident = select_high_confidence(noisy, config.confidence_fraction)
        self.ema = init_ema(noisy, config.ema_alpha)
        self.graphs = VideoGraphs(bag.features, config.graphs)

    def operators(self, params):
        branches = params.config.branches
        return [self.graphs.operator(branch) if branch in branches else None for branch in ('feature', 'temporal')]

    def train_epoch(self, params, config):
        trace = network.forward(self.features, *self.operators(params), params=params)
        loss, grad_p = total_loss(trace.p, self.noisy, self.confident, self.ema, use_indirect=config.use_indirect)
        network.apply_update(params, network.backward(trace, params, grad_p), config.cleaner_lr)
        update_ema(self.ema, trace.p)
        return loss

    def predict(self, params):
        return network.forward(self.features, *self.operators(params), params=params).p


def _fresh_params(config, feature_dim, *seed_keys):
    cleaner_config = replace(config.cleaner, raw_dim=feature_dim, seed=derive_seed(config.seed, *seed_keys))
    return network.init_params(cleaner_config)


def _train_shared(problems, config, params):
    for epoch in range(config.cleaner_epochs):
        losses = [problem.train_epoch(params, config) for problem in problems]
        logger.debug(u"Cleaner epoch {}: mean loss {:.6f}".format(epoch + 1, float(np.mean(losses))))
    return OrderedDict((problem.video_id, problem.predict(params)) for problem in problems)


def _train_single(problem, config, params):
    for epoch in range(config.cleaner_epochs):
        loss = problem.train_epoch(params, config)
        logger.debug(u"Cleaner for '{}' epoch {}: loss {:.6f}".format(problem.video_id, epoch + 1, loss))
    return problem.predict(params)


def clean_stage(classifier, dataset, config, step=2, params=None):
    """
    Clean the snippet labels of every anomalous video.

    Args:
        classifier (SnippetClassifier): Trained at least once.
        dataset (list of VideoBag)
        config (AlternationConfig)

    Keyword Arguments:
        step (int): Step number, used to derive sampling and initialization seeds.
        params (CleanerParams or dict): Cleaner(s) to continue from when
            `config.warm_start_cleaner` is set.

    Returns:
        CleaningOutcome; normal videos are absent from its labels.

    Raises:
        AlternationRequestError: Invalid input.
        AlternationInternalError: The cleaner failed numerically.

    """
    jitter = config.classifier.jitter_sigma if config.jitter is None else config.jitter
    anomalous = [(index, bag) for index, bag in enumerate(dataset) if bag.is_anomalous]
    if not anomalous:
        logger.info(u"Step {}: no anomalous videos to clean".format(step))
        return CleaningOutcome(labels=OrderedDict())

    try:
        problems = [
            _VideoProblem(bag, classifier.predict_sampled(
                bag.features, config.n_samples, jitter=jitter, seed=[config.seed, step, index]
            ), config)
            for index, bag in anomalous
        ]
        feature_dim = anomalous[0][1].feature_dim
        warm = params if config.warm_start_cleaner else None

        if config.shared_cleaner:
            shared = warm.copy() if warm is not None else _fresh_params(config, feature_dim, step)
            labels = _train_shared(problems, config, shared)
            outcome_params = shared
        else:
            cleaners = OrderedDict(
                (problem.video_id, warm[problem.video_id].copy() if warm and problem.video_id in warm
                 else _fresh_params(config, feature_dim, step, index))
                for (index, __), problem in zip(anomalous, problems)
            )
            with ThreadPoolExecutor(max_workers=_worker_count()) as executor:
                futures = [
                    executor.submit(_train_single, problem, config, cleaners[problem.video_id])
                    for problem in problems
                ]
                labels = OrderedDict((problem.video_id, future.result()) for problem, future in zip(problems, futures))
            outcome_params = cleaners
    except (CleanerError, GraphError, ClassifierError) as ex:
        logger.warning(u"Step {}: invalid input to the clean stage: {}".format(step, ex))
        raise AlternationRequestError(str(ex))
    except NumericalError as ex:
        logger.exception(u"Step {}: cleaner training diverged".format(step))
        raise AlternationInternalError(str(ex)) from ex

    logger.info(u"Step {}: cleaned {} anomalous videos".format(step, len(labels)))
    noisy = OrderedDict((problem.video_id, problem.noisy) for problem in problems)
    return CleaningOutcome(labels=labels, params=outcome_params, noisy=noisy)


def classify_stage(classifier, dataset, cleaned, config):
    """
    Retrain the classifier from its current state on cleaned labels.

    Normal videos are trained towards 0 and anomalous videos towards their
    cleaned labels, for `config.retrain_epochs` epochs.

    Returns:
        list of TrainingSample actually used.

    Raises:
        AlternationRequestError: Cleaned labels are missing for an anomalous video.

    """
    samples = build_targets(dataset, cleaned, hard_targets=config.hard_targets)
    try:
        classifier.train(samples, epochs=config.retrain_epochs)
    except ClassifierError as ex:
        logger.warning(u"Could not retrain the classifier: {}".format(ex))
        raise AlternationRequestError(str(ex))
    return samples


def evaluate_classifier(classifier, eval_set, threshold=0.5, frames_per_snippet=1):
    """
    Score held-out videos with the classifier alone.

    Returns:
        Evaluation with the AUC, the false-alarm rate at `threshold` and the
        ROC curve over all snippets (or frames).

    Raises:
        AlternationRequestError: A video lacks ground truth, or the set does
            not contain both classes.

    """
    scores, labels = [], []
    for bag in eval_set:
        if bag.ground_truth is None:
            raise AlternationRequestError(u"Evaluation video '{}' has no ground truth".format(bag.video_id))
        scores.append(classifier.predict(bag.features))
        labels.append(bag.ground_truth)
    if not scores:
        raise AlternationRequestError(u"The evaluation set is empty")
    scores, labels = expand_to_frames(np.concatenate(scores), np.concatenate(labels), frames_per_snippet)
    if labels.all() or not labels.any():
        raise AlternationRequestError(u"The evaluation set needs both anomalous and normal snippets")
    return Evaluation(
        auc=auc(scores, labels),
        false_alarm_rate=false_alarm_rate(scores, labels, threshold),
        roc=roc_curve(scores, labels),
    )


def _targets_by_video(samples):
    return OrderedDict((sample.video_id, sample.targets) for sample in samples)


def _check_training_set(dataset):
    try:
        check_dataset(dataset)
    except DatasetError as ex:
        raise AlternationRequestError(str(ex))
    labels = {bag.label for bag in dataset}
    if labels != {0, 1}:
        raise AlternationRequestError(u"The training set needs at least one anomalous and one normal video")


def run(config, dataset, eval_set, classifier=None, on_step=None):
    """
    Run the whole alternation and evaluate the classifier after every step.

    Args:
        config (AlternationConfig)
        dataset (list of VideoBag): Training videos; ground truth, if any,
            is ignored.
        eval_set (list of VideoBag): Held-out videos with ground truth.

    Keyword Arguments:
        classifier (SnippetClassifier): Defaults to a fresh builtin
            classifier configured by `config.classifier`.
        on_step (callable): Called as on_step(record, classifier, outcome)
            after each step; `outcome` is None at step 1.

    Returns:
        AlternationHistory with one record per step.

    Raises:
        AlternationRequestError
        AlternationInternalError

    """
    config.validate()
    _check_training_set(dataset)
    if classifier is None:
        classifier = BuiltinSnippetClassifier(config.classifier)
    history = AlternationHistory()

    def finish(step, samples, cleaned, outcome):
        evaluation = evaluate_classifier(classifier, eval_set, config.eval_threshold, config.frames_per_snippet)
        record = StepRecord(step=step, targets=_targets_by_video(samples), cleaned=cleaned, evaluation=evaluation)
        history.append(record)
        logger.info(u"Step {}: AUC {:.4f}, false-alarm rate {:.4f}".format(
            step, evaluation.auc, evaluation.false_alarm_rate
        ))
        if on_step is not None:
            on_step(record, classifier, outcome)

    logger.info(u"Step 1: training on video-level labels")
    samples = build_targets(dataset)
    try:
        classifier.train(samples, epochs=config.initial_epochs)
    except ClassifierError as ex:
        raise AlternationRequestError(str(ex))
    finish(1, samples, OrderedDict(), None)

    params = None
    for step in range(2, config.n_steps + 1):
        logger.info(u"Step {}: cleaning and retraining".format(step))
        outcome = clean_stage(classifier, dataset, config, step=step, params=params)
        params = outcome.params
        samples = classify_stage(classifier, dataset, outcome.labels, config)
        finish(step, samples, outcome.labels, outcome)
    return history
