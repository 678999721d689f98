"""
Write the results of a run to its run directory.

Layout of a run directory::

    config.json                          written before any training
    metrics.json                         rewritten after every step
    steps/step-<k>/cleaned/<video>.json  cleaned labels of each anomalous video
    checkpoints/classifier-step-<k>.gcnc
    checkpoints/cleaner-step-<k>.gcnc    (per-video cleaners: checkpoints/step-<k>/<video>.gcnc)
    roc/step-<k>.csv

Cleaned-label files never contain ground truth.
"""
from collections import OrderedDict
import json
import logging
import os

from noisecleaner.cleaner import network
from noisecleaner.evaluation import write_roc_csv

logger = logging.getLogger(__name__)

CONFIG_FILE = 'config.json'
METRICS_FILE = 'metrics.json'


def _floats(values):
    return [float(value) for value in values]


class RunDirectoryWriter(object):
    """
    Single writer of one run directory.
    """

    def __init__(self, root, progress_callback=None):
        """
        Configure where the writer will write data.

        Args:
            root (unicode): The run directory; created if missing.

        Keyword Arguments:
            progress_callback (callable): Callable that accepts the step
                number.  Called once per step written.

        Example usage:
            >>> writer = RunDirectoryWriter('runs/run-seed0')
            >>> writer.write_config(config.to_dict())
            >>> api.run(config.alternation, train, evaluation, on_step=writer.write_step)

        """
        self.root = root
        self._progress_callback = progress_callback
        self._metrics = []

    def path(self, *parts):
        return os.path.join(self.root, *parts)

    def _ensure_parent(self, path):
        parent = os.path.dirname(path)
        if parent and not os.path.isdir(parent):
            os.makedirs(parent)
        return path

    def write_json(self, relative_path, document, sort_keys=False):
        """
        Write `document` as indented JSON below the run directory.

        Returns:
            unicode: The path written.

        """
        path = self._ensure_parent(self.path(relative_path))
        with open(path, 'w') as json_file:
            json.dump(document, json_file, indent=2, sort_keys=sort_keys)
            json_file.write('\n')
        return path

    def write_roc(self, name, curve):
        """
        Write `roc/<name>.csv`.
        """
        path = self._ensure_parent(self.path('roc', u"{}.csv".format(name)))
        write_roc_csv(curve, path)
        return path

    def write_config(self, snapshot):
        """
        Snapshot the full run configuration.  Must come before any training.
        """
        path = self.write_json(CONFIG_FILE, snapshot, sort_keys=True)
        logger.info(u"Run directory {}: configuration written".format(self.root))
        return path

    def write_metrics(self, extra=None):
        """
        Rewrite `metrics.json` from the steps recorded so far.
        """
        document = OrderedDict([('steps', self._metrics)])
        if extra:
            document.update(extra)
        return self.write_json(METRICS_FILE, document)

    def write_step(self, record, classifier=None, outcome=None):
        """
        Persist one step of an alternation run.

        Fits the `on_step` callback of the alternation.  The paths of the
        checkpoints written are stored in `record.checkpoints`.

        Args:
            record (StepRecord)

        Keyword Arguments:
            classifier (SnippetClassifier): Checkpointed if it can be saved.
            outcome (CleaningOutcome): None at step 1.

        """
        step_name = u"step-{}".format(record.step)

        if outcome is not None:
            for video_id, labels in outcome.labels.items():
                noisy = outcome.noisy.get(video_id)
                document = OrderedDict([
                    ('video_id', video_id),
                    ('step', record.step),
                    ('cleaned', _floats(labels)),
                ])
                if noisy is not None:
                    document['noisy_mean'] = _floats(noisy.mean)
                    document['noisy_variance'] = _floats(noisy.variance)
                    document['n_samples'] = noisy.n_samples
                self.write_json(os.path.join('steps', step_name, 'cleaned', u"{}.json".format(video_id)), document)

        if classifier is not None and hasattr(classifier, 'save'):
            path = self._ensure_parent(self.path('checkpoints', u"classifier-{}.gcnc".format(step_name)))
            classifier.save(path)
            record.checkpoints['classifier'] = path

        if outcome is not None and outcome.params is not None:
            if isinstance(outcome.params, dict):
                paths = OrderedDict()
                for video_id, params in outcome.params.items():
                    path = self._ensure_parent(self.path('checkpoints', step_name, u"{}.gcnc".format(video_id)))
                    network.save_params(params, path)
                    paths[video_id] = path
                record.checkpoints['cleaners'] = paths
            else:
                path = self._ensure_parent(self.path('checkpoints', u"cleaner-{}.gcnc".format(step_name)))
                network.save_params(outcome.params, path)
                record.checkpoints['cleaner'] = path

        self.write_roc(step_name, record.evaluation.roc)

        self._metrics.append(record.metrics())
        self.write_metrics()

        if self._progress_callback is not None:
            self._progress_callback(record.step)
