"""
Schema for validating and defaulting run configurations.

A run configuration is a JSON document; command-line flags are laid over it
before validation.  Structural problems are reported by the schema, range
problems by the `validate()` method of each module configuration.
"""
from collections import OrderedDict
from dataclasses import asdict, dataclass, field, replace
import json
import logging
import os

from voluptuous import All, Any, Coerce, In, Invalid, Length, MultipleInvalid, Range, Required, Schema

from django.conf import settings

from noisecleaner.alternation.api import AlternationConfig
from noisecleaner.alternation.errors import AlternationRequestError
from noisecleaner.classifier.errors import ClassifierError
from noisecleaner.cleaner.errors import CleanerError
from noisecleaner.errors import ConfigRequestError, SyntheticDataRequestError
from noisecleaner.graphs.api import BRANCHES
from noisecleaner.graphs.errors import GraphError
from noisecleaner.nn import ACTIVATIONS
from noisecleaner.optim import OPTIMIZERS
from noisecleaner.synthdata import SyntheticConfig

logger = logging.getLogger(__name__)

COMMANDS = [
    u'generate',
    u'run',
    u'eval',
    u'ablate',
]

BRANCH_OPTIONS = list(BRANCHES) + [u'both']


def utf8_validator(value):
    """Validate and sanitize unicode strings.
    If we're given a bytestring, assume that the encoding is UTF-8

    Args:
        value: The value to validate

    Returns:
        unicode

    Raises:
        Invalid

    """
    try:
        if isinstance(value, bytes):
            return value.decode('utf-8')
        if isinstance(value, str):
            return value
    except (ValueError, TypeError):
        pass
    raise Invalid(u"Could not load unicode from value \"{val}\"".format(val=value))


def unsigned_validator(value):
    """Accept non-negative integers, but not booleans.

    Raises:
        Invalid

    """
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise Invalid(u"Expected a non-negative integer, got \"{val}\"".format(val=value))
    return value


def ablation_validator(value):
    """Validate an ablation spec string, returning it unchanged.

    Raises:
        Invalid

    """
    value = utf8_validator(value)
    try:
        parse_ablation_spec(value)
    except ConfigRequestError as ex:
        raise Invalid(str(ex))
    return value


REAL = Coerce(float)
COUNT = All(int, Range(min=0))
OPTIONAL_REAL = Any(None, REAL)
PATH = Any(None, utf8_validator)

CLASSIFIER_SCHEMA = Schema({
    'hidden_width': COUNT,
    'epochs': COUNT,
    'lr': REAL,
    'jitter_sigma': REAL,
    'hidden_activation': In(list(ACTIVATIONS)),
    'hard_targets': bool,
})

GRAPHS_SCHEMA = Schema({
    'symmetrize_similarity': bool,
    'feature_constant': OPTIONAL_REAL,
    'temporal_constant': OPTIONAL_REAL,
})

CLEANER_SCHEMA = Schema({
    'comp_dims': All([All(int, Range(min=1))], Length(min=2, max=2)),
    'gcn_hidden': COUNT,
    'gcn_layers_per_branch': COUNT,
    'hidden_activation': In(list(ACTIVATIONS)),
    'branches': All([In(list(BRANCHES))], Length(min=1)),
    'optimizer': In(list(OPTIMIZERS)),
})

ALTERNATION_SCHEMA = Schema({
    'n_steps': COUNT,
    'cleaner_epochs': COUNT,
    'confidence_fraction': REAL,
    'ema_alpha': REAL,
    'initial_epochs': Any(None, COUNT),
    'retrain_epochs': Any(None, COUNT),
    'cleaner_lr': REAL,
    'n_samples': COUNT,
    'jitter': OPTIONAL_REAL,
    'use_indirect': bool,
    'shared_cleaner': bool,
    'warm_start_cleaner': bool,
    'hard_targets': bool,
    'eval_threshold': REAL,
    'frames_per_snippet': COUNT,
    'classifier': CLASSIFIER_SCHEMA,
    'graphs': GRAPHS_SCHEMA,
    'cleaner': CLEANER_SCHEMA,
})

SYNTHETIC_SCHEMA = Schema({
    'n_videos': COUNT,
    'anomaly_video_fraction': REAL,
    'snippets_per_video': All([COUNT], Length(min=2, max=2)),
    'anomaly_segment_fraction': REAL,
    'feature_dim': COUNT,
    'class_separation': REAL,
    'feature_noise_sigma': REAL,
    'seed': unsigned_validator,
    'n_segments': COUNT,
    'scene_shift': REAL,
    'scene_rate_normal': REAL,
    'context_sigma': REAL,
    'id_prefix': utf8_validator,
})

RUN_CONFIG_SCHEMA = Schema({
    Required('command'): In(COMMANDS),
    Required('seed', default=0): unsigned_validator,
    Required('output_dir', default=None): PATH,
    Required('dataset', default=None): PATH,
    Required('eval_dataset', default=None): PATH,
    Required('checkpoint', default=None): PATH,
    Required('synthetic', default=None): Any(None, SYNTHETIC_SCHEMA),
    Required('alternation', default=dict): ALTERNATION_SCHEMA,
    Required('ablation', default=None): Any(None, ablation_validator),
})


@dataclass(frozen=True)
class AblationConfig:
    """
    One ablation variant: which cleaner branches are kept, whether their
    graphs are replaced by a constant, and whether the indirect term is used.
    """
    branch: str = u'both'
    graph_constant: float = None
    indirect: bool = True

    def validate(self):
        if self.branch not in BRANCH_OPTIONS:
            raise ConfigRequestError(u"Unknown branch '{}', expected one of {}".format(self.branch, BRANCH_OPTIONS))
        if self.graph_constant is not None and not 0.0 < self.graph_constant <= 1.0:
            raise ConfigRequestError(u"A constant graph must lie in (0, 1], got {}".format(self.graph_constant))
        return self

    @property
    def branches(self):
        return tuple(BRANCHES) if self.branch == u'both' else (self.branch,)

    def apply(self, config):
        """
        The alternation configuration with this variant switched on.

        Args:
            config (AlternationConfig)

        Returns:
            AlternationConfig

        """
        graphs = config.graphs
        if self.graph_constant is not None:
            constants = {
                '{}_constant'.format(branch): self.graph_constant for branch in self.branches
            }
            graphs = replace(graphs, **constants)
        return replace(
            config,
            graphs=graphs,
            cleaner=replace(config.cleaner, branches=self.branches),
            use_indirect=config.use_indirect and self.indirect,
        )

    def spec(self):
        """
        The `--ablate` string describing this variant.
        """
        parts = [u"branch={}".format(self.branch)]
        if self.graph_constant is not None:
            parts.append(u"graph=constant:{}".format(self.graph_constant))
        parts.append(u"indirect={}".format(u'on' if self.indirect else u'off'))
        return u",".join(parts)


# Single-branch variants also drop the indirect term.
ABLATION_GRID = OrderedDict([
    (u'both', AblationConfig()),
    (u'feature', AblationConfig(branch=u'feature', indirect=False)),
    (u'temporal', AblationConfig(branch=u'temporal', indirect=False)),
    (u'feature-constant', AblationConfig(branch=u'feature', graph_constant=0.5, indirect=False)),
    (u'temporal-constant', AblationConfig(branch=u'temporal', graph_constant=0.5, indirect=False)),
    (u'no-indirect', AblationConfig(indirect=False)),
])


def _parse_graph(value):
    kind, __, constant = value.partition(u':')
    if kind != u'constant' or not constant:
        raise ConfigRequestError(u"Graph replacement must read 'constant:<value>', got '{}'".format(value))
    try:
        return float(constant)
    except ValueError:
        raise ConfigRequestError(u"'{}' is not a number".format(constant))


def parse_ablation_spec(spec):
    """
    Parse an ablation spec such as ``branch=temporal,graph=constant:0.5,indirect=off``.

    Keys may appear in any order and each at most once; missing keys keep
    their defaults.

    Returns:
        AblationConfig

    Raises:
        ConfigRequestError: Unknown key, duplicated key or bad value.

    """
    values = {}
    for item in filter(None, (part.strip() for part in spec.split(u','))):
        key, sep, value = item.partition(u'=')
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ConfigRequestError(u"Ablation setting '{}' must read key=value".format(item))
        if key in values:
            raise ConfigRequestError(u"Ablation key '{}' is given twice".format(key))
        if key == u'branch':
            values[key] = value
        elif key == u'graph':
            values[key] = _parse_graph(value)
        elif key == u'indirect':
            if value not in (u'on', u'off'):
                raise ConfigRequestError(u"indirect must be 'on' or 'off', got '{}'".format(value))
            values[key] = value
        else:
            raise ConfigRequestError(u"Unknown ablation key '{}'".format(key))
    return AblationConfig(
        branch=values.get(u'branch', u'both'),
        graph_constant=values.get(u'graph'),
        indirect=values.get(u'indirect', u'on') == u'on',
    ).validate()


@dataclass(frozen=True)
class RunConfig:
    """
    A validated run configuration.

    `synthetic` is None when the command should use the standard benchmark
    (or the feature files named by `dataset` and `eval_dataset`).
    """
    command: str
    seed: int
    output_dir: str
    alternation: AlternationConfig = field(default_factory=AlternationConfig)
    dataset: str = None
    eval_dataset: str = None
    checkpoint: str = None
    synthetic: SyntheticConfig = None
    ablation: AblationConfig = None

    def to_dict(self):
        """
        JSON-ready snapshot of every setting, defaults included.
        """
        return OrderedDict([
            ('command', self.command),
            ('seed', self.seed),
            ('output_dir', self.output_dir),
            ('dataset', self.dataset),
            ('eval_dataset', self.eval_dataset),
            ('checkpoint', self.checkpoint),
            ('synthetic', asdict(self.synthetic) if self.synthetic is not None else None),
            ('alternation', asdict(self.alternation)),
            ('ablation', self.ablation.spec() if self.ablation is not None else None),
        ])


def default_output_dir(command, seed):
    root = getattr(settings, 'NCK_DEFAULT_OUTPUT_DIR', 'runs') if settings.configured else 'runs'
    return os.path.join(root, u"{}-seed{}".format(command, seed))


def _set_nested(document, path, value):
    keys = path.split('.')
    for key in keys[:-1]:
        document = document.setdefault(key, {})
    document[keys[-1]] = value


def _read_document(path):
    try:
        with open(path) as config_file:
            document = json.load(config_file)
    except (IOError, OSError) as ex:
        raise ConfigRequestError(u"Could not read config file '{}': {}".format(path, ex))
    except ValueError as ex:
        raise ConfigRequestError(u"Config file '{}' is not valid JSON: {}".format(path, ex))
    if not isinstance(document, dict):
        raise ConfigRequestError(u"Config file '{}' must hold a JSON object".format(path))
    return document


def _seeded_alternation(values, seed):
    values = dict(values)
    values['seed'] = seed
    values['classifier'] = dict(values.get('classifier', {}), seed=seed)
    return AlternationConfig.from_dict(values)


def _check_command(config):
    if config.command == u'eval' and not config.checkpoint:
        raise ConfigRequestError(u"The eval command needs a classifier checkpoint")
    if config.dataset and not config.eval_dataset and config.command != u'generate':
        raise ConfigRequestError(u"A feature-file dataset needs an eval dataset as well")
    if config.command == u'generate' and (config.dataset or config.eval_dataset):
        raise ConfigRequestError(u"The generate command produces data; it does not read a dataset")


def validate_run_config(document):
    """
    Validate a run-configuration document and build the typed configuration.

    The top-level seed is the seed of the alternation, of the classifier and
    of the synthetic data (unless the synthetic block sets its own).

    Args:
        document (dict): Parsed JSON, CLI overrides already applied.

    Returns:
        RunConfig

    Raises:
        ConfigRequestError

    """
    try:
        values = RUN_CONFIG_SCHEMA(document)
    except MultipleInvalid as ex:
        logger.warning(u"Rejected run configuration: {}".format(ex))
        raise ConfigRequestError(u"Invalid run configuration: {}".format(ex))

    seed = values['seed']
    try:
        alternation = _seeded_alternation(values['alternation'], seed).validate()
        synthetic = None
        if values['synthetic'] is not None:
            synthetic = SyntheticConfig.from_dict(dict({'seed': seed}, **values['synthetic'])).validate()
    except (AlternationRequestError, ClassifierError, CleanerError, GraphError, SyntheticDataRequestError) as ex:
        logger.warning(u"Rejected run configuration: {}".format(ex))
        raise ConfigRequestError(str(ex))

    ablation = parse_ablation_spec(values['ablation']) if values['ablation'] else None
    config = RunConfig(
        command=values['command'],
        seed=seed,
        output_dir=values['output_dir'] or default_output_dir(values['command'], seed),
        alternation=alternation,
        dataset=values['dataset'],
        eval_dataset=values['eval_dataset'],
        checkpoint=values['checkpoint'],
        synthetic=synthetic,
        ablation=ablation,
    )
    _check_command(config)
    return config


# Flag name -> location in the run-configuration document.
OVERRIDE_PATHS = OrderedDict([
    ('seed', 'seed'),
    ('output_dir', 'output_dir'),
    ('dataset', 'dataset'),
    ('eval_dataset', 'eval_dataset'),
    ('checkpoint', 'checkpoint'),
    ('steps', 'alternation.n_steps'),
    ('confidence_fraction', 'alternation.confidence_fraction'),
    ('ema_alpha', 'alternation.ema_alpha'),
    ('symmetrize_similarity', 'alternation.graphs.symmetrize_similarity'),
    ('hard_targets', 'alternation.hard_targets'),
    ('ablate', 'ablation'),
])


def load_run_config(command, path=None, **overrides):
    """
    Read a run configuration and lay command-line values over it.

    Args:
        command (unicode): One of `COMMANDS`.

    Keyword Arguments:
        path (unicode): JSON file to start from; all defaults if None.
        **overrides: Values of the flags in `OVERRIDE_PATHS`, plus the
            `branch` and `graph` shorthands.  None means "not given".

    Returns:
        RunConfig

    Raises:
        ConfigRequestError

    """
    document = _read_document(path) if path else {}
    document['command'] = command
    for name, location in OVERRIDE_PATHS.items():
        value = overrides.get(name)
        if value is not None and value is not False:
            _set_nested(document, location, value)

    shorthands = [
        u"{}={}".format(key, overrides[name])
        for name, key in (('branch', u'branch'), ('graph', u'graph'))
        if overrides.get(name)
    ]
    if shorthands:
        if document.get('ablation'):
            raise ConfigRequestError(u"--branch and --graph cannot be combined with an ablation spec")
        document['ablation'] = u",".join(shorthands)
    return validate_run_config(document)
