"""
Tests for run-configuration validation and ablation specs.
"""
import json
import os
import shutil
import tempfile

import ddt

from django.test.utils import override_settings

from noisecleaner.alternation.api import AlternationConfig
from noisecleaner.errors import ConfigRequestError
from noisecleaner.schema import (ABLATION_GRID, AblationConfig, load_run_config, parse_ablation_spec,
                                 validate_run_config)
from noisecleaner.test_utils import NumericTestCase


@ddt.ddt
class AblationSpecTest(NumericTestCase):

    @ddt.unpack
    @ddt.data(
        ('branch=temporal', 'temporal', None, True),
        ('branch=feature,graph=constant:0.5', 'feature', 0.5, True),
        ('graph=constant:0.25, indirect=off', 'both', 0.25, False),
        ('indirect=on,branch=both', 'both', None, True),
        ('', 'both', None, True),
    )
    def test_parse(self, spec, branch, graph_constant, indirect):
        self.assertEqual(parse_ablation_spec(spec), AblationConfig(branch, graph_constant, indirect))

    @ddt.data(
        'branch=sideways',
        'graph=identity',
        'graph=constant:',
        'graph=constant:high',
        'graph=constant:1.5',
        'indirect=maybe',
        'colour=red',
        'branch',
        'branch=feature,branch=temporal',
    )
    def test_rejected(self, spec):
        with self.assertRaises(ConfigRequestError):
            parse_ablation_spec(spec)

    def test_spec_round_trip(self):
        for ablation in ABLATION_GRID.values():
            self.assertEqual(parse_ablation_spec(ablation.spec()), ablation)

    def test_single_branch_with_constant_graph(self):
        config = parse_ablation_spec('branch=temporal,graph=constant:0.5').apply(AlternationConfig())
        self.assertEqual(config.cleaner.branches, ('temporal',))
        self.assertEqual(config.graphs.temporal_constant, 0.5)
        self.assertIsNone(config.graphs.feature_constant)
        self.assertTrue(config.use_indirect)

    def test_both_branches_constant(self):
        config = AblationConfig(graph_constant=0.5).apply(AlternationConfig())
        self.assertEqual(config.cleaner.branches, ('feature', 'temporal'))
        self.assertEqual((config.graphs.feature_constant, config.graphs.temporal_constant), (0.5, 0.5))

    def test_no_indirect(self):
        self.assertFalse(ABLATION_GRID['no-indirect'].apply(AlternationConfig()).use_indirect)

    def test_indirect_stays_off(self):
        config = AblationConfig().apply(AlternationConfig(use_indirect=False))
        self.assertFalse(config.use_indirect)

    @ddt.data('feature', 'temporal', 'feature-constant', 'temporal-constant')
    def test_single_branch_variants_drop_indirect(self, name):
        config = ABLATION_GRID[name].apply(AlternationConfig())
        self.assertEqual(len(config.cleaner.branches), 1)
        self.assertFalse(config.use_indirect)
        self.assertTrue(ABLATION_GRID[name].spec().endswith('indirect=off'))

    def test_both_keeps_indirect(self):
        self.assertTrue(ABLATION_GRID['both'].apply(AlternationConfig()).use_indirect)

    def test_grid(self):
        self.assertEqual(
            list(ABLATION_GRID), ['both', 'feature', 'temporal', 'feature-constant', 'temporal-constant', 'no-indirect']
        )


@ddt.ddt
class RunConfigTest(NumericTestCase):

    def setUp(self):
        super(RunConfigTest, self).setUp()
        self.workdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.workdir)

    def write(self, content):
        path = os.path.join(self.workdir, 'config.json')
        with open(path, 'w') as config_file:
            config_file.write(content)
        return path

    def test_defaults(self):
        config = validate_run_config({'command': 'run'})
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.alternation, AlternationConfig())
        self.assertIsNone(config.synthetic)
        self.assertIsNone(config.ablation)

    @override_settings(NCK_DEFAULT_OUTPUT_DIR='/tmp/nck-runs')
    def test_default_output_dir(self):
        config = validate_run_config({'command': 'ablate', 'seed': 4})
        self.assertEqual(config.output_dir, os.path.join('/tmp/nck-runs', 'ablate-seed4'))

    def test_seed_propagates(self):
        config = validate_run_config({'command': 'run', 'seed': 9, 'synthetic': {'n_videos': 10}})
        self.assertEqual(config.alternation.seed, 9)
        self.assertEqual(config.alternation.classifier.seed, 9)
        self.assertEqual(config.synthetic.seed, 9)

    def test_synthetic_seed_kept(self):
        config = validate_run_config({'command': 'run', 'seed': 9, 'synthetic': {'seed': 2}})
        self.assertEqual(config.synthetic.seed, 2)

    def test_nested_values(self):
        config = validate_run_config({
            'command': 'run',
            'alternation': {
                'n_steps': 4,
                'confidence_fraction': 1,
                'graphs': {'symmetrize_similarity': True},
                'cleaner': {'comp_dims': [16, 8], 'branches': ['temporal']},
                'classifier': {'hidden_width': 5},
            },
        })
        self.assertEqual(config.alternation.n_steps, 4)
        self.assertEqual(config.alternation.confidence_fraction, 1.0)
        self.assertTrue(config.alternation.graphs.symmetrize_similarity)
        self.assertEqual(config.alternation.cleaner.comp_dims, (16, 8))
        self.assertEqual(config.alternation.cleaner.branches, ('temporal',))
        self.assertEqual(config.alternation.classifier.hidden_width, 5)

    @ddt.data(
        {},
        {'command': 'train'},
        {'command': 'run', 'seed': -1},
        {'command': 'run', 'seed': True},
        {'command': 'run', 'epochs': 3},
        {'command': 'run', 'alternation': {'n_steps': 'three'}},
        {'command': 'run', 'alternation': {'n_steps': 0}},
        {'command': 'run', 'alternation': {'ema_alpha': 1.0}},
        {'command': 'run', 'alternation': {'cleaner': {'comp_dims': [8]}}},
        {'command': 'run', 'alternation': {'cleaner': {'branches': []}}},
        {'command': 'run', 'alternation': {'graphs': {'feature_constant': 2.0}}},
        {'command': 'run', 'alternation': {'classifier': {'seed': 1}}},
        {'command': 'run', 'synthetic': {'anomaly_segment_fraction': 0.0}},
        {'command': 'run', 'ablation': 'branch=nowhere'},
        {'command': 'eval'},
        {'command': 'run', 'dataset': 'features/train'},
        {'command': 'generate', 'dataset': 'features/train', 'eval_dataset': 'features/eval'},
    )
    def test_invalid(self, document):
        with self.assertRaises(ConfigRequestError):
            validate_run_config(document)

    def test_file_and_flags(self):
        path = self.write(json.dumps({'seed': 1, 'alternation': {'n_steps': 5, 'ema_alpha': 0.3}}))
        config = load_run_config('run', path=path, seed=2, steps=2, symmetrize_similarity=True, hard_targets=False)
        self.assertEqual(config.seed, 2)
        self.assertEqual(config.alternation.n_steps, 2)
        self.assertEqual(config.alternation.ema_alpha, 0.3)
        self.assertTrue(config.alternation.graphs.symmetrize_similarity)
        self.assertFalse(config.alternation.hard_targets)

    def test_shorthands(self):
        config = load_run_config('ablate', graph='constant:0.5', branch='feature')
        self.assertEqual(config.ablation, AblationConfig('feature', 0.5, True))

    def test_shorthand_with_spec(self):
        with self.assertRaises(ConfigRequestError):
            load_run_config('ablate', ablate='indirect=off', graph='constant:0.5')

    def test_not_json(self):
        with self.assertRaises(ConfigRequestError):
            load_run_config('run', path=self.write('{"seed": '))

    def test_not_an_object(self):
        with self.assertRaises(ConfigRequestError):
            load_run_config('run', path=self.write('[1, 2]'))

    def test_missing_file(self):
        with self.assertRaises(ConfigRequestError):
            load_run_config('run', path=os.path.join(self.workdir, 'absent.json'))

    def test_snapshot(self):
        config = validate_run_config({'command': 'run', 'seed': 3, 'ablation': 'indirect=off'})
        snapshot = json.loads(json.dumps(config.to_dict()))
        self.assertEqual(snapshot['seed'], 3)
        self.assertEqual(snapshot['ablation'], 'branch=both,indirect=off')
        self.assertEqual(snapshot['alternation']['cleaner']['comp_dims'], [512, 128])
        self.assertIsNone(snapshot['synthetic'])
