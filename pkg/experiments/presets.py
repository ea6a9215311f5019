"""Named experiment recipes, written in the same schema as YAML config files."""
import copy

COMMON_TRAIN = {
    'epochs': 200,
    'batch_size': 32,
    'lr0': 0.01,
    'lr_decay_factor': 0.5,
    'lr_decay_every': 100,
    'weight_decay': 1e-4,
    'lam': 0.1,
    'seed': 10,
}

EXP1_GENERATOR = {
    'target': 'exp1',
    'sampling': 'grid',
    'n': 300,
    'split': 'interleaved',
    'fractions': [0.5, 0.25, 0.25],
}


def _train(**changes):
    return dict(COMMON_TRAIN, **changes)


PRESETS = {
    'intro-spike': {
        'description': 'Smooth oscillation with a sharp spike; CauchyNet against a ReLU MLP.',
        'generator': {
            'target': 'intro_spike',
            'sampling': 'grid',
            'n': 400,
            'split': 'interleaved',
        },
        'model': {'h': 128},
        'train': _train(epochs=500, lr0=0.001, weight_decay=0.0),
        'compare_baseline': True,
    },
    'exp1': {
        'description': 'Sharp rational peak, Gaussian dip and oscillation; 150 evenly spaced training points.',
        'generator': dict(EXP1_GENERATOR),
        'model': {'h': 128},
        'train': _train(),
        'compare_baseline': True,
    },
    'exp2-gap': {
        'description': 'One-dimensional gap filling around the six turning points.',
        'generator': {
            'target': 'exp2_gap',
            'sampling': 'grid',
            'n': 400,
        },
        'mask': {
            'kind': 'turning_points',
            'half_width': 0.15,
            'visible_fractions': [0.7, 0.3],
        },
        'model': {'h': 128},
        'train': _train(epochs=2000, lr_decay_every=500),
    },
    'exp2-disk': {
        'description': 'Two-dimensional surface with the disk of radius 0.3 around the origin withheld.',
        'generator': {
            'target': '2d_missing_disk',
            'sampling': 'uniform',
            'n': 3000,
        },
        'mask': {
            'kind': 'disk',
            'center': [0.0, 0.0],
            'radius': 0.3,
            'visible_fractions': [0.6, 0.4],
        },
        'model': {'h': 128},
        'train': _train(epochs=500),
    },
    'exp3-surface': {
        'description': 'Polynomial-rational surface over [-1.5, 1.5]^2.',
        'generator': {
            'target': '2d_surface',
            'sampling': 'uniform',
            'n': 300,
            'split': 'random',
        },
        'model': {'h': 128},
        'train': _train(epochs=500),
    },
    'exp4-csv': {
        'description': 'Trend forecasting on a user CSV series; set generator.path and generator.period.',
        'generator': {
            'target': 'csv_trend',
            'path': None,
            'column': 'value',
            'period': 12,
            'window': 0,
            'split': 'chronological',
        },
        'model': {'h': 128},
        'train': _train(),
        'scaler_range': [-1.0, 1.0],
        'compare_baseline': True,
    },
    'exp5-lambda': {
        'description': 'Imaginary-penalty ablation on the exp1 setup.',
        'generator': dict(EXP1_GENERATOR),
        'model': {'h': 128},
        'train': _train(),
        'ablation': {
            'lambdas': [0.1, 0.3, 0.5, 1.0, 1.5],
            'snapshot_every': 10,
        },
    },
    'exp5-grid': {
        'description': 'Hidden size / data size and learning-rate / weight-decay sensitivity on the exp1 setup.',
        'generator': dict(EXP1_GENERATOR),
        'model': {'h': 128},
        'train': _train(),
        'sweep': {
            'hidden': [32, 64, 128, 256, 612, 1224],
            'sizes': [100, 300, 600, 1200],
            'lrs': [0.001, 0.01, 0.1],
            'wds': [0.0, 1e-5, 1e-4],
        },
    },
}


def preset_names():
    return sorted(PRESETS)


def preset_document(name):
    """A fresh, editable config document for preset ``name``."""
    if name not in PRESETS:
        raise KeyError(name)
    document = copy.deepcopy(PRESETS[name])
    return {'version': 1, 'name': name, **document}
