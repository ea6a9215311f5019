"""Loading experiment documents: presets, YAML files, ``--set`` overrides and env seeds."""
import logging
import os

import yaml

from networks.exceptions import SchemaError

from .presets import preset_document, preset_names
from .serializers import ExperimentSpecSerializer

logger = logging.getLogger(__name__)

SEED_ENV = 'CAUCHYNET_SEED'


def load_config_file(path):
    with open(path, encoding='utf-8') as handle:
        try:
            document = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise SchemaError(f'config {path} is not valid YAML: {exc}') from exc
    if not isinstance(document, dict):
        raise SchemaError(f'config {path} must be a mapping at the top level')
    return document


def load_preset(name):
    try:
        return preset_document(name)
    except KeyError:
        raise SchemaError(
            f'unknown preset {name!r}; choose from {", ".join(preset_names())}',
            {'preset': name},
        ) from None


def apply_overrides(document, overrides):
    """Apply ``dotted.key=value`` strings in order; values are parsed as YAML scalars."""
    for override in overrides or ():
        key, sep, raw = override.partition('=')
        if not sep or not key.strip():
            raise SchemaError(f'override {override!r} is not of the form key=value')
        try:
            value = yaml.safe_load(raw) if raw.strip() else None
        except yaml.YAMLError as exc:
            raise SchemaError(f'override {override!r} has an unparseable value') from exc

        node = document
        parts = key.strip().split('.')
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise SchemaError(f'override {override!r}: {part!r} is not a section')
            node = child
        node[parts[-1]] = value
    return document


def apply_seed_env(document, environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV)
    if raw is None or raw == '':
        return document
    try:
        seed = int(raw)
    except ValueError:
        raise SchemaError(f'{SEED_ENV}={raw!r} is not an integer') from None
    train = document.get('train') or {}
    document['train'] = dict(train, seed=seed)
    logger.info('seed %d taken from %s', seed, SEED_ENV)
    return document


def build_spec(document):
    serializer = ExperimentSpecSerializer(data=document)
    if not serializer.is_valid():
        raise SchemaError('invalid experiment config', serializer.errors)
    return serializer.save()


def resolve_spec(preset=None, config=None, overrides=(), environ=None):
    """Build an ``ExperimentSpec`` from exactly one of a preset name or a YAML path."""
    if (preset is None) == (config is None):
        raise SchemaError('give exactly one of a preset name or a config file')
    document = load_preset(preset) if preset else load_config_file(config)
    apply_overrides(document, overrides)
    apply_seed_env(document, environ)
    return build_spec(document)
