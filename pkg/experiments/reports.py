"""Run directories: atomic file writes, the sha256 manifest and optional PNG plots."""
import hashlib
import json
import logging
import os
from contextlib import contextmanager
from pathlib import Path

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


class RunWriter:
    """Collects the files of one run directory and writes its manifest last."""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def path(self, name):
        return self.output_dir / name

    @contextmanager
    def atomic(self, name):
        """Yields a temporary path that replaces ``name`` once the block succeeds."""
        target = self.path(name)
        tmp = target.with_name(f'.{target.name}.tmp')
        try:
            yield tmp
            os.replace(tmp, target)
        finally:
            if tmp.exists():
                tmp.unlink()
        if name not in self.files:
            self.files.append(name)

    def write_frame(self, name, frame):
        with self.atomic(name) as tmp:
            frame.to_csv(tmp, index=False)
        return self.path(name)

    def write_json(self, name, document):
        with self.atomic(name) as tmp:
            with open(tmp, 'w', encoding='utf-8') as handle:
                json.dump(document, handle, indent=1, sort_keys=True, default=str)
                handle.write('\n')
        return self.path(name)

    def artifacts(self):
        entries = []
        for name in sorted(self.files):
            path = self.path(name)
            entries.append({'name': name, 'sha256': sha256_file(path), 'size': path.stat().st_size})
        return entries

    def write_manifest(self, status, **details):
        document = dict(details, status=status, files=self.artifacts())
        with self.atomic(MANIFEST_NAME) as tmp:
            with open(tmp, 'w', encoding='utf-8') as handle:
                json.dump(document, handle, indent=1, sort_keys=True, default=str)
                handle.write('\n')
        self.files.remove(MANIFEST_NAME)
        return document


def read_manifest(output_dir):
    with open(Path(output_dir) / MANIFEST_NAME, encoding='utf-8') as handle:
        return json.load(handle)


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        return None
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    return plt


def plot_loss_curves(writer, logs, name='loss_curves.png'):
    """``logs`` maps a label to a TrainLog; returns the written filename or None."""
    plt = _pyplot()
    if plt is None:
        logger.info('matplotlib is not installed; skipping %s', name)
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, log in logs.items():
        frame = log.to_frame()
        ax.semilogy(frame['epoch'], frame['train_loss'], label=f'{label} train')
        ax.semilogy(frame['epoch'], frame['val_loss'], '--', label=f'{label} val')
    ax.set_xlabel('epoch')
    ax.set_ylabel('loss')
    ax.legend()
    with writer.atomic(name) as tmp:
        fig.savefig(tmp, format='png', dpi=120, metadata={'Software': None})
    plt.close(fig)
    return name


def plot_predictions(writer, predictions, name='predictions.png'):
    plt = _pyplot()
    if plt is None:
        logger.info('matplotlib is not installed; skipping %s', name)
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    if 'x1' in predictions.columns:
        points = ax.scatter(predictions['x0'], predictions['x1'], c=predictions['y_pred'] - predictions['y_true'],
                            cmap='coolwarm', s=6)
        fig.colorbar(points, ax=ax, label='signed error')
        ax.set_ylabel('x1')
    else:
        ordered = predictions.sort_values('x0')
        ax.plot(ordered['x0'], ordered['y_true'], 'k--', label='target')
        for split, group in ordered.groupby('split', sort=False):
            ax.plot(group['x0'], group['y_pred'], '.', label=f'{split} prediction')
        ax.legend()
    ax.set_xlabel('x0')
    with writer.atomic(name) as tmp:
        fig.savefig(tmp, format='png', dpi=120, metadata={'Software': None})
    plt.close(fig)
    return name
