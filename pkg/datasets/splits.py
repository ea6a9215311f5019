"""Sampling, train/val/test splitting and missing-region masks."""
from dataclasses import dataclass, field, replace

import numpy as np

from networks.exceptions import LengthMismatch

SPLIT_NAMES = ('train', 'val', 'test')


@dataclass(frozen=True)
class Split:
    X: np.ndarray
    y: np.ndarray

    def __len__(self):
        return len(self.y)

    def samples(self):
        return [(tuple(x), float(y)) for x, y in zip(self.X, self.y)]


@dataclass(frozen=True)
class SplitDataset:
    train: Split
    val: Split
    test: Split
    m: int
    provenance: dict = field(default_factory=dict)

    def splits(self):
        return [(name, getattr(self, name)) for name in SPLIT_NAMES]

    def with_targets(self, transform):
        """Copy with ``transform`` applied to every split's targets."""
        return replace(self, **{
            name: Split(split.X, transform(split.y)) for name, split in self.splits()
        })


@dataclass(frozen=True)
class MissingMask:
    kind: str
    centers: tuple = ()
    half_width: float = 0.0
    center: tuple = (0.0, 0.0)
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == 'intervals':
            if not self.half_width > 0 or not self.centers:
                raise ValueError('interval mask needs centers and a positive half-width')
        elif self.kind == 'disk':
            if not self.radius > 0:
                raise ValueError('disk mask needs a positive radius')
        else:
            raise ValueError(f'unknown mask kind {self.kind!r}')

    def contains(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if self.kind == 'intervals':
            distance = np.abs(X[:, :1] - np.asarray(self.centers, dtype=float)[None, :])
            return np.any(distance <= self.half_width, axis=1)
        offset = X[:, :2] - np.asarray(self.center, dtype=float)[None, :]
        return np.sum(offset ** 2, axis=1) <= self.radius ** 2


def evenly_spaced(domain, n):
    lo, hi = domain
    return np.linspace(lo, hi, n).reshape(-1, 1)


def uniform_box(domains, n, rng):
    columns = [rng.uniform(lo, hi, size=n) for lo, hi in domains]
    return np.column_stack(columns)


def _counts(n, fractions):
    if len(fractions) != 3 or any(f < 0 for f in fractions) or not np.isclose(sum(fractions), 1.0):
        raise ValueError(f'split fractions must be three non-negative values summing to 1: {fractions}')
    n_train = int(round(n * fractions[0]))
    n_test = int(round(n * fractions[2]))
    n_val = n - n_train - n_test
    counts = (n_train, n_val, n_test)
    for name, count, fraction in zip(SPLIT_NAMES, counts, fractions):
        if count < 0 or (fraction > 0 and count < 1):
            raise ValueError(f'{n} samples cannot fill a non-empty {name} split')
    return counts


def _subset(X, y, indices):
    indices = np.sort(np.asarray(indices, dtype=int))
    return Split(X[indices], y[indices])


def make_split(X, y, fractions=(0.5, 0.25, 0.25), rng=None, strategy='random', provenance=None):
    """Partition samples into train/val/test.

    ``random`` shuffles everything; ``interleaved`` takes an evenly spaced
    train subset in input order and shuffles the rest into val/test;
    ``chronological`` keeps order (train first, test last).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    if len(X) != len(y):
        raise LengthMismatch(f'{len(X)} inputs but {len(y)} targets')
    n = len(y)
    n_train, n_val, _ = _counts(n, fractions)
    if rng is None and strategy in ('random', 'interleaved'):
        raise ValueError(f'{strategy} split needs an rng')

    if strategy == 'chronological':
        order = np.arange(n)
    elif strategy == 'interleaved':
        train = np.floor(np.arange(n_train) * n / n_train).astype(int) if n_train else np.array([], int)
        rest = np.setdiff1d(np.arange(n), train)
        order = np.concatenate([train, rest[rng.permutation(len(rest))]])
    elif strategy == 'random':
        order = rng.permutation(n)
    else:
        raise ValueError(f'unknown split strategy {strategy!r}')

    return SplitDataset(
        train=_subset(X, y, order[:n_train]),
        val=_subset(X, y, order[n_train:n_train + n_val]),
        test=_subset(X, y, order[n_train + n_val:]),
        m=X.shape[1],
        provenance=dict(provenance or {}, strategy=strategy, fractions=list(fractions)),
    )


def apply_mask(X, y, mask):
    """Split samples into ``(visible, hidden)`` by the mask's geometric predicate."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    hidden = mask.contains(X)
    return Split(X[~hidden], y[~hidden]), Split(X[hidden], y[hidden])


def make_masked_split(X, y, mask, rng, visible_fractions=(0.6, 0.4), provenance=None):
    """Hidden-region samples become the test split; the rest fill train/val."""
    visible, hidden = apply_mask(X, y, mask)
    if len(hidden) < 1:
        raise ValueError('mask hides no samples')
    fit = make_split(visible.X, visible.y, (*visible_fractions, 0.0), rng=rng)
    return SplitDataset(
        train=fit.train,
        val=fit.val,
        test=hidden,
        m=fit.m,
        provenance=dict(provenance or {}, strategy='masked', mask=mask.kind,
                        visible_fractions=list(visible_fractions)),
    )


def split_sizes(dataset):
    return {name: len(split) for name, split in dataset.splits()}
