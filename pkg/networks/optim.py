"""Adam over real parameter components, step-decay schedule and the training loop.

Any model exposing ``parameters()``, ``loss_and_gradients(X, y, lam)`` and
``evaluate(X, y, lam)`` trains here; complex parameters are updated through
their float64 views, so every real and imaginary component is its own Adam
coordinate.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from django.conf import settings

from .exceptions import LengthMismatch, NonFinite, PoleEncountered, TrainingDiverged
from .linalg import REAL, Rng

logger = logging.getLogger(__name__)

TRAINLOG_COLUMNS = ['epoch', 'lr', 'train_loss', 'val_loss', 'wall_ms']

# Stream key for minibatch order; the experiment runner owns keys 1 to 4.
SHUFFLE_KEY = 5


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    lr0: float = 0.01
    lr_decay_factor: float = 0.5
    lr_decay_every: int = 100
    weight_decay: float = 1e-4
    lam: float = 0.1
    seed: int = 10

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError('epochs must be >= 1')
        if self.batch_size < 1:
            raise ValueError('batch_size must be >= 1')
        if not self.lr0 > 0:
            raise ValueError('lr0 must be > 0')
        if not 0 < self.lr_decay_factor <= 1:
            raise ValueError('lr_decay_factor must be in (0, 1]')
        if self.lr_decay_every < 1:
            raise ValueError('lr_decay_every must be >= 1')
        if self.weight_decay < 0 or self.lam < 0:
            raise ValueError('weight_decay and lambda must be >= 0')


@dataclass
class AdamState:
    m1: list
    m2: list
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8

    @classmethod
    def for_model(cls, model, **hyper):
        defaults = settings.CAUCHYNET
        hyper.setdefault('beta1', defaults['ADAM_BETA1'])
        hyper.setdefault('beta2', defaults['ADAM_BETA2'])
        hyper.setdefault('eps_adam', defaults['ADAM_EPS'])
        params = model.parameters()
        return cls(
            m1=[np.zeros_like(p) for p in params],
            m2=[np.zeros_like(p) for p in params],
            **hyper,
        )


@dataclass
class TrainRecord:
    epoch: int
    lr: float
    train_loss: float
    val_loss: float
    wall_ms: float
    val_mean_abs_imag: Optional[float] = None


@dataclass
class TrainLog:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def to_frame(self, wall_time=True):
        frame = pd.DataFrame(
            [[r.epoch, r.lr, r.train_loss, r.val_loss, r.wall_ms] for r in self.records],
            columns=TRAINLOG_COLUMNS,
        )
        if not wall_time:
            frame['wall_ms'] = None
        return frame

    def to_csv(self, path, wall_time=None):
        if wall_time is None:
            wall_time = settings.CAUCHYNET['RECORD_WALL_TIME']
        self.to_frame(wall_time=wall_time).to_csv(path, index=False)


def lr_at(config, epoch):
    if epoch < 0:
        raise ValueError('epoch must be >= 0')
    return config.lr0 * config.lr_decay_factor ** (epoch // config.lr_decay_every)


def adam_step(model, grads, state, lr, weight_decay=0.0):
    """One Adam update with coupled L2 weight decay, in place on model and state."""
    params = model.parameters()
    grad_list = grads.as_list()
    if len(params) != len(grad_list) or any(
            p.shape != g.shape for p, g in zip(params, grad_list)):
        raise LengthMismatch('gradient shapes do not mirror the model')

    state.t += 1
    bias1 = 1.0 - state.beta1 ** state.t
    bias2 = 1.0 - state.beta2 ** state.t
    updates = []
    for param, grad, m1, m2 in zip(params, grad_list, state.m1, state.m2):
        theta, g = param.view(REAL), np.asarray(grad).view(REAL)
        first, second = m1.view(REAL), m2.view(REAL)
        g = g + weight_decay * theta
        first *= state.beta1
        first += (1.0 - state.beta1) * g
        second *= state.beta2
        second += (1.0 - state.beta2) * g * g
        update = lr * (first / bias1) / (np.sqrt(second / bias2) + state.eps_adam)
        if not np.all(np.isfinite(update)):
            raise NonFinite('Adam produced a non-finite update')
        updates.append((theta, update))
    for theta, update in updates:
        theta -= update


def _imag_error(model, X):
    if getattr(model, 'model_type', None) != 'cauchynet':
        return None
    from .cauchynet import mean_abs_imag
    return mean_abs_imag(model, X)


def epoch_order(seed, epoch, n):
    """Minibatch permutation for one epoch, on its own stream."""
    return Rng(seed, SHUFFLE_KEY, epoch).permutation(n)


def train(model, dataset, config, monitor=None):
    """Shuffled minibatch Adam on the mean batch loss for ``config.epochs`` epochs.

    ``dataset`` needs ``train`` and ``val`` splits with ``X``/``y`` arrays.
    ``monitor(epoch, model)`` is called after every completed epoch.
    """
    X, y = dataset.train.X, dataset.train.y
    Xv, yv = dataset.val.X, dataset.val.y
    if len(y) < 1:
        raise ValueError('training split is empty')
    if X.shape[1] != model.m:
        raise LengthMismatch(f'model expects {model.m} inputs, dataset has {X.shape[1]}')

    state = AdamState.for_model(model)
    log = TrainLog()
    log_every = settings.CAUCHYNET['LOG_EVERY']
    n = len(y)

    for epoch in range(config.epochs):
        started = time.perf_counter()
        lr = lr_at(config, epoch)
        order = epoch_order(config.seed, epoch, n)
        try:
            for start in range(0, n, config.batch_size):
                batch = order[start:start + config.batch_size]
                _, grads = model.loss_and_gradients(X[batch], y[batch], config.lam)
                adam_step(model, grads, state, lr, config.weight_decay)
            train_loss = model.evaluate(X, y, config.lam).total
            val_loss = model.evaluate(Xv, yv, config.lam).total if len(yv) else math.nan
            if not math.isfinite(train_loss):
                raise NonFinite(f'training loss is {train_loss}')
        except (NonFinite, PoleEncountered) as exc:
            logger.warning('%s diverged at epoch %d: %s', model.model_type, epoch + 1, exc)
            raise TrainingDiverged(epoch + 1, log) from exc

        log.records.append(TrainRecord(
            epoch=epoch + 1,
            lr=lr,
            train_loss=train_loss,
            val_loss=val_loss,
            wall_ms=(time.perf_counter() - started) * 1000.0,
            val_mean_abs_imag=_imag_error(model, Xv) if len(yv) else None,
        ))
        if monitor is not None:
            monitor(epoch + 1, model)
        if (epoch + 1) % log_every == 0 or epoch + 1 == config.epochs:
            logger.info('%s epoch %d lr=%.3g train=%.6g val=%.6g',
                        model.model_type, epoch + 1, lr, train_loss, val_loss)
    return log
