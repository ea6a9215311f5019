"""Database bookkeeping for CLI runs; never fatal to the run itself."""
import logging

from django.conf import settings
from django.db import DatabaseError, transaction

from .models import ExperimentRun, RunArtifact

logger = logging.getLogger(__name__)


def recording_enabled(record=True):
    return record and settings.CAUCHYNET['RECORD_RUNS']


def start_run(name, command, seed, document, output_dir, record=True):
    if not recording_enabled(record):
        return None
    try:
        return ExperimentRun.objects.create(
            name=name,
            command=command,
            seed=seed,
            spec=document,
            output_dir=str(output_dir),
        )
    except DatabaseError as exc:
        logger.warning('run %s is not recorded: %s', name, exc)
        return None


def finish_run(run, status, metrics=None, artifacts=(), error=''):
    if run is None:
        return None
    try:
        with transaction.atomic():
            run.status = status
            run.metrics = metrics or []
            run.error = error
            run.save()
            for artifact in artifacts:
                RunArtifact.objects.update_or_create(
                    run=run,
                    filename=artifact['name'],
                    defaults={'sha256': artifact['sha256'], 'size': artifact['size']},
                )
    except DatabaseError as exc:
        logger.warning('run %s could not be updated: %s', run.pk, exc)
    return run
